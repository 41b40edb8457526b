use alloc::string::String;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// A parameter lies outside its documented domain.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Diffusion ran out of susceptible neighbors before reaching the
    /// requested snapshot size.
    #[error("component too small: {reachable} reachable nodes, {requested} requested")]
    ComponentTooSmall { reachable: usize, requested: usize },

    /// An operation was applied to data violating its structural
    /// precondition (non-tree snapshot, unknown node, ...).
    #[error("{0}")]
    Logic(String),

    /// Edge-list text could not be parsed. `line` is 1-based; 0 marks
    /// stream-level problems such as an empty input.
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = core::result::Result<T, Error>;
