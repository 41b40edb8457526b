//! Experiment harness around `sourceq-core`: configuration parsing,
//! parallel Monte Carlo trials, CSV output, and the bound tables backing
//! the `sourceq` command line.

pub mod bounds_table;
pub mod config;
pub mod csv;
pub mod error;
pub mod harness;

pub use error::{CliError, Result};
