//! Experiment configuration and the compact text forms the command line
//! uses for topologies, schemes, and repetition policies.

use std::collections::BTreeMap;
use std::fmt;
use std::path::PathBuf;

use crate::error::{CliError, Result};

/// Where the diffusion runs.
#[derive(Debug, Clone, PartialEq)]
pub enum TopologySpec {
    /// Infinite regular tree of the given degree.
    Tree { degree: usize },
    /// G(n, p) with p chosen for the given average degree.
    ErdosRenyi { n: usize, avg_degree: f64 },
    /// Preferential attachment with the given edges-to-nodes ratio.
    ScaleFree { n: usize, edges_per_node: f64 },
    /// Edge-list file in "u v" text form.
    File { path: PathBuf },
}

impl TopologySpec {
    /// Parses `tree:d=3`, `er:n=2000,deg=4`, `sf:n=2000,ratio=1.5`, or
    /// `file:PATH`.
    pub fn parse(text: &str) -> Result<Self> {
        let (kind, rest) = text
            .split_once(':')
            .ok_or_else(|| CliError::Config(format!("missing ':' in topology '{text}'")))?;
        if kind == "file" {
            if rest.is_empty() {
                return Err(CliError::Config("empty file path".into()));
            }
            return Ok(TopologySpec::File {
                path: PathBuf::from(rest),
            });
        }
        let mut fields = BTreeMap::new();
        for pair in rest.split(',') {
            let (key, value) = pair.split_once('=').ok_or_else(|| {
                CliError::Config(format!("expected key=value in topology '{text}'"))
            })?;
            fields.insert(key.trim(), value.trim());
        }
        let number = |key: &str| -> Result<f64> {
            fields
                .get(key)
                .ok_or_else(|| CliError::Config(format!("topology '{text}' is missing '{key}'")))?
                .parse::<f64>()
                .map_err(|_| CliError::Config(format!("non-numeric '{key}' in topology '{text}'")))
        };
        match kind {
            "tree" => Ok(TopologySpec::Tree {
                degree: number("d")? as usize,
            }),
            "er" => Ok(TopologySpec::ErdosRenyi {
                n: number("n")? as usize,
                avg_degree: number("deg")?,
            }),
            "sf" => Ok(TopologySpec::ScaleFree {
                n: number("n")? as usize,
                edges_per_node: number("ratio")?,
            }),
            other => Err(CliError::Config(format!("unknown topology kind '{other}'"))),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            TopologySpec::Tree { .. } => "tree",
            TopologySpec::ErdosRenyi { .. } => "er",
            TopologySpec::ScaleFree { .. } => "sf",
            TopologySpec::File { .. } => "file",
        }
    }
}

/// Which estimator a run exercises.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    /// Batch majority voting over a hop-ordered candidate set.
    NonAdaptive,
    /// Designation-following walk.
    Adaptive,
    /// No querying: the likelihood center alone.
    CenterBaseline,
}

impl Scheme {
    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "na" => Ok(Scheme::NonAdaptive),
            "ad" => Ok(Scheme::Adaptive),
            "rc" => Ok(Scheme::CenterBaseline),
            other => Err(CliError::Config(format!(
                "unknown scheme '{other}' (expected na, ad, or rc)"
            ))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::NonAdaptive => "na",
            Scheme::Adaptive => "ad",
            Scheme::CenterBaseline => "rc",
        })
    }
}

/// Fixed repetition count, or the scheme's tuned formula at each budget.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RepetitionPolicy {
    Fixed(u32),
    Auto,
}

impl RepetitionPolicy {
    pub fn parse(text: &str) -> Result<Self> {
        if text == "auto" {
            return Ok(RepetitionPolicy::Auto);
        }
        let fixed: u32 = text.parse().map_err(|_| {
            CliError::Config(format!(
                "repetition must be 'auto' or an integer, got '{text}'"
            ))
        })?;
        if fixed == 0 {
            return Err(CliError::Config("repetition must be at least 1".into()));
        }
        Ok(RepetitionPolicy::Fixed(fixed))
    }
}

/// One full experiment: a topology, a scheme, a budget grid, and the
/// trial plan. Every random choice derives from `base_seed`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub topology: TopologySpec,
    pub scheme: Scheme,
    pub n_infected: usize,
    pub trials: usize,
    pub budgets: Vec<u32>,
    pub repetition: RepetitionPolicy,
    pub p: f64,
    pub q: f64,
    pub base_seed: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(CliError::Config("trials must be at least 1".into()));
        }
        if self.n_infected == 0 {
            return Err(CliError::Config("n_infected must be at least 1".into()));
        }
        if self.budgets.is_empty() {
            return Err(CliError::Config("budget grid is empty".into()));
        }
        if self.budgets.contains(&0) {
            return Err(CliError::Config("budgets must be at least 1".into()));
        }
        for (name, value) in [("p", self.p), ("q", self.q)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(CliError::Config(format!(
                    "{name} must lie in [0, 1], got {value}"
                )));
            }
        }
        Ok(())
    }
}

/// Parses a comma-separated list of numbers ("25,50,100").
pub fn parse_list<T: std::str::FromStr>(text: &str, what: &str) -> Result<Vec<T>> {
    let mut out = Vec::new();
    for token in text.split(',') {
        let token = token.trim();
        if token.is_empty() {
            continue;
        }
        out.push(
            token
                .parse::<T>()
                .map_err(|_| CliError::Config(format!("bad {what} value '{token}'")))?,
        );
    }
    if out.is_empty() {
        return Err(CliError::Config(format!("empty {what} list")));
    }
    Ok(out)
}
