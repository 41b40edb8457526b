//! Monte Carlo experiment driver: builds the topology once, runs
//! independently seeded trials in parallel, and aggregates detection
//! frequencies per budget grid point.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use sourceq_core::centrality::likelihood_scores;
use sourceq_core::diffusion::{simulate_si, DiffusionSnapshot};
use sourceq_core::estimators::{
    mvad, mvna, r_star_ad_sufficient, r_star_na_sufficient, EstimatorConfig,
};
use sourceq_core::querying::TruthfulnessParams;
use sourceq_core::topology::{
    gen_erdos_renyi, gen_preferential_attachment, parse_edge_list, FiniteGraph, NodeId,
    RegularTreeTopology,
};

use crate::config::{ExperimentConfig, RepetitionPolicy, Scheme, TopologySpec};
use crate::error::{CliError, Result};

/// Aggregated outcome of one (topology, scheme, budget) grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub topology: String,
    pub d_or_n: usize,
    pub scheme: Scheme,
    pub budget: u32,
    pub repetition: u32,
    pub p: f64,
    pub q: f64,
    pub n_infected: usize,
    pub trials: usize,
    pub detect_prob: f64,
    pub stderr: f64,
    pub mean_budget: f64,
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable per-trial seed: mixing makes nearby (grid, trial) pairs
/// statistically independent while staying order-free.
pub fn trial_seed(base: u64, grid_index: u64, trial: u64) -> u64 {
    splitmix64(splitmix64(splitmix64(base) ^ grid_index) ^ trial)
}

fn stream(seed: u64, lane: u64) -> u64 {
    splitmix64(seed ^ splitmix64(lane.wrapping_add(0xa5a5)))
}

enum RealizedTopology {
    Tree { degree: usize },
    Graph { graph: FiniteGraph },
}

impl RealizedTopology {
    fn build(spec: &TopologySpec, base_seed: u64) -> Result<Self> {
        let graph_seed = stream(base_seed, 0x17_0901);
        match spec {
            TopologySpec::Tree { degree } => {
                RegularTreeTopology::new(*degree)?;
                Ok(RealizedTopology::Tree { degree: *degree })
            }
            TopologySpec::ErdosRenyi { n, avg_degree } => Ok(RealizedTopology::Graph {
                graph: gen_erdos_renyi(*n, *avg_degree, graph_seed)?,
            }),
            TopologySpec::ScaleFree { n, edges_per_node } => Ok(RealizedTopology::Graph {
                graph: gen_preferential_attachment(*n, *edges_per_node, graph_seed)?,
            }),
            TopologySpec::File { path } => {
                let text = std::fs::read_to_string(path).map_err(|err| {
                    CliError::Config(format!("cannot read {}: {err}", path.display()))
                })?;
                Ok(RealizedTopology::Graph {
                    graph: parse_edge_list(&text)?,
                })
            }
        }
    }

    fn d_or_n(&self) -> usize {
        match self {
            RealizedTopology::Tree { degree } => *degree,
            RealizedTopology::Graph { graph } => graph.node_count(),
        }
    }

    /// Degree fed to the repetition formulas: the tree degree, or the
    /// average degree of a probe snapshot (designations range over
    /// snapshot neighbors, so the host graph's degree overstates the
    /// noise). Clamped to 3, the formulas' domain floor.
    fn formula_degree(
        &self,
        eligible: &[NodeId],
        n_infected: usize,
        base_seed: u64,
    ) -> Result<usize> {
        match self {
            RealizedTopology::Tree { degree } => Ok(*degree),
            RealizedTopology::Graph { .. } => {
                let probe_seed = stream(base_seed, 0x9e11);
                let mut rng = ChaCha8Rng::seed_from_u64(stream(probe_seed, 1));
                let source = eligible[rng.gen_range(0..eligible.len())];
                let probe = self.simulate(source, n_infected, stream(probe_seed, 2))?;
                let average = 2.0 * probe.edge_count() as f64 / probe.size() as f64;
                Ok((average.round() as usize).max(3))
            }
        }
    }

    /// Nodes a diffusion of the requested size can start from.
    fn eligible_sources(&self, n_infected: usize) -> Result<Vec<NodeId>> {
        match self {
            RealizedTopology::Tree { .. } => Ok(vec![RegularTreeTopology::ROOT]),
            RealizedTopology::Graph { graph } => {
                let sizes = graph.component_sizes();
                let eligible: Vec<NodeId> = (0..graph.node_count())
                    .filter(|&v| sizes[v] >= n_infected)
                    .map(|v| NodeId(v as u32))
                    .collect();
                if eligible.is_empty() {
                    return Err(CliError::Config(format!(
                        "no component holds {n_infected} nodes (largest: {})",
                        sizes.iter().copied().max().unwrap_or(0)
                    )));
                }
                Ok(eligible)
            }
        }
    }

    fn simulate(&self, source: NodeId, n_infected: usize, seed: u64) -> Result<DiffusionSnapshot> {
        let snapshot = match self {
            RealizedTopology::Tree { degree } => {
                let mut tree = RegularTreeTopology::new(*degree)?;
                simulate_si(&mut tree, source, n_infected, seed)?
            }
            RealizedTopology::Graph { graph } => {
                simulate_si(&mut graph.view(), source, n_infected, seed)?
            }
        };
        Ok(snapshot)
    }
}

fn resolve_repetition(
    scheme: Scheme,
    policy: RepetitionPolicy,
    p: f64,
    q: f64,
    formula_degree: usize,
    budget: u32,
) -> Result<u32> {
    let r = match (scheme, policy) {
        (Scheme::CenterBaseline, _) => return Ok(0),
        (_, RepetitionPolicy::Fixed(r)) => r,
        (Scheme::NonAdaptive, RepetitionPolicy::Auto) => {
            if budget < 2 {
                1
            } else {
                r_star_na_sufficient(p, q, formula_degree, budget as f64)?
            }
        }
        (Scheme::Adaptive, RepetitionPolicy::Auto) => {
            if budget < 3 {
                1
            } else {
                r_star_ad_sufficient(p, q, formula_degree, budget as f64)?
            }
        }
    };
    if r > budget {
        return Err(CliError::Config(format!(
            "repetition {r} exceeds budget {budget}"
        )));
    }
    Ok(r)
}

/// Runs `config.trials` independent trials per budget grid point and
/// aggregates. Results are a pure function of the configuration: trials
/// are seeded individually, so thread scheduling cannot change them.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    config.validate()?;
    let params = TruthfulnessParams::new(config.p, config.q)?;
    let realized = RealizedTopology::build(&config.topology, config.base_seed)?;
    let eligible = realized.eligible_sources(config.n_infected)?;
    let formula_degree = realized.formula_degree(&eligible, config.n_infected, config.base_seed)?;

    // Resolve the whole grid first so bad grid points fail before any
    // trial runs.
    let repetitions: Vec<u32> = config
        .budgets
        .iter()
        .map(|&budget| {
            resolve_repetition(
                config.scheme,
                config.repetition,
                config.p,
                config.q,
                formula_degree,
                budget,
            )
        })
        .collect::<Result<_>>()?;

    let mut rows = Vec::with_capacity(config.budgets.len());
    for (grid_index, (&budget, &repetition)) in config.budgets.iter().zip(&repetitions).enumerate()
    {
        let outcomes: Vec<(bool, u32)> = (0..config.trials)
            .into_par_iter()
            .map(|trial| {
                let seed = trial_seed(config.base_seed, grid_index as u64, trial as u64);
                run_trial(
                    &realized, &eligible, config, params, budget, repetition, seed,
                )
            })
            .collect::<Result<_>>()?;

        let successes = outcomes.iter().filter(|(hit, _)| *hit).count();
        let detect_prob = successes as f64 / config.trials as f64;
        let spent_total: u64 = outcomes.iter().map(|(_, spent)| *spent as u64).sum();
        rows.push(ResultRow {
            topology: config.topology.label().to_string(),
            d_or_n: realized.d_or_n(),
            scheme: config.scheme,
            budget,
            repetition,
            p: config.p,
            q: config.q,
            n_infected: config.n_infected,
            trials: config.trials,
            detect_prob,
            stderr: (detect_prob * (1.0 - detect_prob) / config.trials as f64).sqrt(),
            mean_budget: spent_total as f64 / config.trials as f64,
        });
    }
    Ok(rows)
}

fn run_trial(
    realized: &RealizedTopology,
    eligible: &[NodeId],
    config: &ExperimentConfig,
    params: TruthfulnessParams,
    budget: u32,
    repetition: u32,
    seed: u64,
) -> Result<(bool, u32)> {
    let mut source_rng = ChaCha8Rng::seed_from_u64(stream(seed, 1));
    let source = eligible[source_rng.gen_range(0..eligible.len())];
    let snapshot = realized.simulate(source, config.n_infected, stream(seed, 2))?;

    let (estimate, spent) = match config.scheme {
        Scheme::CenterBaseline => (likelihood_scores(&snapshot)?.center(), 0),
        Scheme::NonAdaptive => {
            let estimator = EstimatorConfig::new(budget, repetition, params, stream(seed, 3))?;
            let result = mvna(&snapshot, &estimator)?;
            (result.estimate, result.budget_spent)
        }
        Scheme::Adaptive => {
            let estimator = EstimatorConfig::new(budget, repetition, params, stream(seed, 3))?;
            let result = mvad(&snapshot, &estimator)?;
            (result.estimate, result.budget_spent)
        }
    };
    Ok((estimate == snapshot.source(), spent))
}
