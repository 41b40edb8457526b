//! Majority-voting source estimators: the batch scheme queries a
//! hop-ordered candidate set around the likelihood center, the adaptive
//! scheme walks the snapshot following majority designations. Both spend
//! `repetition` budget units per respondent.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;

// Resolves f64 math in builds where no dependency links std.
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bounds::{entropy_dir, entropy_id};
use crate::centrality::{argmax_index, likelihood_scores, CentralityScores};
use crate::diffusion::DiffusionSnapshot;
use crate::error::{Error, Result};
use crate::querying::{ask, majority_designation, majority_identity, TruthfulnessParams};
use crate::topology::NodeId;

/// Budget and repetition settings for one estimator run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    budget: u32,
    repetition: u32,
    params: TruthfulnessParams,
    seed: u64,
}

impl EstimatorConfig {
    pub fn new(
        budget: u32,
        repetition: u32,
        params: TruthfulnessParams,
        seed: u64,
    ) -> Result<Self> {
        if repetition == 0 {
            return Err(Error::InvalidParameter(
                "repetition must be at least 1".into(),
            ));
        }
        if budget < repetition {
            return Err(Error::InvalidParameter(format!(
                "budget {budget} cannot afford a single respondent at repetition {repetition}"
            )));
        }
        Ok(EstimatorConfig {
            budget,
            repetition,
            params,
            seed,
        })
    }

    pub fn budget(&self) -> u32 {
        self.budget
    }

    pub fn repetition(&self) -> u32 {
        self.repetition
    }

    pub fn params(&self) -> &TruthfulnessParams {
        &self.params
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

/// Outcome of one estimator run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EstimateResult {
    /// The estimated source.
    pub estimate: NodeId,
    /// Respondents whose identity answers were majority "yes".
    pub identity_set: Vec<NodeId>,
    /// Argmax set of the designation statistic (descendant counts for
    /// the batch scheme, visit counts for the adaptive one).
    pub designation_set: Vec<NodeId>,
    /// Queried nodes in query order.
    pub respondents: Vec<NodeId>,
    pub budget_spent: u32,
}

/// Directed designation graph: an edge w -> v records that w was chosen
/// as v's predecessor, so w's reachable set is everyone it (transitively)
/// appears to have infected.
#[derive(Debug, Clone, Default)]
pub struct PredecessorGraph {
    successors: BTreeMap<NodeId, BTreeSet<NodeId>>,
}

impl PredecessorGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_edge(&mut self, predecessor: NodeId, respondent: NodeId) {
        self.successors
            .entry(predecessor)
            .or_default()
            .insert(respondent);
    }

    /// Number of distinct nodes reachable from `v`, excluding `v`.
    /// Terminates under cycles via the visited set.
    pub fn descendant_count(&self, v: NodeId) -> usize {
        let mut visited = BTreeSet::new();
        visited.insert(v);
        let mut stack = alloc::vec![v];
        while let Some(u) = stack.pop() {
            if let Some(nexts) = self.successors.get(&u) {
                for &w in nexts {
                    if visited.insert(w) {
                        stack.push(w);
                    }
                }
            }
        }
        visited.len() - 1
    }
}

/// First the likelihood center, then the remaining infected nodes in
/// nondecreasing hop distance from it (ascending id within a distance),
/// truncated to `size` nodes.
pub fn select_candidate_set(
    snapshot: &DiffusionSnapshot,
    scores: &CentralityScores,
    size: usize,
) -> Result<Vec<NodeId>> {
    let n = snapshot.size();
    if size == 0 || size > n {
        return Err(Error::InvalidParameter(format!(
            "candidate size must lie in [1, {n}], got {size}"
        )));
    }
    let distances = snapshot.hop_distances_from(scores.center_index());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (distances[i], snapshot.node(i)));
    Ok(order
        .into_iter()
        .take(size)
        .map(|i| snapshot.node(i))
        .collect())
}

fn argmax_over_sets(
    snapshot: &DiffusionSnapshot,
    scores: &CentralityScores,
    identity_set: &BTreeSet<NodeId>,
    designation_set: &BTreeSet<NodeId>,
    truthful_identity: bool,
) -> Option<NodeId> {
    let pick = |set: &BTreeSet<NodeId>| {
        argmax_index(
            snapshot,
            scores.log_scores(),
            set.iter().filter_map(|v| snapshot.index_of(*v)),
        )
        .map(|i| snapshot.node(i))
    };
    let intersection: BTreeSet<NodeId> = identity_set
        .intersection(designation_set)
        .copied()
        .collect();
    if !intersection.is_empty() {
        return pick(&intersection);
    }
    if truthful_identity {
        return pick(identity_set);
    }
    let union: BTreeSet<NodeId> = identity_set.union(designation_set).copied().collect();
    pick(&union)
}

/// Batch majority-voting estimator.
///
/// Queries the floor(budget / repetition) nodes nearest the likelihood
/// center, filters majority-"yes" respondents into the identity set,
/// builds the predecessor graph from majority designations, takes the
/// argmax set of descendant counts as the designation set, and returns
/// the highest-likelihood node of their intersection (falling back to
/// the identity set when p = 1, the union otherwise, and finally the
/// center itself).
pub fn mvna(snapshot: &DiffusionSnapshot, config: &EstimatorConfig) -> Result<EstimateResult> {
    let scores = likelihood_scores(snapshot)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let r = config.repetition;
    let count = ((config.budget / r) as usize).min(snapshot.size());
    let candidates = select_candidate_set(snapshot, &scores, count)?;

    let mut identity_set = BTreeSet::new();
    let mut predecessors = PredecessorGraph::new();
    for &v in &candidates {
        let transcript = ask(snapshot, &config.params, v, r, &mut rng)?;
        if majority_identity(&transcript) {
            identity_set.insert(v);
        }
        if let Some(w) = majority_designation(&transcript, &mut rng) {
            predecessors.add_edge(w, v);
        }
    }

    let counts: Vec<usize> = candidates
        .iter()
        .map(|&v| predecessors.descendant_count(v))
        .collect();
    let max_count = counts.iter().copied().max().unwrap_or(0);
    let designation_set: BTreeSet<NodeId> = candidates
        .iter()
        .zip(&counts)
        .filter(|(_, &c)| c == max_count)
        .map(|(&v, _)| v)
        .collect();

    let truthful = config.params.identity_truthfulness() == 1.0;
    let estimate = argmax_over_sets(snapshot, &scores, &identity_set, &designation_set, truthful)
        .unwrap_or_else(|| scores.center());
    Ok(EstimateResult {
        estimate,
        identity_set: identity_set.into_iter().collect(),
        designation_set: designation_set.into_iter().collect(),
        budget_spent: r * candidates.len() as u32,
        respondents: candidates,
    })
}

/// Adaptive majority-voting estimator.
///
/// Walks from the likelihood center, spending `repetition` units per
/// respondent. With p = 1 a single truthful identity check suffices: the
/// walk stops as soon as it stands on the source. With p < 1 each
/// respondent's visit count accumulates; majority-"yes" respondents join
/// the identity set and the majority designation names the next
/// respondent (a uniformly random snapshot neighbor when every round was
/// answered "yes"). The final estimate is the highest-likelihood node of
/// identity ∩ most-visited, then the union, then the last respondent.
pub fn mvad(snapshot: &DiffusionSnapshot, config: &EstimatorConfig) -> Result<EstimateResult> {
    let scores = likelihood_scores(snapshot)?;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let r = config.repetition;
    let truthful = config.params.identity_truthfulness() == 1.0;

    let mut current = scores.center();
    let mut remaining = config.budget;
    let mut respondents = Vec::new();
    let mut identity_set: BTreeSet<NodeId> = BTreeSet::new();
    let mut visits: BTreeMap<NodeId, u32> = BTreeMap::new();

    while remaining >= r {
        remaining -= r;
        respondents.push(current);
        if truthful {
            if current == snapshot.source() {
                return Ok(EstimateResult {
                    estimate: current,
                    identity_set: Vec::new(),
                    designation_set: Vec::new(),
                    respondents,
                    budget_spent: config.budget - remaining,
                });
            }
        } else {
            *visits.entry(current).or_insert(0) += 1;
        }
        let transcript = ask(snapshot, &config.params, current, r, &mut rng)?;
        if !truthful && majority_identity(&transcript) {
            identity_set.insert(current);
        }
        current = match majority_designation(&transcript, &mut rng) {
            Some(next) => next,
            None => {
                // No direction data this visit; move blindly.
                let index = snapshot.index_of(current).expect("respondent is infected");
                let neighbors = snapshot.neighbors(index);
                if neighbors.is_empty() {
                    current
                } else {
                    snapshot.node(neighbors[rng.gen_range(0..neighbors.len())])
                }
            }
        };
    }

    let max_visits = snapshot
        .infected()
        .iter()
        .map(|v| visits.get(v).copied().unwrap_or(0))
        .max()
        .unwrap_or(0);
    let designation_set: BTreeSet<NodeId> = snapshot
        .infected()
        .iter()
        .filter(|v| visits.get(v).copied().unwrap_or(0) == max_visits)
        .copied()
        .collect();

    let estimate = argmax_over_sets(snapshot, &scores, &identity_set, &designation_set, false)
        .unwrap_or_else(|| *respondents.last().expect("at least one respondent"));
    Ok(EstimateResult {
        estimate,
        identity_set: identity_set.into_iter().collect(),
        designation_set: designation_set.into_iter().collect(),
        budget_spent: config.budget - remaining,
        respondents,
    })
}

fn check_formula_inputs(p: f64, q: f64, d: usize, budget: f64, min_budget: f64) -> Result<()> {
    for (name, value) in [("p", p), ("q", q)] {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidParameter(format!(
                "{name} must lie in [0, 1], got {value}"
            )));
        }
    }
    if d < 3 {
        return Err(Error::InvalidParameter("d must be at least 3".into()));
    }
    if !budget.is_finite() || budget < min_budget {
        return Err(Error::InvalidParameter(format!(
            "budget must be at least {min_budget}, got {budget}"
        )));
    }
    Ok(())
}

fn floor_at_least_one(x: f64) -> u32 {
    let floored = (1.0 + x).floor();
    if floored < 1.0 {
        1
    } else {
        floored as u32
    }
}

/// Repetition count tuned for the batch estimator:
/// floor(1 + 2(1-p){1 + (1-q)^2} ln K / (e ln(d-1))).
pub fn r_star_na_sufficient(p: f64, q: f64, d: usize, budget: f64) -> Result<u32> {
    check_formula_inputs(p, q, d, budget, 2.0)?;
    let numerator = 2.0 * (1.0 - p) * (1.0 + (1.0 - q) * (1.0 - q)) * budget.ln();
    Ok(floor_at_least_one(
        numerator / (core::f64::consts::E * ((d - 1) as f64).ln()),
    ))
}

/// Repetition count attaining the batch-scheme lower bound:
/// floor(1 + 4(1-p){7H(p) + 2H(q)} ln K / (3e ln(d-1))).
pub fn r_star_na_necessary(p: f64, q: f64, d: usize, budget: f64) -> Result<u32> {
    check_formula_inputs(p, q, d, budget, 2.0)?;
    let numerator =
        4.0 * (1.0 - p) * (7.0 * entropy_id(p)? + 2.0 * entropy_dir(q, d)?) * budget.ln();
    Ok(floor_at_least_one(
        numerator / (3.0 * core::f64::consts::E * ((d - 1) as f64).ln()),
    ))
}

/// Repetition count tuned for the adaptive estimator:
/// floor(1 + 7d^2 {2(1-p)^3 + (1-q)^2} ln ln K / (3(d-1))).
pub fn r_star_ad_sufficient(p: f64, q: f64, d: usize, budget: f64) -> Result<u32> {
    check_formula_inputs(p, q, d, budget, 3.0)?;
    let d_f = d as f64;
    let numerator =
        7.0 * d_f * d_f * (2.0 * (1.0 - p).powi(3) + (1.0 - q) * (1.0 - q)) * budget.ln().ln();
    Ok(floor_at_least_one(numerator / (3.0 * (d_f - 1.0))))
}

/// Repetition count attaining the adaptive-scheme lower bound:
/// floor(1 + 7dp{3H(p) + 2dH(q)} ln ln K / (2(d-1))).
pub fn r_star_ad_necessary(p: f64, q: f64, d: usize, budget: f64) -> Result<u32> {
    check_formula_inputs(p, q, d, budget, 3.0)?;
    let d_f = d as f64;
    let numerator =
        7.0 * d_f * p * (3.0 * entropy_id(p)? + 2.0 * d_f * entropy_dir(q, d)?) * budget.ln().ln();
    Ok(floor_at_least_one(numerator / (2.0 * (d_f - 1.0))))
}
