//! The noisy question oracle: each round asks a respondent "are you the
//! source?" and, on a "no", "which neighbor infected you?".

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;

use rand::Rng;

use crate::diffusion::DiffusionSnapshot;
use crate::error::{Error, Result};
use crate::topology::NodeId;

/// Probabilities of answering the identity (`p`) and direction (`q`)
/// questions truthfully.
///
/// The oracle itself accepts anything in [0, 1]; the estimator
/// guarantees additionally need p > 1/2 and q > 1/d, where d is the
/// respondent's neighbor count in the snapshot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruthfulnessParams {
    p: f64,
    q: f64,
}

impl TruthfulnessParams {
    pub fn new(p: f64, q: f64) -> Result<Self> {
        for (name, value) in [("p", p), ("q", q)] {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must lie in [0, 1], got {value}"
                )));
            }
        }
        Ok(TruthfulnessParams { p, q })
    }

    pub fn identity_truthfulness(&self) -> f64 {
        self.p
    }

    pub fn direction_truthfulness(&self) -> f64 {
        self.q
    }

    /// Whether the majority-voting analysis applies at snapshot degree `d`.
    pub fn within_estimator_domain(&self, d: usize) -> bool {
        self.p > 0.5 && d > 0 && self.q > 1.0 / d as f64
    }
}

/// Aggregated answers from asking one respondent `rounds` times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryTranscript {
    pub respondent: NodeId,
    pub rounds: u32,
    pub yes_count: u32,
    /// Designation counts per neighbor; collected only in rounds whose
    /// identity answer was "no".
    pub designations: BTreeMap<NodeId, u32>,
}

impl QueryTranscript {
    pub fn designation_total(&self) -> u32 {
        self.designations.values().sum()
    }
}

/// Asks `respondent` the identity/direction pair `rounds` times.
///
/// Per round: the source answers "yes" with probability p, any other
/// node with probability 1 - p. A "yes" ends the round. After a "no", a
/// non-source respondent designates its true infector with probability q
/// and a uniformly random other snapshot neighbor otherwise (the
/// infector again if it is the only neighbor); a source that lied
/// designates a uniformly random snapshot neighbor.
pub fn ask<R: Rng + ?Sized>(
    snapshot: &DiffusionSnapshot,
    params: &TruthfulnessParams,
    respondent: NodeId,
    rounds: u32,
    rng: &mut R,
) -> Result<QueryTranscript> {
    if rounds == 0 {
        return Err(Error::InvalidParameter("rounds must be at least 1".into()));
    }
    let index = snapshot
        .index_of(respondent)
        .ok_or_else(|| Error::Logic(format!("respondent {respondent} is not infected")))?;
    let is_source = index == 0;
    let neighbors: Vec<NodeId> = snapshot
        .neighbors(index)
        .iter()
        .map(|&j| snapshot.node(j))
        .collect();
    let parent = snapshot.parent_index(index).map(|p| snapshot.node(p));

    let mut yes_count = 0u32;
    let mut designations: BTreeMap<NodeId, u32> = BTreeMap::new();
    for _ in 0..rounds {
        let truthful = rng.gen_bool(params.p);
        let says_yes = if is_source { truthful } else { !truthful };
        if says_yes {
            yes_count += 1;
            continue;
        }
        let designated = match parent {
            Some(parent) => {
                if rng.gen_bool(params.q) || neighbors.len() == 1 {
                    parent
                } else {
                    // Uniform over the neighbors other than the infector.
                    let k = rng.gen_range(0..neighbors.len() - 1);
                    let candidate = neighbors[k];
                    if candidate == parent {
                        neighbors[neighbors.len() - 1]
                    } else {
                        candidate
                    }
                }
            }
            // A lying source has no infector to point away from.
            None => {
                if neighbors.is_empty() {
                    continue;
                }
                neighbors[rng.gen_range(0..neighbors.len())]
            }
        };
        *designations.entry(designated).or_insert(0) += 1;
    }
    Ok(QueryTranscript {
        respondent,
        rounds,
        yes_count,
        designations,
    })
}

/// Majority vote on the identity answers: at least half "yes".
pub fn majority_identity(transcript: &QueryTranscript) -> bool {
    2 * transcript.yes_count >= transcript.rounds
}

/// Neighbor with the most designations, ties broken uniformly at random.
/// `None` when every round was answered "yes".
pub fn majority_designation<R: Rng + ?Sized>(
    transcript: &QueryTranscript,
    rng: &mut R,
) -> Option<NodeId> {
    let max = *transcript.designations.values().max()?;
    let tied: Vec<NodeId> = transcript
        .designations
        .iter()
        .filter(|(_, &c)| c == max)
        .map(|(&v, _)| v)
        .collect();
    Some(tied[rng.gen_range(0..tied.len())])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::DiffusionSnapshot;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn id(v: u32) -> NodeId {
        NodeId(v)
    }

    /// Star snapshot: source 0 infected leaves 1..=3 directly.
    fn star() -> DiffusionSnapshot {
        DiffusionSnapshot::from_parts(
            vec![id(0), id(1), id(2), id(3)],
            vec![None, Some(id(0)), Some(id(0)), Some(id(0))],
            &[],
        )
        .unwrap()
    }

    /// Path snapshot 0 - 1 - 2, so node 1 has two neighbors.
    fn path() -> DiffusionSnapshot {
        DiffusionSnapshot::from_parts(
            vec![id(0), id(1), id(2)],
            vec![None, Some(id(0)), Some(id(1))],
            &[],
        )
        .unwrap()
    }

    #[test]
    fn truthful_source_answers_yes_every_round() {
        let snap = star();
        let params = TruthfulnessParams::new(1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let t = ask(&snap, &params, id(0), 5, &mut rng).unwrap();
        assert_eq!(t.yes_count, 5);
        assert!(t.designations.is_empty());
        assert!(majority_identity(&t));
        assert_eq!(majority_designation(&t, &mut rng), None);
    }

    #[test]
    fn truthful_non_source_designates_its_infector() {
        let snap = path();
        let params = TruthfulnessParams::new(1.0, 1.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let t = ask(&snap, &params, id(1), 5, &mut rng).unwrap();
        assert_eq!(t.yes_count, 0);
        assert_eq!(t.designations.get(&id(0)), Some(&5));
        assert_eq!(t.designation_total(), 5);
        assert!(!majority_identity(&t));
        assert_eq!(majority_designation(&t, &mut rng), Some(id(0)));
    }

    #[test]
    fn yes_counts_follow_the_identity_law() {
        // Non-source with p = 0.8 answers "yes" w.p. 0.2 per round.
        let snap = path();
        let params = TruthfulnessParams::new(0.8, 0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let trials = 10_000;
        let mut total = 0u64;
        for _ in 0..trials {
            let t = ask(&snap, &params, id(1), 5, &mut rng).unwrap();
            assert_eq!(t.yes_count + t.designation_total(), 5);
            total += t.yes_count as u64;
        }
        let mean = total as f64 / trials as f64;
        // Binomial(5, 0.2): mean 1.0, per-trial sd ~0.894.
        let tolerance = 4.0 * 0.894 / (trials as f64).sqrt();
        assert!((mean - 1.0).abs() < tolerance, "mean {mean}");
    }

    #[test]
    fn designations_stay_within_snapshot_neighbors() {
        let snap = path();
        let params = TruthfulnessParams::new(0.3, 0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for respondent in [id(0), id(1), id(2)] {
            let index = snap.index_of(respondent).unwrap();
            let t = ask(&snap, &params, respondent, 9, &mut rng).unwrap();
            assert_eq!(t.yes_count + t.designation_total(), 9);
            for v in t.designations.keys() {
                let j = snap.index_of(*v).unwrap();
                assert!(snap.neighbors(index).contains(&j));
            }
        }
    }

    #[test]
    fn majority_identity_uses_at_least_half() {
        let t = |yes, rounds| QueryTranscript {
            respondent: id(0),
            rounds,
            yes_count: yes,
            designations: BTreeMap::new(),
        };
        assert!(majority_identity(&t(3, 5)));
        assert!(majority_identity(&t(2, 4)));
        assert!(!majority_identity(&t(0, 1)));
    }

    #[test]
    fn designation_ties_break_uniformly() {
        let mut designations = BTreeMap::new();
        designations.insert(id(10), 2);
        designations.insert(id(20), 2);
        designations.insert(id(30), 1);
        let t = QueryTranscript {
            respondent: id(0),
            rounds: 5,
            yes_count: 0,
            designations,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let trials = 10_000;
        let mut picked_first = 0usize;
        for _ in 0..trials {
            match majority_designation(&t, &mut rng) {
                Some(v) if v == id(10) => picked_first += 1,
                Some(v) => assert_eq!(v, id(20)),
                None => panic!("designations present"),
            }
        }
        let freq = picked_first as f64 / trials as f64;
        assert!((freq - 0.5).abs() < 0.02, "tie frequency {freq}");
    }

    #[test]
    fn strict_maximum_wins_without_randomness() {
        let mut designations = BTreeMap::new();
        designations.insert(id(1), 3);
        designations.insert(id(2), 1);
        let t = QueryTranscript {
            respondent: id(0),
            rounds: 4,
            yes_count: 0,
            designations,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..50 {
            assert_eq!(majority_designation(&t, &mut rng), Some(id(1)));
        }
    }

    #[test]
    fn parent_recovery_improves_with_repetition() {
        // Middle node of a path with q slightly above uniform: the
        // majority designation should recover the infector more often
        // as rounds grow.
        let snap = path();
        let params = TruthfulnessParams::new(0.9, 0.75).unwrap();
        let trials = 10_000;
        let mut rates = Vec::new();
        for rounds in [1u32, 3, 5, 9, 15] {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + rounds as u64);
            let mut hits = 0usize;
            for _ in 0..trials {
                let t = ask(&snap, &params, id(1), rounds, &mut rng).unwrap();
                if majority_designation(&t, &mut rng) == Some(id(0)) {
                    hits += 1;
                }
            }
            rates.push(hits as f64 / trials as f64);
        }
        let two_sigma = 2.0 * (0.25f64 / trials as f64).sqrt() * 2.0;
        for w in rates.windows(2) {
            assert!(w[1] >= w[0] - two_sigma, "rates {rates:?}");
        }
    }

    #[test]
    fn estimator_domain_needs_majority_informative_answers() {
        let p = TruthfulnessParams::new(0.7, 0.4).unwrap();
        assert!(p.within_estimator_domain(3));
        assert!(!p.within_estimator_domain(2)); // q = 0.4 <= 1/2
        assert!(!TruthfulnessParams::new(0.5, 0.9)
            .unwrap()
            .within_estimator_domain(3));
    }

    #[test]
    fn oracle_rejects_bad_inputs() {
        let snap = path();
        let params = TruthfulnessParams::new(0.9, 0.9).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        assert!(matches!(
            ask(&snap, &params, id(9), 3, &mut rng),
            Err(Error::Logic(_))
        ));
        assert!(ask(&snap, &params, id(0), 0, &mut rng).is_err());
        assert!(TruthfulnessParams::new(1.2, 0.5).is_err());
        assert!(TruthfulnessParams::new(0.5, -0.1).is_err());
    }
}
