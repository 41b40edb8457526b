//! Likelihood scoring of candidate diffusion origins: exact ordering
//! counts on tree snapshots, a BFS-tree approximation on cyclic ones.

use alloc::collections::VecDeque;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

// Resolves f64 math in builds where no dependency links std.
#[allow(unused_imports)]
use num_traits::Float;

use crate::diffusion::DiffusionSnapshot;
use crate::error::{Error, Result};
use crate::topology::NodeId;

/// Per-node log-likelihood scores plus the argmax, with ties resolved
/// toward the lowest node id.
#[derive(Debug, Clone)]
pub struct CentralityScores {
    log_scores: Vec<f64>,
    center_index: usize,
    center: NodeId,
}

impl CentralityScores {
    /// Natural-log scores indexed by infection order.
    pub fn log_scores(&self) -> &[f64] {
        &self.log_scores
    }

    pub fn log_score(&self, index: usize) -> f64 {
        self.log_scores[index]
    }

    pub fn center(&self) -> NodeId {
        self.center
    }

    pub fn center_index(&self) -> usize {
        self.center_index
    }
}

fn scores_from(snapshot: &DiffusionSnapshot, log_scores: Vec<f64>) -> CentralityScores {
    let center_index =
        argmax_index(snapshot, &log_scores, 0..log_scores.len()).expect("snapshot is nonempty");
    CentralityScores {
        center: snapshot.node(center_index),
        center_index,
        log_scores,
    }
}

/// Argmax over `candidates` (infection indices), breaking exact score
/// ties toward the lowest node id. Returns `None` on an empty iterator.
pub(crate) fn argmax_index(
    snapshot: &DiffusionSnapshot,
    log_scores: &[f64],
    candidates: impl IntoIterator<Item = usize>,
) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in candidates {
        let better = match best {
            None => true,
            Some(b) => {
                log_scores[i] > log_scores[b]
                    || (log_scores[i] == log_scores[b] && snapshot.node(i) < snapshot.node(b))
            }
        };
        if better {
            best = Some(i);
        }
    }
    best
}

fn log_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// BFS over the snapshot from `start`: returns (visit order, tree parent
/// by infection index). Neighbor lists are sorted by global id, so ties
/// resolve toward ascending node ids.
fn bfs_tree(snapshot: &DiffusionSnapshot, start: usize) -> (Vec<usize>, Vec<Option<usize>>) {
    let n = snapshot.size();
    let mut order = Vec::with_capacity(n);
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    let mut queue = VecDeque::new();
    seen[start] = true;
    queue.push_back(start);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for &w in snapshot.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(u);
                queue.push_back(w);
            }
        }
    }
    (order, parent)
}

/// Subtree sizes of the spanning structure rooted at `root`, computed by
/// accumulating over the reversed BFS order. Only valid on trees.
fn subtree_sizes_at(snapshot: &DiffusionSnapshot, root: usize) -> Result<Vec<usize>> {
    let (order, parent) = bfs_tree(snapshot, root);
    if order.len() != snapshot.size() {
        return Err(Error::Logic("snapshot is disconnected".into()));
    }
    let mut sizes = vec![1usize; snapshot.size()];
    for &u in order.iter().rev() {
        if let Some(p) = parent[u] {
            sizes[p] += sizes[u];
        }
    }
    Ok(sizes)
}

/// Number of infected nodes in the subtree hanging from each node when
/// the snapshot tree is rooted at `root`.
pub fn subtree_sizes(snapshot: &DiffusionSnapshot, root: NodeId) -> Result<Vec<usize>> {
    if !snapshot.is_tree() {
        return Err(Error::Logic("snapshot adjacency is not a tree".into()));
    }
    let root_index = snapshot
        .index_of(root)
        .ok_or_else(|| Error::Logic(format!("root {root} is not infected")))?;
    subtree_sizes_at(snapshot, root_index)
}

/// Exact log ordering-count score on a tree snapshot: for every node v,
/// log n! minus the summed logs of the subtree sizes when rooted at v.
///
/// Computed in O(n) by scoring one root and re-rooting across each edge:
/// moving the root from u to its neighbor v multiplies the score by
/// size(v) / (n - size(v)).
pub fn rumor_centrality_tree(snapshot: &DiffusionSnapshot) -> Result<CentralityScores> {
    if !snapshot.is_tree() {
        return Err(Error::Logic(
            "snapshot adjacency is cyclic; use bfs_heuristic_scores".into(),
        ));
    }
    let n = snapshot.size();
    let mut log_scores = vec![0.0f64; n];
    if n > 1 {
        let (order, parent) = bfs_tree(snapshot, 0);
        let sizes = subtree_sizes_at(snapshot, 0)?;
        let root_score = log_factorial(n) - sizes.iter().map(|&s| (s as f64).ln()).sum::<f64>();
        log_scores[0] = root_score;
        for &u in &order {
            if let Some(p) = parent[u] {
                log_scores[u] =
                    log_scores[p] + (sizes[u] as f64).ln() - ((n - sizes[u]) as f64).ln();
            }
        }
    }
    Ok(scores_from(snapshot, log_scores))
}

/// Approximate log-likelihood for general snapshots: assume the spread
/// followed the BFS tree rooted at each candidate and score that single
/// ordering.
///
/// For candidate v with BFS order σ, the score is
/// log P(σ | v) + log R(v, T_bfs(v)), where P(σ | v) multiplies, per
/// step, the number of edges from the next node into the infected prefix
/// over the prefix's total boundary edge count (both counted in the full
/// snapshot adjacency).
pub fn bfs_heuristic_scores(snapshot: &DiffusionSnapshot) -> Result<CentralityScores> {
    let n = snapshot.size();
    let mut log_scores = vec![0.0f64; n];
    let log_fact = log_factorial(n);
    let mut position = vec![0usize; n];
    for (v, log_score) in log_scores.iter_mut().enumerate() {
        let (order, parent) = bfs_tree(snapshot, v);
        if order.len() != n {
            return Err(Error::Logic("snapshot is disconnected".into()));
        }

        let mut tree_sizes = vec![1usize; n];
        for &u in order.iter().rev() {
            if let Some(p) = parent[u] {
                tree_sizes[p] += tree_sizes[u];
            }
        }
        let log_tree_score = log_fact - tree_sizes.iter().map(|&s| (s as f64).ln()).sum::<f64>();

        for (pos, &u) in order.iter().enumerate() {
            position[u] = pos;
        }
        let mut log_order_prob = 0.0f64;
        let mut boundary = snapshot.degree(v) as f64;
        for (k, &u) in order.iter().enumerate().skip(1) {
            let into_prefix = snapshot
                .neighbors(u)
                .iter()
                .filter(|&&w| position[w] < k)
                .count();
            log_order_prob += (into_prefix as f64).ln() - boundary.ln();
            boundary += snapshot.degree(u) as f64 - 2.0 * into_prefix as f64;
        }
        *log_score = log_order_prob + log_tree_score;
    }
    Ok(scores_from(snapshot, log_scores))
}

/// Scores a snapshot with the exact tree method when the induced
/// adjacency is a tree and with the BFS approximation otherwise.
pub fn likelihood_scores(snapshot: &DiffusionSnapshot) -> Result<CentralityScores> {
    if snapshot.is_tree() {
        rumor_centrality_tree(snapshot)
    } else {
        bfs_heuristic_scores(snapshot)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diffusion::simulate_si;
    use crate::topology::{FiniteGraph, NodeId};

    fn id(v: u32) -> NodeId {
        NodeId(v)
    }

    /// Whole-graph snapshot with a fixed infection order along `parents`.
    fn snapshot_from(
        order: &[u32],
        parents: &[Option<u32>],
        edges: &[(u32, u32)],
    ) -> DiffusionSnapshot {
        DiffusionSnapshot::from_parts(
            order.iter().map(|&v| id(v)).collect(),
            parents.iter().map(|p| p.map(id)).collect(),
            &edges
                .iter()
                .map(|&(a, b)| (id(a), id(b)))
                .collect::<Vec<_>>(),
        )
        .unwrap()
    }

    fn path3() -> DiffusionSnapshot {
        snapshot_from(&[0, 1, 2], &[None, Some(0), Some(1)], &[(0, 1), (1, 2)])
    }

    /// Independent oracle: count infection orderings consistent with the
    /// snapshot tree when rooted at `root`, by frontier backtracking.
    fn count_orderings(snapshot: &DiffusionSnapshot, root: usize) -> u64 {
        fn recurse(
            snapshot: &DiffusionSnapshot,
            placed: &mut Vec<bool>,
            frontier: Vec<usize>,
            remaining: usize,
        ) -> u64 {
            if remaining == 0 {
                return 1;
            }
            let mut total = 0;
            for (i, &f) in frontier.iter().enumerate() {
                placed[f] = true;
                let mut next: Vec<usize> = frontier
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(_, &x)| x)
                    .collect();
                next.extend(
                    snapshot
                        .neighbors(f)
                        .iter()
                        .copied()
                        .filter(|&w| !placed[w]),
                );
                total += recurse(snapshot, placed, next, remaining - 1);
                placed[f] = false;
            }
            total
        }
        let mut placed = vec![false; snapshot.size()];
        placed[root] = true;
        let frontier: Vec<usize> = snapshot.neighbors(root).to_vec();
        recurse(snapshot, &mut placed, frontier, snapshot.size() - 1)
    }

    #[test]
    fn path_scores_match_ordering_counts() {
        let snap = path3();
        let scores = rumor_centrality_tree(&snap).unwrap();
        let r: Vec<f64> = scores.log_scores().iter().map(|s| s.exp()).collect();
        assert!((r[0] - 1.0).abs() < 1e-9);
        assert!((r[1] - 2.0).abs() < 1e-9);
        assert!((r[2] - 1.0).abs() < 1e-9);
        assert_eq!(scores.center(), id(1));
    }

    #[test]
    fn star_scores_match_ordering_counts() {
        let snap = snapshot_from(
            &[0, 1, 2, 3],
            &[None, Some(0), Some(0), Some(0)],
            &[(0, 1), (0, 2), (0, 3)],
        );
        let scores = rumor_centrality_tree(&snap).unwrap();
        let center = scores.log_score(0).exp();
        let leaf = scores.log_score(1).exp();
        assert!((center - 6.0).abs() < 1e-9);
        assert!((leaf - 2.0).abs() < 1e-9);
        for v in 0..4 {
            let brute = count_orderings(&snap, v) as f64;
            assert!((scores.log_score(v).exp() - brute).abs() < 1e-9);
        }
    }

    #[test]
    fn single_node_has_unit_score() {
        let snap = snapshot_from(&[7], &[None], &[]);
        let scores = rumor_centrality_tree(&snap).unwrap();
        assert_eq!(scores.log_score(0), 0.0);
        assert_eq!(scores.center(), id(7));
    }

    #[test]
    fn cyclic_snapshot_is_rejected_by_tree_scoring() {
        let snap = snapshot_from(
            &[0, 1, 2],
            &[None, Some(0), Some(1)],
            &[(0, 1), (1, 2), (2, 0)],
        );
        assert!(matches!(rumor_centrality_tree(&snap), Err(Error::Logic(_))));
        assert!(matches!(subtree_sizes(&snap, id(0)), Err(Error::Logic(_))));
    }

    #[test]
    fn subtree_sizes_on_a_chain() {
        let snap = path3();
        let sizes = subtree_sizes(&snap, id(0)).unwrap();
        assert_eq!(sizes, vec![3, 2, 1]);
        // Re-rooting identity across the (0, 1) edge.
        let from_b = subtree_sizes(&snap, id(1)).unwrap();
        assert_eq!(sizes[1] + from_b[0], 3);
    }

    #[test]
    fn rerooting_identity_on_random_trees() {
        for seed in 0..20u64 {
            let mut tree = crate::topology::RegularTreeTopology::new(3).unwrap();
            let snap = simulate_si(
                &mut tree,
                crate::topology::RegularTreeTopology::ROOT,
                50,
                seed,
            )
            .unwrap();
            for i in 1..snap.size() {
                let p = snap.parent_index(i).unwrap();
                let at_p = subtree_sizes(&snap, snap.node(p)).unwrap();
                let at_i = subtree_sizes(&snap, snap.node(i)).unwrap();
                assert_eq!(at_p[i] + at_i[p], snap.size());
            }
            // Leaves have size one, so summing sizes over the leaves of
            // any rooting counts the leaves.
            let sizes = subtree_sizes(&snap, snap.source()).unwrap();
            let leaves: Vec<usize> = (0..snap.size())
                .filter(|&v| v != 0 && snap.degree(v) == 1)
                .collect();
            let total: usize = leaves.iter().map(|&v| sizes[v]).sum();
            assert_eq!(total, leaves.len());
        }
    }

    #[test]
    #[allow(clippy::needless_range_loop)]
    fn neighbor_ratio_law_holds_in_log_domain() {
        let mut tree = crate::topology::RegularTreeTopology::new(3).unwrap();
        let snap = simulate_si(
            &mut tree,
            crate::topology::RegularTreeTopology::ROOT,
            200,
            3,
        )
        .unwrap();
        let scores = rumor_centrality_tree(&snap).unwrap();
        let sizes = subtree_sizes(&snap, snap.source()).unwrap();
        let n = snap.size() as f64;
        for v in 1..snap.size() {
            let u = snap.parent_index(v).unwrap();
            // log R(v) - log R(u) = log size(v) - log (n - size(v)),
            // sizes taken in the tree rooted at u's side.
            let lhs = scores.log_score(v) - scores.log_score(u);
            let rhs = (sizes[v] as f64).ln() - (n - sizes[v] as f64).ln();
            assert!((lhs - rhs).abs() < 1e-9, "edge ({u}, {v}): {lhs} vs {rhs}");
        }
    }

    #[test]
    fn log_domain_is_finite_at_n_400() {
        let mut tree = crate::topology::RegularTreeTopology::new(3).unwrap();
        let snap = simulate_si(
            &mut tree,
            crate::topology::RegularTreeTopology::ROOT,
            400,
            8,
        )
        .unwrap();
        let scores = rumor_centrality_tree(&snap).unwrap();
        for &s in scores.log_scores() {
            assert!(s.is_finite());
        }
    }

    #[test]
    fn center_tie_breaks_to_lowest_id_and_is_stable() {
        // Two-node snapshot: both orderings are equally likely.
        let snap = snapshot_from(&[5, 3], &[None, Some(5)], &[(5, 3)]);
        let a = rumor_centrality_tree(&snap).unwrap();
        let b = rumor_centrality_tree(&snap).unwrap();
        assert_eq!(a.center(), id(3));
        assert_eq!(a.center(), b.center());
    }

    #[test]
    fn bfs_scores_are_symmetric_on_a_triangle() {
        let snap = snapshot_from(
            &[0, 1, 2],
            &[None, Some(0), Some(1)],
            &[(0, 1), (1, 2), (2, 0)],
        );
        let scores = bfs_heuristic_scores(&snap).unwrap();
        assert!((scores.log_score(0) - scores.log_score(1)).abs() < 1e-12);
        assert!((scores.log_score(1) - scores.log_score(2)).abs() < 1e-12);
        assert_eq!(scores.center(), id(0));
    }

    /// All labeled trees on n nodes via Prüfer decoding.
    fn all_trees(n: usize) -> Vec<Vec<(u32, u32)>> {
        if n == 1 {
            return vec![vec![]];
        }
        if n == 2 {
            return vec![vec![(0, 1)]];
        }
        let mut out = Vec::new();
        let seq_len = n - 2;
        let total = n.pow(seq_len as u32);
        for code in 0..total {
            let mut seq = Vec::with_capacity(seq_len);
            let mut c = code;
            for _ in 0..seq_len {
                seq.push(c % n);
                c /= n;
            }
            let mut degree = vec![1usize; n];
            for &s in &seq {
                degree[s] += 1;
            }
            let mut edges = Vec::with_capacity(n - 1);
            for &s in &seq {
                let leaf = (0..n).find(|&v| degree[v] == 1).unwrap();
                edges.push((leaf as u32, s as u32));
                degree[leaf] -= 1;
                degree[s] -= 1;
            }
            let (u, v) = {
                let mut rem = (0..n).filter(|&v| degree[v] == 1);
                (rem.next().unwrap(), rem.next().unwrap())
            };
            edges.push((u as u32, v as u32));
            out.push(edges);
        }
        out
    }

    /// Argmax set with a tolerance: exact mathematical ties can split by
    /// float noise of order 1e-16.
    fn near_max_set(scores: &CentralityScores) -> alloc::collections::BTreeSet<usize> {
        let max = scores
            .log_scores()
            .iter()
            .cloned()
            .fold(f64::NEG_INFINITY, f64::max);
        (0..scores.log_scores().len())
            .filter(|&v| scores.log_score(v) >= max - 1e-9)
            .collect()
    }

    #[test]
    fn bfs_heuristic_agrees_with_exact_scoring_when_order_probability_is_flat() {
        // Whenever the representative-order probability is the same for
        // every root, the heuristic reduces to the exact tree score.
        let mut flat_cases = 0usize;
        for n in 2..=5usize {
            for edges in all_trees(n) {
                let graph = FiniteGraph::from_edges(n, edges.iter().copied()).unwrap();
                let mut view = graph.view();
                let snap = simulate_si(&mut view, id(0), n, 17).unwrap();
                let exact = rumor_centrality_tree(&snap).unwrap();
                let heur = bfs_heuristic_scores(&snap).unwrap();

                let order_probs: Vec<f64> = (0..n)
                    .map(|v| {
                        heur.log_score(v)
                            - (log_factorial(n)
                                - subtree_sizes_at(&snap, v)
                                    .unwrap()
                                    .iter()
                                    .map(|&s| (s as f64).ln())
                                    .sum::<f64>())
                    })
                    .collect();
                let flat = order_probs
                    .iter()
                    .all(|&p| (p - order_probs[0]).abs() < 1e-9);
                if flat {
                    flat_cases += 1;
                    assert!(
                        near_max_set(&heur).contains(&exact.center_index()),
                        "n = {n}, edges = {edges:?}: exact center outside heuristic argmax set"
                    );
                }
            }
        }
        assert!(flat_cases > 0, "the flat branch never fired");
    }

    #[test]
    fn bfs_heuristic_agrees_with_exact_scoring_on_short_canonical_paths() {
        // On 0-1-...-(n-1) paths with up to 4 nodes the two scorings
        // share an argmax. (Longer paths genuinely diverge: a path end
        // has a single forced order of probability one, which outweighs
        // the middle's ordering count from 5 nodes on.)
        for n in 2..=4usize {
            let edges: Vec<(u32, u32)> = (1..n).map(|v| (v as u32 - 1, v as u32)).collect();
            let graph = FiniteGraph::from_edges(n, edges).unwrap();
            let mut view = graph.view();
            let snap = simulate_si(&mut view, id(0), n, 23).unwrap();
            let exact = rumor_centrality_tree(&snap).unwrap();
            let heur = bfs_heuristic_scores(&snap).unwrap();
            assert!(
                near_max_set(&heur).contains(&exact.center_index()),
                "path on {n} nodes"
            );
        }
    }

    #[test]
    fn bfs_scores_tie_on_the_fully_infected_four_cycle() {
        // Like the triangle, the 4-cycle is vertex-transitive: every
        // root sees an isomorphic computation, so scores tie exactly and
        // the lowest id wins.
        let graph = FiniteGraph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let mut view = graph.view();
        let snap = simulate_si(&mut view, id(0), 4, 3).unwrap();
        let scores = bfs_heuristic_scores(&snap).unwrap();
        for v in 1..4 {
            assert_eq!(scores.log_score(0), scores.log_score(v));
        }
        assert_eq!(scores.center(), id(0));
    }

    #[test]
    fn bfs_scores_are_pure_functions_of_the_snapshot() {
        let graph = crate::topology::gen_erdos_renyi(120, 4.0, 40).unwrap();
        let sizes = graph.component_sizes();
        let source = (0..120).find(|&v| sizes[v] >= 40).unwrap() as u32;
        let mut view = graph.view();
        let snap = simulate_si(&mut view, id(source), 40, 6).unwrap();
        let a = bfs_heuristic_scores(&snap).unwrap();
        let b = bfs_heuristic_scores(&snap).unwrap();
        assert_eq!(a.log_scores(), b.log_scores());
        assert_eq!(a.center(), b.center());
        for &s in a.log_scores() {
            assert!(s.is_finite());
        }
    }

    #[test]
    fn brute_force_counts_match_on_random_small_trees() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(99);
        for _ in 0..60 {
            let n = rng.gen_range(2..=8usize);
            // Random labeled tree: attach each node to a uniform earlier one.
            let edges: Vec<(u32, u32)> = (1..n)
                .map(|v| (v as u32, rng.gen_range(0..v) as u32))
                .collect();
            let graph = FiniteGraph::from_edges(n, edges).unwrap();
            let mut view = graph.view();
            let snap = simulate_si(&mut view, id(0), n, rng.gen()).unwrap();
            let scores = rumor_centrality_tree(&snap).unwrap();
            for v in 0..n {
                let brute = count_orderings(&snap, v);
                let computed = scores.log_score(v).exp().round() as u64;
                assert_eq!(computed, brute, "n = {n}, root {v}");
            }
        }
    }
}
