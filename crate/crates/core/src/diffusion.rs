//! Susceptible-infected spreading and the snapshot structure consumed by
//! scoring and estimation.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use core::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::topology::{NodeId, Topology};

/// Observed infection state: who is infected, in which order, who
/// infected whom, and the adjacency induced among infected nodes.
///
/// Internally nodes are addressed by their infection index (`0` is the
/// source); adjacency lists hold infection indices sorted by the global
/// [`NodeId`] they refer to.
#[derive(Debug, Clone)]
pub struct DiffusionSnapshot {
    infected: Vec<NodeId>,
    index_of: BTreeMap<NodeId, usize>,
    parent: Vec<Option<usize>>,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
}

impl DiffusionSnapshot {
    /// Rebuilds a snapshot from explicit ground truth: the infection
    /// order, each node's infector, and the induced edges. Parent links
    /// are merged into the edge set automatically.
    pub fn from_parts(
        infected: Vec<NodeId>,
        parents: Vec<Option<NodeId>>,
        edges: &[(NodeId, NodeId)],
    ) -> Result<Self> {
        if infected.is_empty() {
            return Err(Error::InvalidParameter("no infected nodes".into()));
        }
        if parents.len() != infected.len() {
            return Err(Error::InvalidParameter(
                "parents must align with the infection order".into(),
            ));
        }
        let mut index_of = BTreeMap::new();
        for (i, &v) in infected.iter().enumerate() {
            if index_of.insert(v, i).is_some() {
                return Err(Error::InvalidParameter(format!("node {v} listed twice")));
            }
        }
        let mut parent = Vec::with_capacity(infected.len());
        let mut edge_set: BTreeMap<(usize, usize), ()> = BTreeMap::new();
        for (i, p) in parents.iter().enumerate() {
            match (i, p) {
                (0, None) => parent.push(None),
                (0, Some(_)) => {
                    return Err(Error::InvalidParameter("the source has no parent".into()))
                }
                (_, None) => {
                    return Err(Error::InvalidParameter(format!(
                        "non-source node {} lacks a parent",
                        infected[i]
                    )))
                }
                (_, Some(pv)) => {
                    let j = *index_of.get(pv).ok_or_else(|| {
                        Error::InvalidParameter(format!("parent {pv} is not infected"))
                    })?;
                    if j >= i {
                        return Err(Error::InvalidParameter(format!(
                            "parent {pv} infected no earlier than its child"
                        )));
                    }
                    parent.push(Some(j));
                    edge_set.insert((j.min(i), j.max(i)), ());
                }
            }
        }
        for &(u, v) in edges {
            let i = *index_of.get(&u).ok_or_else(|| {
                Error::InvalidParameter(format!("edge endpoint {u} not infected"))
            })?;
            let j = *index_of.get(&v).ok_or_else(|| {
                Error::InvalidParameter(format!("edge endpoint {v} not infected"))
            })?;
            if i == j {
                continue;
            }
            edge_set.insert((i.min(j), i.max(j)), ());
        }
        let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); infected.len()];
        for &(i, j) in edge_set.keys() {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        for (i, list) in adjacency.iter_mut().enumerate() {
            list.sort_by_key(|&j| infected[j]);
            debug_assert!(!list.contains(&i));
        }
        Ok(DiffusionSnapshot {
            infected,
            index_of,
            parent,
            adjacency,
            edge_count: edge_set.len(),
        })
    }

    pub fn size(&self) -> usize {
        self.infected.len()
    }

    pub fn source(&self) -> NodeId {
        self.infected[0]
    }

    /// Infected nodes in infection order.
    pub fn infected(&self) -> &[NodeId] {
        &self.infected
    }

    pub fn contains(&self, v: NodeId) -> bool {
        self.index_of.contains_key(&v)
    }

    /// Infection index of `v`, if infected.
    pub fn index_of(&self, v: NodeId) -> Option<usize> {
        self.index_of.get(&v).copied()
    }

    pub fn node(&self, index: usize) -> NodeId {
        self.infected[index]
    }

    /// Infection index of the true infector; `None` for the source.
    pub fn parent_index(&self, index: usize) -> Option<usize> {
        self.parent[index]
    }

    /// True infector of `v`; `None` for the source or uninfected nodes.
    pub fn parent_of(&self, v: NodeId) -> Option<NodeId> {
        let idx = self.index_of(v)?;
        self.parent[idx].map(|p| self.infected[p])
    }

    /// Induced neighbors of the node at `index`, as infection indices
    /// sorted by the global id they refer to.
    pub fn neighbors(&self, index: usize) -> &[usize] {
        &self.adjacency[index]
    }

    pub fn degree(&self, index: usize) -> usize {
        self.adjacency[index].len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// A connected snapshot is a tree exactly when it has n - 1 edges.
    pub fn is_tree(&self) -> bool {
        self.edge_count + 1 == self.infected.len()
    }

    /// Shortest-path length between two infected nodes within the
    /// induced adjacency.
    pub fn hop_distance(&self, u: NodeId, v: NodeId) -> Result<usize> {
        let start = self
            .index_of(u)
            .ok_or_else(|| Error::Logic(format!("node {u} is not infected")))?;
        let goal = self
            .index_of(v)
            .ok_or_else(|| Error::Logic(format!("node {v} is not infected")))?;
        Ok(self.hop_distances_from(start)[goal])
    }

    /// BFS distances (in hops) from the node at `start` to every
    /// infected node.
    pub fn hop_distances_from(&self, start: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.infected.len()];
        let mut queue = alloc::collections::VecDeque::new();
        dist[start] = 0;
        queue.push_back(start);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adjacency[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// Debug export: one "node parent order_index" line per infected
    /// node, `-` standing in for the source's parent.
    pub fn export(&self) -> String {
        let mut out = String::new();
        for (i, v) in self.infected.iter().enumerate() {
            match self.parent[i] {
                Some(p) => writeln!(out, "{v} {} {i}", self.infected[p]),
                None => writeln!(out, "{v} - {i}"),
            }
            .expect("string write cannot fail");
        }
        out
    }
}

/// Spreads an infection from `source` until `n_infected` nodes are
/// infected and records the ground truth.
///
/// Each step picks one boundary edge (infected endpoint, susceptible
/// endpoint) uniformly at random, which is equal in law to racing
/// independent unit-rate exponential clocks on all boundary edges.
pub fn simulate_si<T: Topology>(
    topology: &mut T,
    source: NodeId,
    n_infected: usize,
    seed: u64,
) -> Result<DiffusionSnapshot> {
    if n_infected == 0 {
        return Err(Error::InvalidParameter(
            "n_infected must be at least 1".into(),
        ));
    }
    if !topology.contains(source) {
        return Err(Error::Logic(format!(
            "source {source} is not in the topology"
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut infected = vec![source];
    let mut index_of = BTreeMap::new();
    index_of.insert(source, 0usize);
    let mut parent: Vec<Option<usize>> = vec![None];

    // (infected endpoint's infection index, susceptible target). Entries
    // whose target has been infected since are discarded lazily on draw,
    // which keeps the draw uniform over the still-valid boundary.
    let mut boundary: Vec<(usize, NodeId)> = Vec::new();
    for &w in topology.neighbors(source)? {
        boundary.push((0, w));
    }

    while infected.len() < n_infected {
        if boundary.is_empty() {
            return Err(Error::ComponentTooSmall {
                reachable: infected.len(),
                requested: n_infected,
            });
        }
        let pick = rng.gen_range(0..boundary.len());
        let (from, target) = boundary[pick];
        boundary.swap_remove(pick);
        if index_of.contains_key(&target) {
            continue;
        }
        let idx = infected.len();
        infected.push(target);
        index_of.insert(target, idx);
        parent.push(Some(from));
        for &w in topology.neighbors(target)? {
            if !index_of.contains_key(&w) {
                boundary.push((idx, w));
            }
        }
    }

    // Induced adjacency among infected nodes, sorted by global id (the
    // infected ids themselves are already the sort key of index_of).
    let mut adjacency: Vec<Vec<usize>> = vec![Vec::new(); infected.len()];
    let mut edge_count = 0usize;
    for (&v, &i) in &index_of {
        for &w in topology.neighbors(v)? {
            if let Some(&j) = index_of.get(&w) {
                adjacency[i].push(j);
                if i < j {
                    edge_count += 1;
                }
            }
        }
    }

    Ok(DiffusionSnapshot {
        infected,
        index_of,
        parent,
        adjacency,
        edge_count,
    })
}
