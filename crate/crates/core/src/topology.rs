//! Graph topologies the diffusion runs on: finite undirected graphs
//! (generated or loaded from edge lists) and the lazily materialized
//! infinite regular tree.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::ToString;
use alloc::vec;
use alloc::vec::Vec;

// Resolves f64 math in builds where no dependency links std.
#[allow(unused_imports)]
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Identifier of a node within one topology. Dense `0..n` for finite
/// graphs; assigned in materialization order for the regular tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl NodeId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl core::fmt::Display for NodeId {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Read access to node neighborhoods during diffusion. Takes `&mut self`
/// because some topologies materialize structure on first access.
pub trait Topology {
    fn contains(&self, v: NodeId) -> bool;
    fn neighbors(&mut self, v: NodeId) -> Result<&[NodeId]>;
}

/// Immutable undirected graph with sorted adjacency lists, no self-loops
/// and no duplicate edges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGraph {
    adjacency: Vec<Vec<NodeId>>,
    edge_count: usize,
}

impl FiniteGraph {
    /// Builds a graph from raw edge pairs. Self-loops are dropped;
    /// duplicate and reversed pairs collapse to one undirected edge.
    pub fn from_edges<I>(node_count: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut normalized: Vec<(u32, u32)> = Vec::new();
        for (u, v) in edges {
            if u as usize >= node_count || v as usize >= node_count {
                return Err(Error::InvalidParameter(format!(
                    "edge ({u}, {v}) references a node >= {node_count}"
                )));
            }
            if u == v {
                continue;
            }
            normalized.push((u.min(v), u.max(v)));
        }
        normalized.sort_unstable();
        normalized.dedup();

        let mut adjacency = vec![Vec::new(); node_count];
        for &(u, v) in &normalized {
            adjacency[u as usize].push(NodeId(v));
            adjacency[v as usize].push(NodeId(u));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Ok(FiniteGraph {
            adjacency,
            edge_count: normalized.len(),
        })
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn contains(&self, v: NodeId) -> bool {
        v.index() < self.adjacency.len()
    }

    pub fn neighbors(&self, v: NodeId) -> &[NodeId] {
        &self.adjacency[v.index()]
    }

    pub fn degree(&self, v: NodeId) -> usize {
        self.adjacency[v.index()].len()
    }

    pub fn average_degree(&self) -> f64 {
        if self.adjacency.is_empty() {
            return 0.0;
        }
        2.0 * self.edge_count as f64 / self.adjacency.len() as f64
    }

    /// Size of the connected component containing each node.
    pub fn component_sizes(&self) -> Vec<usize> {
        let n = self.adjacency.len();
        let mut component = vec![usize::MAX; n];
        let mut sizes = Vec::new();
        let mut queue = Vec::new();
        for start in 0..n {
            if component[start] != usize::MAX {
                continue;
            }
            let id = sizes.len();
            let mut size = 0usize;
            component[start] = id;
            queue.push(start);
            while let Some(u) = queue.pop() {
                size += 1;
                for w in &self.adjacency[u] {
                    if component[w.index()] == usize::MAX {
                        component[w.index()] = id;
                        queue.push(w.index());
                    }
                }
            }
            sizes.push(size);
        }
        component.into_iter().map(|c| sizes[c]).collect()
    }

    /// Immutable adapter implementing [`Topology`], so one graph can be
    /// shared across concurrent trials.
    pub fn view(&self) -> FiniteGraphView<'_> {
        FiniteGraphView { graph: self }
    }
}

/// Borrowing [`Topology`] adapter for [`FiniteGraph`].
#[derive(Debug, Clone, Copy)]
pub struct FiniteGraphView<'a> {
    graph: &'a FiniteGraph,
}

impl Topology for FiniteGraphView<'_> {
    fn contains(&self, v: NodeId) -> bool {
        self.graph.contains(v)
    }

    fn neighbors(&mut self, v: NodeId) -> Result<&[NodeId]> {
        if !self.graph.contains(v) {
            return Err(Error::Logic(format!("node {v} is not in the graph")));
        }
        Ok(self.graph.neighbors(v))
    }
}

/// Samples a G(n, p) graph with p chosen so the expected degree equals
/// `avg_degree`. Deterministic for a fixed seed.
pub fn gen_erdos_renyi(n: usize, avg_degree: f64, seed: u64) -> Result<FiniteGraph> {
    if n < 2 {
        return Err(Error::InvalidParameter("n must be at least 2".to_string()));
    }
    if !avg_degree.is_finite() || avg_degree < 0.0 || avg_degree > (n - 1) as f64 {
        return Err(Error::InvalidParameter(format!(
            "avg_degree must lie in [0, {}], got {avg_degree}",
            n - 1
        )));
    }
    let p = avg_degree / (n - 1) as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.gen_bool(p) {
                edges.push((u as u32, v as u32));
            }
        }
    }
    FiniteGraph::from_edges(n, edges)
}

/// Grows a preferential-attachment graph from a single node. Fractional
/// `edges_per_node` is realized by varying the per-node attachment count
/// (1.5 alternates one and two edges), so |E|/|V| tracks the target.
pub fn gen_preferential_attachment(
    n: usize,
    edges_per_node: f64,
    seed: u64,
) -> Result<FiniteGraph> {
    if n < 3 {
        return Err(Error::InvalidParameter("n must be at least 3".to_string()));
    }
    if !edges_per_node.is_finite() || edges_per_node < 1.0 || edges_per_node > n as f64 / 2.0 {
        return Err(Error::InvalidParameter(format!(
            "edges_per_node must lie in [1, {}], got {edges_per_node}",
            n as f64 / 2.0
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // One slot per edge endpoint; sampling a slot uniformly realizes
    // degree-proportional attachment.
    let mut endpoints: Vec<u32> = Vec::new();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    let mut chosen: Vec<u32> = Vec::new();
    for t in 1..n {
        let quota = ((t as f64 * edges_per_node).floor()
            - ((t - 1) as f64 * edges_per_node).floor()) as usize;
        let quota = quota.min(t);
        chosen.clear();
        while chosen.len() < quota {
            let target = if endpoints.is_empty() {
                rng.gen_range(0..t) as u32
            } else {
                endpoints[rng.gen_range(0..endpoints.len())]
            };
            if !chosen.contains(&target) {
                chosen.push(target);
            }
        }
        for &c in &chosen {
            edges.push((t as u32, c));
            endpoints.push(t as u32);
            endpoints.push(c);
        }
    }
    FiniteGraph::from_edges(n, edges)
}

/// Parses whitespace-separated "u v" pairs, one per line. Blank lines and
/// `#` comments are skipped. Node labels are relabeled densely in order
/// of first appearance; duplicate, reversed and self-loop edges collapse.
pub fn parse_edge_list(text: &str) -> Result<FiniteGraph> {
    let mut ids: BTreeMap<u64, u32> = BTreeMap::new();
    let mut edges: Vec<(u32, u32)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let mut next_id = |tok: Option<&str>| -> Result<u32> {
            let tok = tok.ok_or_else(|| Error::Parse {
                line: line_no,
                message: "expected two node ids".to_string(),
            })?;
            let raw: u64 = tok.parse().map_err(|_| Error::Parse {
                line: line_no,
                message: format!("non-integer token '{tok}'"),
            })?;
            let count = ids.len() as u32;
            Ok(*ids.entry(raw).or_insert(count))
        };
        let u = next_id(tokens.next())?;
        let v = next_id(tokens.next())?;
        if tokens.next().is_some() {
            return Err(Error::Parse {
                line: line_no,
                message: "expected two node ids".to_string(),
            });
        }
        edges.push((u, v));
    }
    if edges.is_empty() {
        return Err(Error::Parse {
            line: 0,
            message: "no edges".to_string(),
        });
    }
    FiniteGraph::from_edges(ids.len(), edges)
}

/// Infinite d-regular tree, materialized outward from the root as nodes
/// are visited. Every node has exactly `degree` neighbors once expanded.
#[derive(Debug, Clone)]
pub struct RegularTreeTopology {
    degree: usize,
    parent: Vec<Option<NodeId>>,
    neighbors: Vec<Option<Vec<NodeId>>>,
}

impl RegularTreeTopology {
    pub const ROOT: NodeId = NodeId(0);

    pub fn new(degree: usize) -> Result<Self> {
        if degree < 3 {
            return Err(Error::InvalidParameter(
                "tree degree must be at least 3".to_string(),
            ));
        }
        Ok(RegularTreeTopology {
            degree,
            parent: vec![None],
            neighbors: vec![None],
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Number of nodes materialized so far.
    pub fn node_count(&self) -> usize {
        self.parent.len()
    }

    pub fn parent(&self, v: NodeId) -> Option<NodeId> {
        self.parent.get(v.index()).copied().flatten()
    }

    /// Returns the `degree` neighbors of `v`, creating child nodes on
    /// first access. Idempotent: repeated calls return the same ids.
    pub fn expand_neighbors(&mut self, v: NodeId) -> Result<&[NodeId]> {
        let i = v.index();
        if i >= self.parent.len() {
            return Err(Error::Logic(format!("node {v} is not materialized")));
        }
        if self.neighbors[i].is_none() {
            let mut list: Vec<NodeId> = self.parent[i].into_iter().collect();
            while list.len() < self.degree {
                let child = NodeId(self.parent.len() as u32);
                self.parent.push(Some(v));
                self.neighbors.push(None);
                list.push(child);
            }
            self.neighbors[i] = Some(list);
        }
        Ok(self.neighbors[i].as_ref().unwrap())
    }
}

impl Topology for RegularTreeTopology {
    fn contains(&self, v: NodeId) -> bool {
        v.index() < self.parent.len()
    }

    fn neighbors(&mut self, v: NodeId) -> Result<&[NodeId]> {
        self.expand_neighbors(v)
    }
}
