//! Directed-graph container and DAG utilities.
//!
//! [`DirectedGraph`] is an immutable binary directed graph over dense
//! `0..node_count` node ids with a compressed out-adjacency index. Self-loops
//! and duplicate edges are rejected at construction: a self-loop would be an
//! unconditional zero-distance backward link under every ranking, and the
//! models and penalties in this crate are defined on simple binary graphs.
//!
//! Lenient ingestion of real-world edge lists (which do contain self-loops
//! and duplicates) lives in the companion CLI crate, which drops and counts
//! them before calling [`DirectedGraph::new`].

use alloc::vec;
use alloc::vec::Vec;

use crate::ranking::Ranking;

/// Errors produced when constructing or layering a [`DirectedGraph`].
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    /// An edge endpoint is not a valid node id.
    #[error("edge ({u}, {v}) has an endpoint >= node_count ({node_count})")]
    EndpointOutOfRange {
        /// Source node of the offending edge.
        u: u32,
        /// Target node of the offending edge.
        v: u32,
        /// Declared number of nodes.
        node_count: usize,
    },
    /// An edge connects a node to itself.
    #[error("self-loop at node {0} is not allowed")]
    SelfLoop(u32),
    /// The same ordered pair appears more than once.
    #[error("duplicate edge ({u}, {v})")]
    DuplicateEdge {
        /// Source node of the duplicated edge.
        u: u32,
        /// Target node of the duplicated edge.
        v: u32,
    },
    /// The number of nodes does not fit the index type.
    #[error("node_count {0} exceeds the supported maximum (u32)")]
    TooManyNodes(usize),
    /// A cycle was found where a DAG was required.
    #[error("graph contains a directed cycle: not a DAG")]
    NotADag,
}

/// An immutable binary directed graph.
///
/// Nodes are `0..node_count`; edges are ordered pairs `(u, v)` stored in
/// lexicographic order together with a compressed out-adjacency index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DirectedGraph {
    node_count: usize,
    /// Edges sorted by `(u, v)`.
    edges: Vec<(u32, u32)>,
    /// CSR offsets into `edges`: out-edges of `u` occupy
    /// `edges[out_offsets[u]..out_offsets[u + 1]]`.
    out_offsets: Vec<usize>,
    in_degrees: Vec<u32>,
}

impl DirectedGraph {
    /// Builds a graph from a node count and an edge collection.
    ///
    /// # Errors
    ///
    /// Rejects endpoints `>= node_count`, self-loops, and duplicate edges.
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = (u32, u32)>,
    ) -> Result<Self, GraphError> {
        if node_count > u32::MAX as usize {
            return Err(GraphError::TooManyNodes(node_count));
        }
        let mut edges: Vec<(u32, u32)> = edges.into_iter().collect();
        for &(u, v) in &edges {
            if (u as usize) >= node_count || (v as usize) >= node_count {
                return Err(GraphError::EndpointOutOfRange { u, v, node_count });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
        }
        edges.sort_unstable();
        for w in edges.windows(2) {
            if w[0] == w[1] {
                return Err(GraphError::DuplicateEdge { u: w[0].0, v: w[0].1 });
            }
        }
        let mut out_offsets = vec![0usize; node_count + 1];
        let mut in_degrees = vec![0u32; node_count];
        for &(u, v) in &edges {
            out_offsets[u as usize + 1] += 1;
            in_degrees[v as usize] += 1;
        }
        for i in 0..node_count {
            out_offsets[i + 1] += out_offsets[i];
        }
        Ok(Self { node_count, edges, out_offsets, in_degrees })
    }

    /// Number of nodes `N`.
    #[must_use]
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    /// Number of edges `m`.
    #[must_use]
    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// All edges, sorted by `(u, v)`.
    #[must_use]
    pub fn edges(&self) -> &[(u32, u32)] {
        &self.edges
    }

    /// Out-neighbors of `u`, ascending.
    pub fn out_neighbors(&self, u: u32) -> impl Iterator<Item = u32> + '_ {
        self.edges[self.out_offsets[u as usize]..self.out_offsets[u as usize + 1]]
            .iter()
            .map(|&(_, v)| v)
    }

    /// Out-degree of `u`.
    #[must_use]
    pub fn out_degree(&self, u: u32) -> u32 {
        (self.out_offsets[u as usize + 1] - self.out_offsets[u as usize]) as u32
    }

    /// In-degree of `v`.
    #[must_use]
    pub fn in_degree(&self, v: u32) -> u32 {
        self.in_degrees[v as usize]
    }

    /// In-adjacency lists (derived on demand; the graph itself only stores
    /// the out-index).
    #[must_use]
    pub fn in_neighbor_lists(&self) -> Vec<Vec<u32>> {
        let mut ins = vec![Vec::new(); self.node_count];
        for &(u, v) in &self.edges {
            ins[v as usize].push(u);
        }
        ins
    }

    /// The induced subgraph on `members` (ascending, unique node ids),
    /// with nodes relabeled to `0..members.len()` in the given order.
    ///
    /// # Panics
    ///
    /// Debug-asserts that `members` is sorted and unique.
    #[must_use]
    pub fn induced_subgraph(&self, members: &[u32]) -> DirectedGraph {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        let mut local = vec![u32::MAX; self.node_count];
        for (idx, &v) in members.iter().enumerate() {
            local[v as usize] = idx as u32;
        }
        let mut edges = Vec::new();
        for &v in members {
            for w in self.out_neighbors(v) {
                if local[w as usize] != u32::MAX {
                    edges.push((local[v as usize], local[w as usize]));
                }
            }
        }
        DirectedGraph::new(members.len(), edges).expect("subgraph of a valid graph is valid")
    }
}

/// Returns true iff the graph has no directed cycle.
#[must_use]
pub fn is_dag(g: &DirectedGraph) -> bool {
    kahn_topological_order(g).is_some()
}

/// Ranks a DAG by longest-path layering: `rank(v) = 1 +` length of the
/// longest directed path ending at `v`.
///
/// Every edge then satisfies `r(v) > r(u)`, so the ranking has zero agony
/// for every exponent `d`. Among all zero-agony rankings this one also uses
/// the fewest classes (the longest path forces at least that many), and it
/// is deterministic.
///
/// # Errors
///
/// [`GraphError::NotADag`] if the graph contains a cycle.
pub fn dag_ranking(g: &DirectedGraph) -> Result<Ranking, GraphError> {
    let order = kahn_topological_order(g).ok_or(GraphError::NotADag)?;
    let mut rank = vec![1u32; g.node_count()];
    for &u in &order {
        for v in g.out_neighbors(u) {
            rank[v as usize] = rank[v as usize].max(rank[u as usize] + 1);
        }
    }
    Ok(Ranking::new(rank).expect("ranks start at 1"))
}

/// Kahn's algorithm; returns a topological order, or `None` on a cycle.
/// Ties are broken by lowest node id for determinism.
fn kahn_topological_order(g: &DirectedGraph) -> Option<Vec<u32>> {
    let n = g.node_count();
    let mut indeg: Vec<u32> = (0..n).map(|v| g.in_degree(v as u32)).collect();
    // A binary heap would give lowest-id-first ordering, but plain FIFO over
    // an already id-ordered seed queue is deterministic too and O(V + E).
    let mut queue: Vec<u32> = (0..n as u32).filter(|&v| indeg[v as usize] == 0).collect();
    let mut order = Vec::with_capacity(n);
    let mut head = 0;
    while head < queue.len() {
        let u = queue[head];
        head += 1;
        order.push(u);
        for v in g.out_neighbors(u) {
            indeg[v as usize] -= 1;
            if indeg[v as usize] == 0 {
                queue.push(v);
            }
        }
    }
    (order.len() == n).then_some(order)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_validates() {
        assert!(DirectedGraph::new(3, [(0, 1), (1, 2)]).is_ok());
        assert_eq!(
            DirectedGraph::new(2, [(0, 3)]),
            Err(GraphError::EndpointOutOfRange { u: 0, v: 3, node_count: 2 })
        );
        assert_eq!(DirectedGraph::new(2, [(1, 1)]), Err(GraphError::SelfLoop(1)));
        assert_eq!(
            DirectedGraph::new(2, [(0, 1), (0, 1)]),
            Err(GraphError::DuplicateEdge { u: 0, v: 1 })
        );
    }

    #[test]
    fn adjacency_and_degrees() {
        let g = DirectedGraph::new(4, [(2, 0), (0, 1), (0, 3), (1, 3)]).unwrap();
        assert_eq!(g.edge_count(), 4);
        assert_eq!(g.out_neighbors(0).collect::<Vec<_>>(), vec![1, 3]);
        assert_eq!(g.out_degree(0), 2);
        assert_eq!(g.in_degree(3), 2);
        assert_eq!(g.in_degree(0), 1);
        assert_eq!(g.edges(), &[(0, 1), (0, 3), (1, 3), (2, 0)]);
    }

    #[test]
    fn dag_detection() {
        let path = DirectedGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert!(is_dag(&path));
        let triangle = DirectedGraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert!(!is_dag(&triangle));
        let empty = DirectedGraph::new(0, []).unwrap();
        assert!(is_dag(&empty));
    }

    #[test]
    fn longest_path_layering() {
        let path = DirectedGraph::new(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(dag_ranking(&path).unwrap().ranks(), &[1, 2, 3]);

        let isolated = DirectedGraph::new(2, []).unwrap();
        assert_eq!(dag_ranking(&isolated).unwrap().ranks(), &[1, 1]);

        // Diamond with a shortcut: 0 -> 1 -> 3, 0 -> 3; node 3 sits at the
        // longest-path layer 3, not the shortcut layer 2.
        let diamond = DirectedGraph::new(4, [(0, 1), (1, 3), (0, 3), (0, 2)]).unwrap();
        assert_eq!(dag_ranking(&diamond).unwrap().ranks(), &[1, 2, 2, 3]);

        let triangle = DirectedGraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
        assert_eq!(dag_ranking(&triangle), Err(GraphError::NotADag));
    }

    #[test]
    fn induced_subgraph_relabels() {
        let g = DirectedGraph::new(5, [(0, 2), (2, 4), (4, 0), (1, 3)]).unwrap();
        let sub = g.induced_subgraph(&[0, 2, 4]);
        assert_eq!(sub.node_count(), 3);
        assert_eq!(sub.edges(), &[(0, 1), (1, 2), (2, 0)]);
    }
}
