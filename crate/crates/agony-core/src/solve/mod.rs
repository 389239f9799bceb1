//! Minimum-agony solvers: exact `d = 1`, greedy `d = 0`, a brute-force
//! oracle for tiny graphs at any exponent, canonicalization, and iterated
//! agony.

mod mcf;

use alloc::vec::Vec;

use crate::eval::{self, AgonyExponent, EvalError};
use crate::graph::{dag_ranking, is_dag, DirectedGraph};
use crate::ranking::Ranking;

/// Largest node count accepted by [`brute_force`]: the number of ordered
/// set partitions of 9 items is about 7.1 million, still enumerable.
pub const BRUTE_FORCE_MAX_NODES: usize = 9;

/// Errors produced by the solvers.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SolveError {
    /// [`brute_force`] refuses graphs beyond [`BRUTE_FORCE_MAX_NODES`].
    #[error("brute force enumerates ordered set partitions and refuses {nodes} nodes (max {max})")]
    TooLargeForBruteForce {
        /// Node count of the offending graph.
        nodes: usize,
        /// Enumeration limit.
        max: usize,
    },
    /// Iterated agony (and the dedicated solvers) support `d = 0` and
    /// `d = 1` only.
    #[error("no solver is available for exponent d = {0}; supported: 0, 1")]
    UnsupportedExponent(f64),
    /// Iteration needs at least one level.
    #[error("max_depth must be >= 1")]
    ZeroDepth,
    /// An evaluation error (e.g. a ranking that does not cover the graph).
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// The result of a solver run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct SolveReport {
    /// The returned ranking (normalized).
    pub ranking: Ranking,
    /// Agony of `ranking` on the solved graph.
    pub agony: f64,
    /// Hierarchy `1 - agony / m` (1 on edgeless graphs).
    pub hierarchy: f64,
    /// Number of rank classes of `ranking`.
    pub num_classes: u32,
    /// Edges with `r(u) >= r(v)`.
    pub backward_edges: u64,
    /// Whether optimality is guaranteed.
    pub exact: bool,
}

fn report_for(g: &DirectedGraph, ranking: Ranking, d: AgonyExponent, exact: bool) -> SolveReport {
    let rep = eval::agony(g, &ranking, d).expect("solver rankings cover the graph");
    SolveReport {
        num_classes: ranking.max_rank(),
        ranking,
        agony: rep.agony,
        hierarchy: rep.hierarchy,
        backward_edges: rep.backward_edges,
        exact,
    }
}

fn d_of(v: f64) -> AgonyExponent {
    AgonyExponent::new(v).expect("fixed valid exponent")
}

/// Computes an exact minimum-agony ranking for `d = 1`.
///
/// The minimum is found through the min-cost-flow dual of the ranking
/// linear program (see the module-level notes in the implementation); the
/// result is canonicalized, so ties in agony are resolved toward few
/// classes. The exact optimum always satisfies `0 <= agony <= m`, hence
/// `hierarchy` lies in `[0, 1]`.
#[must_use]
pub fn minimize_d1(g: &DirectedGraph) -> SolveReport {
    let d1 = d_of(1.0);
    let sol = mcf::solve_d1(g);
    let raw = Ranking::new(sol.ranks).expect("flow potentials are shifted to be >= 1");
    let canon = canonicalize(g, &raw, d1).expect("ranking covers the graph");
    let report = report_for(g, canon, d1, true);
    debug_assert_eq!(report.agony, sol.agony as f64);
    report
}

/// Minimizes the number of backward edges (`d = 0`, the feedback-arc-set
/// objective).
///
/// Acyclic graphs are solved exactly by DAG layering (agony 0). Otherwise
/// the Eades–Lin–Smyth greedy linear-arrangement heuristic produces a
/// total order — one node per class — whose violating-edge count is the
/// reported agony; `exact` is `false` in that case. The heuristic
/// guarantees at most `m / 2` backward edges.
#[must_use]
pub fn minimize_d0(g: &DirectedGraph) -> SolveReport {
    let d0 = d_of(0.0);
    if is_dag(g) {
        let r = dag_ranking(g).expect("graph is acyclic");
        return report_for(g, r, d0, true);
    }
    let order = eades_lin_smyth_order(g);
    let mut ranks = alloc::vec![0u32; g.node_count()];
    for (pos, &v) in order.iter().enumerate() {
        ranks[v as usize] = pos as u32 + 1;
    }
    let ranking = Ranking::new(ranks).expect("positions are 1-based");
    report_for(g, ranking, d0, false)
}

/// Greedy linear arrangement: repeatedly peel sinks (to the back) and
/// sources (to the front), otherwise place the node maximizing
/// `outdeg - indeg` at the front; ties go to the lowest node id.
fn eades_lin_smyth_order(g: &DirectedGraph) -> Vec<u32> {
    let n = g.node_count();
    let in_lists = g.in_neighbor_lists();
    let mut out_deg: Vec<i64> = (0..n).map(|v| g.out_degree(v as u32) as i64).collect();
    let mut in_deg: Vec<i64> = (0..n).map(|v| g.in_degree(v as u32) as i64).collect();
    let mut removed = alloc::vec![false; n];
    let mut front: Vec<u32> = Vec::new();
    let mut back: Vec<u32> = Vec::new();
    let mut remaining = n;

    fn remove_node(
        g: &DirectedGraph,
        in_lists: &[Vec<u32>],
        out_deg: &mut [i64],
        in_deg: &mut [i64],
        removed: &mut [bool],
        v: usize,
    ) {
        removed[v] = true;
        for w in g.out_neighbors(v as u32) {
            if !removed[w as usize] {
                in_deg[w as usize] -= 1;
            }
        }
        for &u in &in_lists[v] {
            if !removed[u as usize] {
                out_deg[u as usize] -= 1;
            }
        }
    }

    while remaining > 0 {
        // Peel sinks (lowest id first); each lands in front of the
        // previously peeled ones, i.e. the back list is built in reverse.
        while let Some(v) = (0..n).find(|&v| !removed[v] && out_deg[v] == 0) {
            remove_node(g, &in_lists, &mut out_deg, &mut in_deg, &mut removed, v);
            back.push(v as u32);
            remaining -= 1;
        }
        // Peel sources.
        while let Some(v) = (0..n).find(|&v| !removed[v] && in_deg[v] == 0) {
            remove_node(g, &in_lists, &mut out_deg, &mut in_deg, &mut removed, v);
            front.push(v as u32);
            remaining -= 1;
        }
        // Otherwise place the largest out-minus-in degree node.
        if remaining > 0 {
            let v = (0..n)
                .filter(|&v| !removed[v])
                .max_by_key(|&v| (out_deg[v] - in_deg[v], core::cmp::Reverse(v)))
                .expect("remaining > 0");
            remove_node(g, &in_lists, &mut out_deg, &mut in_deg, &mut removed, v);
            front.push(v as u32);
            remaining -= 1;
        }
    }
    back.reverse();
    front.extend_from_slice(&back);
    front
}

/// Exact minimum agony for any exponent by enumerating all ordered set
/// partitions of the nodes; intended as an oracle for tiny instances.
///
/// Ties are broken toward the fewest classes, then the lexicographically
/// smallest rank vector.
///
/// # Errors
///
/// [`SolveError::TooLargeForBruteForce`] beyond [`BRUTE_FORCE_MAX_NODES`]
/// nodes.
pub fn brute_force(g: &DirectedGraph, d: AgonyExponent) -> Result<SolveReport, SolveError> {
    let n = g.node_count();
    if n > BRUTE_FORCE_MAX_NODES {
        return Err(SolveError::TooLargeForBruteForce { nodes: n, max: BRUTE_FORCE_MAX_NODES });
    }
    if n == 0 {
        return Ok(report_for(g, Ranking::trivial(0), d, true));
    }
    struct Search<'a> {
        edges: &'a [(u32, u32)],
        d: AgonyExponent,
        ranks: Vec<u32>,
        best_agony: f64,
        best_classes: u32,
        best_ranks: Vec<u32>,
    }
    impl Search<'_> {
        fn leaf(&mut self, classes: u32) {
            let agony: f64 = self
                .edges
                .iter()
                .map(|&(u, v)| {
                    eval::penalty(
                        self.d,
                        self.ranks[u as usize] as i64 - self.ranks[v as usize] as i64,
                    )
                })
                .sum();
            let better = agony < self.best_agony
                || (agony == self.best_agony
                    && (classes < self.best_classes
                        || (classes == self.best_classes && self.ranks < self.best_ranks)));
            if better {
                self.best_agony = agony;
                self.best_classes = classes;
                self.best_ranks.clear();
                self.best_ranks.extend_from_slice(&self.ranks);
            }
        }
        fn assign(&mut self, i: usize, classes: u32) {
            if i == self.ranks.len() {
                self.leaf(classes);
                return;
            }
            // Join an existing class.
            for c in 1..=classes {
                self.ranks[i] = c;
                self.assign(i + 1, classes);
            }
            // Open a new class at any insertion position, shifting the
            // classes at or above it upward.
            for pos in 1..=classes + 1 {
                for j in 0..i {
                    if self.ranks[j] >= pos {
                        self.ranks[j] += 1;
                    }
                }
                self.ranks[i] = pos;
                self.assign(i + 1, classes + 1);
                for j in 0..i {
                    if self.ranks[j] > pos {
                        self.ranks[j] -= 1;
                    }
                }
            }
        }
    }
    let mut search = Search {
        edges: g.edges(),
        d,
        ranks: alloc::vec![0u32; n],
        best_agony: f64::INFINITY,
        best_classes: u32::MAX,
        best_ranks: Vec::new(),
    };
    search.ranks[0] = 1;
    search.assign(1, 1);
    let ranking = Ranking::new(search.best_ranks).expect("enumeration emits 1-based ranks");
    Ok(report_for(g, ranking, d, true))
}

/// Canonicalizes a ranking: repeatedly applies agony-non-increasing
/// single-node rank decreases, agony-non-increasing merges of adjacent
/// classes, and empty-class compaction, until a fixed point.
///
/// The result is normalized and its agony never exceeds the input's; ties
/// in agony are spent on reducing the class count (every accepted move
/// strictly decreases the rank sum or the class count, so the loop
/// terminates).
///
/// # Errors
///
/// [`EvalError::LengthMismatch`] (wrapped) when `r` does not cover `g`'s
/// nodes.
pub fn canonicalize(
    g: &DirectedGraph,
    r: &Ranking,
    d: AgonyExponent,
) -> Result<Ranking, SolveError> {
    if r.len() != g.node_count() {
        return Err(SolveError::Eval(EvalError::LengthMismatch {
            ranking: r.len(),
            graph: g.node_count(),
        }));
    }
    let n = g.node_count();
    let in_lists = g.in_neighbor_lists();
    let mut ranks: Vec<u32> = r.normalize().ranks().to_vec();
    loop {
        let mut changed = false;
        // Phase 1: move single nodes to lower ranks while agony does not
        // increase; prefer the largest decrease, then the lowest target.
        loop {
            let mut moved = false;
            for v in 0..n {
                let rv = ranks[v];
                if rv == 1 {
                    continue;
                }
                // Sparse histograms of neighbor ranks.
                let mut out_hist: Vec<(u32, u64)> =
                    g.out_neighbors(v as u32).map(|w| (ranks[w as usize], 1u64)).collect();
                let mut in_hist: Vec<(u32, u64)> =
                    in_lists[v].iter().map(|&u| (ranks[u as usize], 1u64)).collect();
                for hist in [&mut out_hist, &mut in_hist] {
                    hist.sort_unstable_by_key(|&(rk, _)| rk);
                    hist.dedup_by(|a, b| {
                        if a.0 == b.0 {
                            b.1 += a.1;
                            true
                        } else {
                            false
                        }
                    });
                }
                let contribution = |t: u32| -> f64 {
                    let mut total = 0.0;
                    for &(rk, c) in &out_hist {
                        total += c as f64 * eval::penalty(d, t as i64 - rk as i64);
                    }
                    for &(rk, c) in &in_hist {
                        total += c as f64 * eval::penalty(d, rk as i64 - t as i64);
                    }
                    total
                };
                let current = contribution(rv);
                let mut best: Option<(f64, u32)> = None;
                for t in 1..rv {
                    let delta = contribution(t) - current;
                    if best.map_or(true, |(bd, _)| delta < bd) {
                        best = Some((delta, t));
                    }
                }
                if let Some((delta, t)) = best {
                    if delta <= 0.0 {
                        ranks[v] = t;
                        moved = true;
                    }
                }
            }
            if !moved {
                break;
            }
            changed = true;
        }
        compact(&mut ranks);
        // Phase 2: merge an adjacent class pair when agony does not
        // increase (scan bottom-up, restart after a merge).
        loop {
            let r_max = ranks.iter().copied().max().unwrap_or(0);
            if r_max < 2 {
                break;
            }
            let cells = block_cells(g, &ranks);
            let mut merged = false;
            for c in 2..=r_max {
                let mut delta = 0.0;
                for &((i, j), count) in &cells {
                    let (mi, mj) = (merge_map(i, c), merge_map(j, c));
                    delta += count as f64
                        * (eval::penalty(d, mi as i64 - mj as i64)
                            - eval::penalty(d, i as i64 - j as i64));
                }
                if delta <= 0.0 {
                    for rank in ranks.iter_mut() {
                        *rank = merge_map(*rank, c);
                    }
                    merged = true;
                    changed = true;
                    break;
                }
            }
            if !merged {
                break;
            }
        }
        if !changed {
            break;
        }
    }
    compact(&mut ranks);
    Ok(Ranking::new(ranks).expect("compaction emits 1-based ranks"))
}

/// Rank mapping that merges class `c` into `c - 1`.
fn merge_map(rank: u32, c: u32) -> u32 {
    if rank >= c {
        rank - 1
    } else {
        rank
    }
}

/// Sorted sparse per-block edge counts for a raw rank vector.
fn block_cells(g: &DirectedGraph, ranks: &[u32]) -> Vec<((u32, u32), u64)> {
    let mut cells: Vec<((u32, u32), u64)> =
        g.edges().iter().map(|&(u, v)| ((ranks[u as usize], ranks[v as usize]), 1u64)).collect();
    cells.sort_unstable_by_key(|&(k, _)| k);
    cells.dedup_by(|a, b| {
        if a.0 == b.0 {
            b.1 += a.1;
            true
        } else {
            false
        }
    });
    cells
}

/// In-place normalization of a raw rank vector.
fn compact(ranks: &mut [u32]) {
    if ranks.is_empty() {
        return;
    }
    let max = *ranks.iter().max().expect("non-empty") as usize;
    let mut used = alloc::vec![false; max + 1];
    for &rk in ranks.iter() {
        used[rk as usize] = true;
    }
    let mut relabel = alloc::vec![0u32; max + 1];
    let mut next = 0u32;
    for (value, &u) in used.iter().enumerate() {
        if u {
            next += 1;
            relabel[value] = next;
        }
    }
    for rk in ranks.iter_mut() {
        *rk = relabel[*rk as usize];
    }
}

/// Why a class of the iteration tree was not refined further.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum LeafReason {
    /// The depth limit was reached before this class could be solved.
    MaxDepth,
    /// The class has fewer than `min_class_size` nodes.
    TooSmall,
    /// The class subgraph has no edges.
    Edgeless,
    /// The sub-solution found fewer than `min_subclasses` classes.
    TooFewSubclasses,
    /// The sub-hierarchy exceeds `max_sub_hierarchy` — a near-perfect
    /// internal score signals an already-resolved (or spurious) split.
    SubHierarchyTooHigh,
}

/// Stopping parameters for [`iterated_agony`].
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IterationOptions {
    /// Number of solved levels; 1 disables refinement.
    pub max_depth: u32,
    /// Smallest class worth refining.
    pub min_class_size: u32,
    /// A sub-solution must produce at least this many classes to count as
    /// an improvement.
    pub min_subclasses: u32,
    /// Reject refinements whose sub-hierarchy exceeds this bound.
    pub max_sub_hierarchy: f64,
}

impl Default for IterationOptions {
    /// Two solved levels; refine classes of at least 3 nodes; require at
    /// least 3 subclasses; reject sub-hierarchies above 0.99.
    fn default() -> Self {
        Self { max_depth: 2, min_class_size: 3, min_subclasses: 3, max_sub_hierarchy: 0.99 }
    }
}

/// One refined node of the iteration tree: a solved (sub)graph and the
/// outcome for each of its rank classes.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IterationNode {
    /// Solution on this node's (sub)graph.
    pub report: SolveReport,
    /// One entry per rank class, in rank order.
    pub children: Vec<IterationChild>,
}

/// A rank class of an [`IterationNode`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IterationChild {
    /// Original (top-level) node ids of this class, ascending.
    pub nodes: Vec<u32>,
    /// Leaf or refined subtree.
    pub outcome: ChildOutcome,
}

/// Outcome for one class: either a leaf (with the sub-solution that was
/// computed but rejected, when one exists) or an accepted refinement.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub enum ChildOutcome {
    /// Not refined.
    Leaf {
        /// Why refinement stopped here.
        reason: LeafReason,
        /// The rejected sub-solution, when the class was actually solved
        /// (absent for `MaxDepth`, `TooSmall`, and `Edgeless`).
        report: Option<SolveReport>,
    },
    /// Refined further.
    Refined(IterationNode),
}

/// The full result of [`iterated_agony`]: the solved tree and the composed
/// multi-level ranking (classes ordered lexicographically by level-1 rank,
/// then level-2 rank, and so on).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct IterationTree {
    /// The level-1 solution and its refinements.
    pub root: IterationNode,
    /// The composed global ranking.
    pub composed: Ranking,
}

impl IterationTree {
    /// Total number of classes of the composed ranking.
    #[must_use]
    pub fn composed_classes(&self) -> u32 {
        self.composed.max_rank()
    }
}

/// Applies agony minimization recursively inside detected classes, to
/// resolve structure below the resolution limit of a single run.
///
/// Level 1 solves `g` with the `d`-solver ([`minimize_d0`] or
/// [`minimize_d1`]). Each class of a solved node is then refined by
/// solving its induced subgraph, unless a stopping rule makes it a leaf:
/// the depth limit, a class smaller than `min_class_size`, an edgeless
/// subgraph, a sub-solution with fewer than `min_subclasses` classes, or
/// a sub-hierarchy above `max_sub_hierarchy`.
///
/// # Errors
///
/// [`SolveError::UnsupportedExponent`] unless `d` is 0 or 1;
/// [`SolveError::ZeroDepth`] when `opts.max_depth == 0`.
pub fn iterated_agony(
    g: &DirectedGraph,
    d: AgonyExponent,
    opts: &IterationOptions,
) -> Result<IterationTree, SolveError> {
    let solver: fn(&DirectedGraph) -> SolveReport = match d.as_integer() {
        Some(0) => minimize_d0,
        Some(1) => minimize_d1,
        _ => return Err(SolveError::UnsupportedExponent(d.value())),
    };
    if opts.max_depth == 0 {
        return Err(SolveError::ZeroDepth);
    }
    let all_ids: Vec<u32> = (0..g.node_count() as u32).collect();
    let root = refine(g, &all_ids, solver, opts, 1);
    let mut composed_ranks = alloc::vec![0u32; g.node_count()];
    compose_into(&root, &all_ids, &mut composed_ranks, 0);
    let composed = Ranking::new(composed_ranks).expect("composition assigns every node");
    Ok(IterationTree { root, composed })
}

/// Solves the subgraph induced by `ids` and decides, class by class,
/// whether to refine further. `depth` is the level of this solve.
fn refine(
    top: &DirectedGraph,
    ids: &[u32],
    solver: fn(&DirectedGraph) -> SolveReport,
    opts: &IterationOptions,
    depth: u32,
) -> IterationNode {
    let sub = top.induced_subgraph(ids);
    let report = solver(&sub);
    let members = report.ranking.class_members();
    let mut children = Vec::with_capacity(members.len());
    for local_members in &members {
        let nodes: Vec<u32> = local_members.iter().map(|&l| ids[l as usize]).collect();
        let outcome = if depth + 1 > opts.max_depth {
            ChildOutcome::Leaf { reason: LeafReason::MaxDepth, report: None }
        } else if (nodes.len() as u32) < opts.min_class_size {
            ChildOutcome::Leaf { reason: LeafReason::TooSmall, report: None }
        } else {
            let class_sub = top.induced_subgraph(&nodes);
            if class_sub.edge_count() == 0 {
                ChildOutcome::Leaf { reason: LeafReason::Edgeless, report: None }
            } else {
                let child = refine(top, &nodes, solver, opts, depth + 1);
                if child.report.num_classes < opts.min_subclasses.max(2) {
                    ChildOutcome::Leaf {
                        reason: LeafReason::TooFewSubclasses,
                        report: Some(child.report),
                    }
                } else if child.report.hierarchy > opts.max_sub_hierarchy {
                    ChildOutcome::Leaf {
                        reason: LeafReason::SubHierarchyTooHigh,
                        report: Some(child.report),
                    }
                } else {
                    ChildOutcome::Refined(child)
                }
            }
        };
        children.push(IterationChild { nodes, outcome });
    }
    IterationNode { report, children }
}

/// Writes the composed ranks of `node`'s members into `out`; returns the
/// number of composed classes consumed starting at `base`.
fn compose_into(node: &IterationNode, ids: &[u32], out: &mut [u32], base: u32) -> u32 {
    let mut offset = base;
    for (class_members, child) in node.report.ranking.class_members().iter().zip(&node.children) {
        match &child.outcome {
            ChildOutcome::Leaf { .. } => {
                offset += 1;
                for &local in class_members {
                    out[ids[local as usize] as usize] = offset;
                }
            }
            ChildOutcome::Refined(sub) => {
                offset += compose_into(sub, &child.nodes, out, offset);
            }
        }
    }
    offset - base
}
