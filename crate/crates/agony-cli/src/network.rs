//! Real-network ingestion: load an edge list, summarize its structure,
//! minimize agony, and optionally refine every detected class with a
//! second iteration.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use agony_core::eval::AgonyExponent;
use agony_core::graph::DirectedGraph;
use agony_core::solve::{
    iterated_agony, minimize_d0, minimize_d1, ChildOutcome, IterationOptions, LeafReason,
};
use petgraph::algo::tarjan_scc;
use petgraph::graph::DiGraph;

use crate::io::{load_edge_list, FileFormatError, LoadStats};

/// Errors from the network pipeline.
#[derive(Debug, thiserror::Error)]
pub enum NetworkError {
    /// Only `d = 0` and `d = 1` have solvers.
    #[error("no solver for d = {0}; use 0 or 1")]
    UnsupportedExponent(u32),
    /// File reading/parsing failures.
    #[error(transparent)]
    Format(#[from] FileFormatError),
}

/// One row of the per-class refinement table.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ClassReport {
    /// Rank of the class in the level-1 solution.
    pub rank: u32,
    /// Nodes in the class.
    pub size: u64,
    /// Share of all nodes, in percent.
    pub size_pct: f64,
    /// Hierarchy of the class's internal solution, when one was computed.
    pub sub_hierarchy: Option<f64>,
    /// Class count of the internal solution, when one was computed.
    pub subclasses: Option<u32>,
    /// `"refined"`, or the reason the class was left unrefined.
    pub status: String,
}

/// Summary of a real network run, in the shape of the paper-style
/// network tables.
#[derive(Debug, Clone, serde::Serialize)]
pub struct NetworkReport {
    /// Node count.
    pub nodes: usize,
    /// Edge count after cleanup.
    pub edges: usize,
    /// Edge density `m / (N (N + 1))`.
    pub density: f64,
    /// Percentage of nodes in the largest strongly connected component.
    pub largest_scc_pct: f64,
    /// Duplicate edges dropped at load.
    pub duplicates_dropped: u64,
    /// Self-loops dropped at load.
    pub self_loops_dropped: u64,
    /// Agony exponent used.
    pub d: u32,
    /// Optimal hierarchy of the level-1 solution.
    pub h_star: f64,
    /// Level-1 class count (R).
    pub num_classes: u32,
    /// Composed class count after refinement (R'), when iterating.
    pub num_classes_refined: Option<u32>,
    /// Per-class refinement table, when iterating.
    pub classes: Option<Vec<ClassReport>>,
}

fn leaf_status(reason: LeafReason) -> &'static str {
    match reason {
        LeafReason::MaxDepth => "max-depth",
        LeafReason::TooSmall => "too-small",
        LeafReason::Edgeless => "edgeless",
        LeafReason::TooFewSubclasses => "too-few-subclasses",
        LeafReason::SubHierarchyTooHigh => "sub-hierarchy-too-high",
    }
}

/// Flattens the top level of an iteration tree into the per-class table.
#[must_use]
pub fn class_table(
    tree: &agony_core::solve::IterationTree,
    total_nodes: usize,
) -> Vec<ClassReport> {
    let sizes = tree.root.report.ranking.class_sizes();
    let mut table = Vec::with_capacity(tree.root.children.len());
    for (idx, child) in tree.root.children.iter().enumerate() {
        let size = sizes.get(idx).copied().unwrap_or(0);
        let (sub_hierarchy, subclasses, status) = match &child.outcome {
            ChildOutcome::Refined(node) => {
                (Some(node.report.hierarchy), Some(node.report.num_classes), "refined".to_owned())
            }
            ChildOutcome::Leaf { reason, report: Some(report) } => {
                (Some(report.hierarchy), Some(report.num_classes), leaf_status(*reason).to_owned())
            }
            ChildOutcome::Leaf { reason, report: None } => {
                (None, None, leaf_status(*reason).to_owned())
            }
        };
        table.push(ClassReport {
            rank: idx as u32 + 1,
            size,
            size_pct: if total_nodes == 0 { 0.0 } else { 100.0 * size as f64 / total_nodes as f64 },
            sub_hierarchy,
            subclasses,
            status,
        });
    }
    table
}

fn largest_scc_pct(g: &DirectedGraph) -> f64 {
    if g.node_count() == 0 {
        return 0.0;
    }
    let mut pg = DiGraph::<(), (), u32>::with_capacity(g.node_count(), g.edge_count());
    for _ in 0..g.node_count() {
        pg.add_node(());
    }
    for &(u, v) in g.edges() {
        pg.add_edge(u.into(), v.into(), ());
    }
    let largest = tarjan_scc(&pg).into_iter().map(|c| c.len()).max().unwrap_or(0);
    100.0 * largest as f64 / g.node_count() as f64
}

/// Analyzes an already-loaded graph; see [`run_real_network`] for the
/// file-based entry point.
///
/// # Errors
///
/// [`NetworkError::UnsupportedExponent`] unless `d` is 0 or 1.
pub fn analyze_network(
    g: &DirectedGraph,
    stats: LoadStats,
    d: u32,
    iterate: Option<&IterationOptions>,
) -> Result<NetworkReport, NetworkError> {
    let solver: fn(&DirectedGraph) -> agony_core::SolveReport = match d {
        0 => minimize_d0,
        1 => minimize_d1,
        other => return Err(NetworkError::UnsupportedExponent(other)),
    };
    let level1 = solver(g);
    let n = g.node_count();
    let density = if n == 0 { 0.0 } else { g.edge_count() as f64 / (n as f64 * (n as f64 + 1.0)) };

    let (num_classes_refined, classes) = match iterate {
        None => (None, None),
        Some(opts) => {
            let d_exp = AgonyExponent::new(f64::from(d)).expect("0 or 1 is valid");
            let tree = iterated_agony(g, d_exp, opts).expect("depth >= 1 and d validated");
            let table = class_table(&tree, n);
            (Some(tree.composed.num_classes()), Some(table))
        }
    };

    Ok(NetworkReport {
        nodes: n,
        edges: g.edge_count(),
        density,
        largest_scc_pct: largest_scc_pct(g),
        duplicates_dropped: stats.duplicates,
        self_loops_dropped: stats.self_loops,
        d,
        h_star: level1.hierarchy,
        num_classes: level1.num_classes,
        num_classes_refined,
        classes,
    })
}

/// Loads an edge list from `path` and runs the full pipeline: structure
/// summary, agony minimization, and (optionally) per-class refinement.
///
/// # Errors
///
/// Parse errors are passed through; `d` outside `{0, 1}` is rejected.
pub fn run_real_network(
    path: &Path,
    d: u32,
    iterate: Option<&IterationOptions>,
) -> Result<NetworkReport, NetworkError> {
    let file = File::open(path).map_err(FileFormatError::Io)?;
    let (graph, stats) = load_edge_list(BufReader::new(file))?;
    analyze_network(&graph, stats, d, iterate)
}
