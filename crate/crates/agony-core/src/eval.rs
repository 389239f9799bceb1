//! Agony and hierarchy evaluation.
//!
//! For an exponent `d >= 0` the penalty of an edge `(u, v)` under a ranking
//! `r` is `f_d(r(u) - r(v))` with
//!
//! ```text
//! f_d(x) = (x + 1)^d   if x >= 0      (backward or within-class link)
//!        = 0           if x < 0       (forward link)
//! ```
//!
//! The *agony* of `(G, r)` is the sum of penalties over all edges and the
//! *hierarchy* is `h_d = 1 - A_d / m` (defined as 1 on edgeless graphs,
//! where the ratio would be 0/0).
//!
//! Integer exponents are evaluated in exact integer arithmetic; fractional
//! exponents use floating point (with deterministic summation order, since
//! edges are stored sorted). Agony can equivalently be accumulated per rank
//! block as `sum_{i >= j} m_ij * (i - j + 1)^d`; [`agony_from_blocks`]
//! provides that route and the two must agree exactly for integer `d`.

use alloc::vec::Vec;

use crate::graph::DirectedGraph;
use crate::ranking::Ranking;

/// Errors produced by evaluation.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EvalError {
    /// The exponent must be a finite non-negative real.
    #[error("agony exponent must be finite and >= 0, got {0}")]
    InvalidExponent(f64),
    /// The ranking must assign a rank to every node of the graph.
    #[error("ranking covers {ranking} nodes but the graph has {graph}")]
    LengthMismatch {
        /// Nodes covered by the ranking.
        ranking: usize,
        /// Nodes in the graph.
        graph: usize,
    },
}

/// A validated agony exponent `d >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgonyExponent {
    d: f64,
}

impl AgonyExponent {
    /// Validates `d` (finite, non-negative).
    ///
    /// # Errors
    ///
    /// [`EvalError::InvalidExponent`] otherwise.
    pub fn new(d: f64) -> Result<Self, EvalError> {
        if !d.is_finite() || d < 0.0 {
            return Err(EvalError::InvalidExponent(d));
        }
        Ok(Self { d })
    }

    /// The exponent value.
    #[must_use]
    pub fn value(self) -> f64 {
        self.d
    }

    /// `Some(d)` when the exponent is a (small) integer, enabling exact
    /// integer arithmetic.
    #[must_use]
    pub fn as_integer(self) -> Option<u32> {
        if self.d <= u32::MAX as f64 && libm::floor(self.d) == self.d {
            Some(self.d as u32)
        } else {
            None
        }
    }
}

/// The penalty `f_d(x)` of a rank difference `x = r(u) - r(v)`.
///
/// Zero for forward links (`x < 0`); `(x + 1)^d` otherwise, so same-class
/// links (`x = 0`) always cost 1 and for `d = 0` every non-forward link
/// costs exactly 1.
#[must_use]
pub fn penalty(d: AgonyExponent, x: i64) -> f64 {
    if x < 0 {
        return 0.0;
    }
    match d.as_integer().and_then(|di| penalty_exact(di, x)) {
        Some(exact) => exact as f64,
        None => libm::pow((x + 1) as f64, d.value()),
    }
}

/// Exact integer penalty `(x + 1)^d` for integer `d` and `x >= 0`; `None`
/// if it would overflow `u128` (callers then fall back to floating point).
fn penalty_exact(d: u32, x: i64) -> Option<u128> {
    debug_assert!(x >= 0);
    (x as u128 + 1).checked_pow(d)
}

/// Per-block edge counts `m_ij`: entry `(i, j)` counts edges from rank
/// class `i` to rank class `j`.
///
/// Stored sparsely (sorted by `(i, j)`) so that rankings with many classes
/// — e.g. one node per class — stay affordable; [`BlockCounts::to_dense`]
/// materializes the full `R x R` matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockCounts {
    /// Number of rank classes `R` (matrix is `R x R`).
    classes: u32,
    /// Non-zero cells `((i, j), count)` sorted by `(i, j)`; ranks 1-based.
    cells: Vec<((u32, u32), u64)>,
}

impl BlockCounts {
    /// Matrix dimension `R` (largest rank in the evaluated ranking).
    #[must_use]
    pub fn classes(&self) -> u32 {
        self.classes
    }

    /// The count `m_ij` for 1-based ranks `(i, j)`.
    #[must_use]
    pub fn get(&self, i: u32, j: u32) -> u64 {
        self.cells
            .binary_search_by_key(&(i, j), |&(k, _)| k)
            .map(|idx| self.cells[idx].1)
            .unwrap_or(0)
    }

    /// Non-zero cells, sorted by `(i, j)`.
    #[must_use]
    pub fn cells(&self) -> &[((u32, u32), u64)] {
        &self.cells
    }

    /// The dense `R x R` matrix in row-major order (row `i-1`, column
    /// `j-1`). Quadratic in the class count; intended for small `R`.
    #[must_use]
    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let r = self.classes as usize;
        let mut dense = alloc::vec![alloc::vec![0u64; r]; r];
        for &((i, j), c) in &self.cells {
            dense[i as usize - 1][j as usize - 1] = c;
        }
        dense
    }
}

/// Full evaluation of a ranking on a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    /// Total agony `A_d(G, r)`.
    pub agony: f64,
    /// Exact integer agony, available when `d` is an integer and the total
    /// fits in `u128`.
    pub agony_exact: Option<u128>,
    /// Edge count `m`.
    pub m: u64,
    /// Hierarchy `h_d = 1 - agony / m` (1 when `m = 0`).
    pub hierarchy: f64,
    /// Number of edges with `r(u) >= r(v)` (the penalized ones).
    pub backward_edges: u64,
    /// Per-block edge counts `m_ij`.
    pub block_counts: BlockCounts,
}

/// Evaluates the agony and hierarchy of `r` on `g`.
///
/// # Errors
///
/// [`EvalError::LengthMismatch`] when the ranking does not cover exactly the
/// graph's nodes.
pub fn agony(g: &DirectedGraph, r: &Ranking, d: AgonyExponent) -> Result<EvalReport, EvalError> {
    if r.len() != g.node_count() {
        return Err(EvalError::LengthMismatch { ranking: r.len(), graph: g.node_count() });
    }
    let m = g.edge_count() as u64;
    let mut backward_edges = 0u64;
    let mut total_f = 0.0f64;
    let mut total_exact: Option<u128> = d.as_integer().map(|_| 0u128);
    let mut cells: Vec<((u32, u32), u64)> = Vec::new();
    for &(u, v) in g.edges() {
        let (ru, rv) = (r.rank(u), r.rank(v));
        let x = ru as i64 - rv as i64;
        if x >= 0 {
            backward_edges += 1;
            match (total_exact, d.as_integer().and_then(|di| penalty_exact(di, x))) {
                (Some(acc), Some(pen)) => total_exact = acc.checked_add(pen),
                _ => total_exact = None,
            }
            total_f += penalty(d, x);
        }
        // Edges arrive sorted by (u, v), not by rank pair, so collect and
        // aggregate below.
        cells.push(((ru, rv), 1));
    }
    cells.sort_unstable_by_key(|&(k, _)| k);
    cells.dedup_by(|a, b| {
        if a.0 == b.0 {
            b.1 += a.1;
            true
        } else {
            false
        }
    });
    let agony = match total_exact {
        Some(e) => e as f64,
        None => total_f,
    };
    let hierarchy = if m == 0 { 1.0 } else { 1.0 - agony / m as f64 };
    Ok(EvalReport {
        agony,
        agony_exact: total_exact,
        m,
        hierarchy,
        backward_edges,
        block_counts: BlockCounts { classes: r.max_rank(), cells },
    })
}

/// Agony accumulated from per-block counts:
/// `sum over blocks (i, j) with i >= j of m_ij * (i - j + 1)^d`.
///
/// For integer `d` this must agree exactly with the edge-sum route of
/// [`agony`].
#[must_use]
pub fn agony_from_blocks(blocks: &BlockCounts, d: AgonyExponent) -> f64 {
    let mut total_exact: Option<u128> = d.as_integer().map(|_| 0u128);
    let mut total_f = 0.0f64;
    for &((i, j), count) in blocks.cells() {
        if i < j {
            continue;
        }
        let x = (i - j) as i64;
        match (total_exact, d.as_integer().and_then(|di| penalty_exact(di, x))) {
            (Some(acc), Some(pen)) => {
                total_exact = pen.checked_mul(count as u128).and_then(|t| acc.checked_add(t));
            }
            _ => total_exact = None,
        }
        total_f += count as f64 * penalty(d, x);
    }
    match total_exact {
        Some(e) => e as f64,
        None => total_f,
    }
}
