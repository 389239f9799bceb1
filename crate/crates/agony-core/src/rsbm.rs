//! Ranked Stochastic Block Model (RSBM): affinity matrix, hierarchy
//! constraint, sampling, and affinity estimation from a ranked graph.
//!
//! Classes are ordered `1..R` from top to bottom of the hierarchy. The
//! affinity matrix gives the probability of an edge from a node of class
//! `i` to a node of class `j`:
//!
//! ```text
//! c_ij = s   for j <= i    (backward link, incl. within-class)
//!      = p   for j = i+1    (forward link to the adjacent class)
//!      = q   for j > i+1    (forward link to more distant classes)
//! ```
//!
//! A planted structure is a "true" hierarchy when the expected number of
//! backward links does not exceed the expected forward links:
//! `s * sum_k b_k <= p * b_1 + q * sum_{k>=2} b_k` with the pair counts
//! `b_k = sum_i n_i n_{i+k}` (and `b_0 = sum_i n_i^2`). For uniform class
//! sizes the boundary is [`s_max`].

use alloc::vec::Vec;

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::graph::DirectedGraph;
use crate::mix_seed;
use crate::ranking::Ranking;

/// Errors produced by the RSBM module.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum RsbmError {
    /// A probability parameter lies outside `[0, 1]`.
    #[error("parameter {name} = {value} is not a probability in [0, 1]")]
    InvalidProbability {
        /// Parameter name (`p`, `q`, or `s`).
        name: &'static str,
        /// Offending value.
        value: f64,
    },
    /// The model needs at least one class.
    #[error("the model needs at least one class")]
    NoClasses,
    /// Every class must contain at least one node.
    #[error("class {0} is empty (all class sizes must be >= 1)")]
    EmptyClass(usize),
    /// The total node count exceeds what node ids can address.
    #[error("total node count {0} exceeds the supported maximum {max}", max = u32::MAX)]
    TooManyNodes(u64),
    /// A class-distance index was out of range.
    #[error("class distance k = {k} out of range 0..={max}")]
    DistanceOutOfRange {
        /// Requested distance.
        k: u32,
        /// Largest valid distance, `R - 1`.
        max: u32,
    },
    /// `s_max` requires at least two classes (with one class no forward
    /// link exists).
    #[error("s_max requires R >= 2, got {0}")]
    TooFewClassesForSMax(u32),
    /// A ranking did not cover the graph's nodes.
    #[error("ranking covers {ranking} nodes but the graph has {graph}")]
    RankingMismatch {
        /// Nodes covered by the ranking.
        ranking: usize,
        /// Nodes in the graph.
        graph: usize,
    },
}

/// Validated RSBM parameters.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct RsbmParams {
    p: f64,
    q: f64,
    s: f64,
    class_sizes: Vec<u32>,
}

impl RsbmParams {
    /// Validates and stores model parameters with explicit class sizes.
    ///
    /// # Errors
    ///
    /// Rejects probabilities outside `[0, 1]` (or non-finite), an empty
    /// class list, empty classes, and totals beyond `u32` node ids.
    pub fn new(p: f64, q: f64, s: f64, class_sizes: Vec<u32>) -> Result<Self, RsbmError> {
        for (name, value) in [("p", p), ("q", q), ("s", s)] {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(RsbmError::InvalidProbability { name, value });
            }
        }
        if class_sizes.is_empty() {
            return Err(RsbmError::NoClasses);
        }
        if let Some(i) = class_sizes.iter().position(|&n| n == 0) {
            return Err(RsbmError::EmptyClass(i + 1));
        }
        let total: u64 = class_sizes.iter().map(|&n| n as u64).sum();
        if total > u32::MAX as u64 {
            return Err(RsbmError::TooManyNodes(total));
        }
        Ok(Self { p, q, s, class_sizes })
    }

    /// Uniform-size convenience constructor: `classes` classes of
    /// `n_per_class` nodes each.
    ///
    /// # Errors
    ///
    /// As [`RsbmParams::new`].
    pub fn uniform(
        p: f64,
        q: f64,
        s: f64,
        classes: u32,
        n_per_class: u32,
    ) -> Result<Self, RsbmError> {
        if classes == 0 {
            return Err(RsbmError::NoClasses);
        }
        Self::new(p, q, s, alloc::vec![n_per_class; classes as usize])
    }

    /// Forward-link probability to the immediately higher-ranked class.
    #[must_use]
    pub fn p(&self) -> f64 {
        self.p
    }

    /// Forward-link probability to classes more than one step up.
    #[must_use]
    pub fn q(&self) -> f64 {
        self.q
    }

    /// Backward/within-class link probability.
    #[must_use]
    pub fn s(&self) -> f64 {
        self.s
    }

    /// Number of classes `R`.
    #[must_use]
    pub fn num_classes(&self) -> u32 {
        self.class_sizes.len() as u32
    }

    /// Class sizes `n_1..n_R`.
    #[must_use]
    pub fn class_sizes(&self) -> &[u32] {
        &self.class_sizes
    }

    /// Total node count `N`.
    #[must_use]
    pub fn node_count(&self) -> usize {
        self.class_sizes.iter().map(|&n| n as usize).sum()
    }
}

/// The structured `R x R` affinity matrix of an RSBM.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix {
    r: u32,
    p: f64,
    q: f64,
    s: f64,
}

impl AffinityMatrix {
    /// Matrix dimension `R`.
    #[must_use]
    pub fn classes(&self) -> u32 {
        self.r
    }

    /// Entry `c_ij` for 0-based class indices; `s` for `j <= i`, `p` for
    /// `j = i + 1`, `q` above that.
    ///
    /// # Panics
    ///
    /// If an index is out of range.
    #[must_use]
    pub fn entry(&self, i: u32, j: u32) -> f64 {
        assert!(i < self.r && j < self.r, "affinity index out of range");
        if j <= i {
            self.s
        } else if j == i + 1 {
            self.p
        } else {
            self.q
        }
    }

    /// Dense row-major matrix.
    #[must_use]
    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        (0..self.r).map(|i| (0..self.r).map(|j| self.entry(i, j)).collect()).collect()
    }
}

/// Builds the affinity matrix of `params`.
#[must_use]
pub fn affinity_matrix(params: &RsbmParams) -> AffinityMatrix {
    AffinityMatrix { r: params.num_classes(), p: params.p(), q: params.q(), s: params.s() }
}

/// The pair count at class distance `k`: `b_k = sum_{i=1}^{R-k} n_i n_{i+k}`,
/// with `b_0 = sum_i n_i^2`.
///
/// # Errors
///
/// [`RsbmError::DistanceOutOfRange`] unless `0 <= k <= R - 1`.
pub fn b_k(class_sizes: &[u32], k: u32) -> Result<u64, RsbmError> {
    let r = class_sizes.len() as u32;
    if r == 0 || k > r - 1 {
        return Err(RsbmError::DistanceOutOfRange { k, max: r.saturating_sub(1) });
    }
    Ok((0..(r - k) as usize)
        .map(|i| class_sizes[i] as u64 * class_sizes[i + k as usize] as u64)
        .sum())
}

/// The largest backward probability `s` compatible with a true hierarchy
/// for uniform class sizes:
/// `s_max = 2(R-1)p / (R(R+1)) + (R-2)(R-1)q / (R(R+1))`.
///
/// # Errors
///
/// [`RsbmError::TooFewClassesForSMax`] when `R < 2`.
pub fn s_max(p: f64, q: f64, r: u32) -> Result<f64, RsbmError> {
    if r < 2 {
        return Err(RsbmError::TooFewClassesForSMax(r));
    }
    let rf = r as f64;
    Ok((2.0 * (rf - 1.0) * p + (rf - 2.0) * (rf - 1.0) * q) / (rf * (rf + 1.0)))
}

/// Whether the expected backward links do not exceed the expected forward
/// links: `s * sum_{k=0}^{R-1} b_k <= p * b_1 + q * sum_{k=2}^{R-1} b_k`
/// (general, non-uniform form).
#[must_use]
pub fn hierarchy_constraint_ok(params: &RsbmParams) -> bool {
    let sizes = params.class_sizes();
    let r = params.num_classes();
    let mut back_pairs = 0u64;
    let mut forward = 0.0f64;
    for k in 0..r {
        let b = b_k(sizes, k).expect("k in range by construction");
        back_pairs += b;
        if k == 1 {
            forward += params.p() * b as f64;
        } else if k >= 2 {
            forward += params.q() * b as f64;
        }
    }
    params.s() * back_pairs as f64 <= forward
}

/// Expected edge count of the exact sampling ensemble (self-loops
/// excluded): `s (b_0 - N + sum_{k>=1} b_k) + p b_1 + q sum_{k>=2} b_k`.
#[must_use]
pub fn expected_edge_count(params: &RsbmParams) -> f64 {
    let sizes = params.class_sizes();
    let r = params.num_classes();
    let n = params.node_count() as f64;
    let mut back_pairs = -n;
    let mut forward = 0.0f64;
    for k in 0..r {
        let b = b_k(sizes, k).expect("k in range by construction") as f64;
        back_pairs += b;
        if k == 1 {
            forward += params.p() * b;
        } else if k >= 2 {
            forward += params.q() * b;
        }
    }
    params.s() * back_pairs + forward
}

/// Samples a graph from the model together with its planted ranking.
///
/// Every ordered pair `(u, v)` with `u != v` receives an independent coin
/// flip with probability `c_{r(u), r(v)}`; nodes are numbered consecutively
/// by class (class 1 first). Sampling is bit-reproducible: the pairs of
/// each class block `(i, j)` are driven by a dedicated `ChaCha8` stream
/// seeded with [`mix_seed`]`(seed, i, j)` and visited in row-major order,
/// so identical `(params, seed)` always produce the identical graph, and
/// blocks could be drawn in any order (or in parallel) without changing
/// the result.
#[must_use]
pub fn sample(params: &RsbmParams, seed: u64) -> (DirectedGraph, Ranking) {
    let sizes = params.class_sizes();
    let r = sizes.len();
    let affinity = affinity_matrix(params);
    // Node ranges per class: class i occupies starts[i]..starts[i + 1].
    let mut starts = Vec::with_capacity(r + 1);
    let mut acc = 0u32;
    starts.push(0u32);
    for &n in sizes {
        acc += n;
        starts.push(acc);
    }
    let node_count = acc as usize;

    let mut edges: Vec<(u32, u32)> = Vec::new();
    for i in 0..r {
        for j in 0..r {
            let c = affinity.entry(i as u32, j as u32);
            let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, i as u64, j as u64));
            let threshold = (c * 18_446_744_073_709_551_616.0) as u64;
            for u in starts[i]..starts[i + 1] {
                for v in starts[j]..starts[j + 1] {
                    // Draw unconditionally so the stream position depends
                    // only on the pair index, never on c.
                    let draw = rng.next_u64();
                    if u != v && (c >= 1.0 || draw < threshold) {
                        edges.push((u, v));
                    }
                }
            }
        }
    }

    let graph = DirectedGraph::new(node_count, edges)
        .expect("sampled pairs are in range, distinct, and loop-free");
    let mut ranks = Vec::with_capacity(node_count);
    for (i, &n) in sizes.iter().enumerate() {
        ranks.extend(core::iter::repeat(i as u32 + 1).take(n as usize));
    }
    let planted = Ranking::new(ranks).expect("ranks start at 1");
    (graph, planted)
}

/// Pooled affinity estimates from a ranked graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffinityEstimate {
    /// Estimated forward probability to the adjacent class; absent when no
    /// adjacent-class pair exists (`R = 1`).
    pub p: Option<f64>,
    /// Estimated distant-forward probability; absent when `R <= 2`.
    pub q: Option<f64>,
    /// Estimated backward/within probability (0 on a single-node graph).
    pub s: f64,
}

/// Estimates `(p, q, s)` by pooling edge densities over the three affinity
/// regions of the ranking `r`: backward/within blocks (`j <= i`), adjacent
/// forward blocks (`j = i + 1`), distant forward blocks (`j > i + 1`).
///
/// Each estimate is (pooled edge count) / (pooled ordered-pair count);
/// within-class pairs exclude self-pairs. Regions with no pairs yield
/// `None` (for `s`, which always exists on multi-node graphs, 0.0).
///
/// # Errors
///
/// [`RsbmError::RankingMismatch`] when `r` does not cover `g`'s nodes.
pub fn estimate_affinity(g: &DirectedGraph, r: &Ranking) -> Result<AffinityEstimate, RsbmError> {
    if r.len() != g.node_count() {
        return Err(RsbmError::RankingMismatch { ranking: r.len(), graph: g.node_count() });
    }
    let sizes = r.class_sizes();
    // Ordered-pair counts per region.
    let mut pairs_back = 0u64;
    let mut pairs_p = 0u64;
    let mut pairs_q = 0u64;
    for (i, &ni) in sizes.iter().enumerate() {
        // Within-class ordered pairs, self excluded.
        pairs_back += ni * ni.saturating_sub(1);
        for (j, &nj) in sizes.iter().enumerate() {
            if j < i {
                pairs_back += ni * nj;
            } else if j == i + 1 {
                pairs_p += ni * nj;
            } else if j > i + 1 {
                pairs_q += ni * nj;
            }
        }
    }
    let mut edges_back = 0u64;
    let mut edges_p = 0u64;
    let mut edges_q = 0u64;
    for &(u, v) in g.edges() {
        let (ru, rv) = (r.rank(u), r.rank(v));
        if rv <= ru {
            edges_back += 1;
        } else if rv == ru + 1 {
            edges_p += 1;
        } else {
            edges_q += 1;
        }
    }
    let density = |edges: u64, pairs: u64| -> Option<f64> {
        (pairs > 0).then(|| edges as f64 / pairs as f64)
    };
    Ok(AffinityEstimate {
        p: density(edges_p, pairs_p),
        q: density(edges_q, pairs_q),
        s: density(edges_back, pairs_back).unwrap_or(0.0),
    })
}
