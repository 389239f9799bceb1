//! Ranking-hierarchy detection in directed graphs by generalized agony
//! minimization.
//!
//! A ranking assigns every node of a directed graph to one of `R` ordered
//! classes. Edges pointing into a strictly higher class are *forward* and cost
//! nothing; every other edge is *backward* and pays the penalty
//! `f_d(x) = (x + 1)^d` on its rank gap `x = r(u) - r(v) >= 0`. The total
//! penalty is the *agony* `A_d(G, r)` of the ranking, and
//! `h_d = 1 - A_d / m` is its *hierarchy* score: 1 for a perfectly
//! hierarchical arrangement, 0 for the trivial all-one-class ranking.
//!
//! The crate provides, in matching modules:
//!
//! - [`graph`] / [`ranking`]: the graph and ranking containers plus ranking
//!   algebra (normalize, invert, merge) and DAG layering.
//! - [`eval`]: agony and hierarchy evaluation for arbitrary real `d >= 0`,
//!   with exact integer arithmetic for integer exponents.
//! - [`solve`]: an exact polynomial d=1 minimizer (via min-cost-flow
//!   duality), a greedy feedback-arc-set heuristic for d=0, a brute-force
//!   oracle for tiny graphs at any `d`, ranking canonicalization, and
//!   iterated agony for sub-resolution structure.
//! - [`rsbm`]: the Ranked Stochastic Block Model — a directed SBM whose
//!   affinity matrix has `s` on and below the diagonal, `p` on the
//!   superdiagonal and `q` above it — with reproducible sampling and
//!   affinity estimation.
//! - [`theory`]: closed-form first-order estimates of the hierarchy of
//!   planted, merged, split and inverted rankings on RSBM ensembles,
//!   together with the resolution thresholds where agony minimization stops
//!   recovering the planted structure.
//! - [`metrics`]: adjusted Rand index and planted-vs-inferred confusion
//!   matrices.
//!
//! The crate is `no_std` (with `alloc`) so the numerical core can be embedded
//! anywhere; file formats, CLI and parallel experiment harnesses live in the
//! companion `agony-cli` crate.
//!
//! # Example
//!
//! ```
//! use agony_core::graph::DirectedGraph;
//! use agony_core::ranking::Ranking;
//! use agony_core::eval::{agony, AgonyExponent};
//! use agony_core::solve::minimize_d1;
//!
//! // A 3-cycle cannot be ranked without violations: its optimal agony is 3.
//! let g = DirectedGraph::new(3, [(0, 1), (1, 2), (2, 0)]).unwrap();
//! let best = minimize_d1(&g);
//! assert_eq!(best.agony, 3.0);
//! assert_eq!(best.hierarchy, 0.0);
//!
//! // Ranks (1, 2, 3) pay the full gap penalty on the closing edge.
//! let r = Ranking::new(vec![1, 2, 3]).unwrap();
//! let d1 = AgonyExponent::new(1.0).unwrap();
//! assert_eq!(agony(&g, &r, d1).unwrap().agony, 3.0);
//! ```
#![cfg_attr(not(test), no_std)]
#![deny(missing_docs)]

extern crate alloc;

pub mod eval;
pub mod graph;
pub mod metrics;
pub mod ranking;
pub mod rsbm;
pub mod solve;
pub mod theory;

pub use eval::{agony, penalty, AgonyExponent, EvalReport};
pub use graph::DirectedGraph;
pub use metrics::{adjusted_rand_index, confusion_matrix, ConfusionMatrix};
pub use ranking::Ranking;
pub use rsbm::RsbmParams;
pub use solve::{brute_force, canonicalize, iterated_agony, minimize_d0, minimize_d1, SolveReport};

/// Deterministic 64-bit mixer (SplitMix64 finalizer).
///
/// Used for deriving independent, reproducible RNG streams from a master
/// seed: the mapping is fixed and documented, so identical seeds produce
/// identical graphs and sweep schedules across runs and versions.
#[must_use]
pub fn mix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Combines a seed with two stream indices into one stream seed.
///
/// `mix64` is applied after each injection so that streams that differ in
/// either index (or in the seed) are decorrelated.
#[must_use]
pub fn mix_seed(seed: u64, i: u64, j: u64) -> u64 {
    mix64(mix64(mix64(seed).wrapping_add(i)).wrapping_add(j))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mix64_is_stable() {
        // Frozen values: the stream discipline is part of the public
        // reproducibility contract and must never drift.
        assert_eq!(mix64(0), 0xe220_a839_7b1d_cdaf);
        assert_eq!(mix64(1), 0x910a_2dec_8902_5cc1);
        assert_eq!(mix_seed(42, 0, 0), mix_seed(42, 0, 0));
        assert_ne!(mix_seed(42, 0, 1), mix_seed(42, 1, 0));
    }
}
