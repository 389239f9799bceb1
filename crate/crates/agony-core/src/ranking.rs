//! Rankings (ordered partitions of nodes) and their algebra.
//!
//! A [`Ranking`] maps each node to a positive rank class. Only the induced
//! ordered partition matters for agony, so most operations work with
//! *normalized* rankings, which use exactly the contiguous classes `1..=R`.
//! The algebra mirrors the ways alternative rankings are built from a
//! planted one: relabeling onto contiguous classes ([`Ranking::normalize`]),
//! reversal of the class order ([`Ranking::invert`]) and grouping of
//! adjacent classes ([`Ranking::merge`]).

use alloc::vec;
use alloc::vec::Vec;

/// Errors produced by ranking construction and algebra.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum RankingError {
    /// Rank values must be positive.
    #[error("rank of node {node} is 0; ranks are 1-based")]
    ZeroRank {
        /// Node with the offending rank.
        node: usize,
    },
    /// Merge block size must be a positive divisor of the class count.
    #[error("block size {block} does not divide the class count {classes}")]
    BlockDoesNotDivide {
        /// Requested block size.
        block: u32,
        /// Number of classes in the ranking.
        classes: u32,
    },
}

/// A rank assignment `r: V -> {1, 2, ...}`, one entry per node.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
pub struct Ranking {
    ranks: Vec<u32>,
}

impl Ranking {
    /// Wraps a rank vector; every entry must be `>= 1`.
    ///
    /// # Errors
    ///
    /// [`RankingError::ZeroRank`] if any entry is 0.
    pub fn new(ranks: Vec<u32>) -> Result<Self, RankingError> {
        if let Some(node) = ranks.iter().position(|&r| r == 0) {
            return Err(RankingError::ZeroRank { node });
        }
        Ok(Self { ranks })
    }

    /// The trivial ranking: all `n` nodes in class 1.
    #[must_use]
    pub fn trivial(n: usize) -> Self {
        Self { ranks: vec![1; n] }
    }

    /// Number of nodes.
    #[must_use]
    pub fn len(&self) -> usize {
        self.ranks.len()
    }

    /// True when the ranking covers no nodes.
    #[must_use]
    pub fn is_empty(&self) -> bool {
        self.ranks.is_empty()
    }

    /// Rank class of `node`.
    #[must_use]
    pub fn rank(&self, node: u32) -> u32 {
        self.ranks[node as usize]
    }

    /// The underlying rank vector.
    #[must_use]
    pub fn ranks(&self) -> &[u32] {
        &self.ranks
    }

    /// Largest rank value in use (`R` for a normalized ranking); 0 when
    /// empty.
    #[must_use]
    pub fn max_rank(&self) -> u32 {
        self.ranks.iter().copied().max().unwrap_or(0)
    }

    /// Number of distinct classes actually occupied.
    #[must_use]
    pub fn num_classes(&self) -> u32 {
        if self.ranks.is_empty() {
            return 0;
        }
        let mut seen = vec![false; self.max_rank() as usize + 1];
        let mut count = 0;
        for &r in &self.ranks {
            if !seen[r as usize] {
                seen[r as usize] = true;
                count += 1;
            }
        }
        count
    }

    /// True iff the ranking uses exactly the contiguous classes `1..=R`.
    #[must_use]
    pub fn is_normalized(&self) -> bool {
        self.num_classes() == self.max_rank()
    }

    /// Order-preserving relabeling onto the contiguous classes `1..=R`.
    ///
    /// The relative order of every node pair is preserved; only gaps between
    /// occupied rank values are squeezed out. Idempotent.
    #[must_use]
    pub fn normalize(&self) -> Ranking {
        if self.ranks.is_empty() {
            return self.clone();
        }
        let max = self.max_rank() as usize;
        let mut used = vec![false; max + 1];
        for &r in &self.ranks {
            used[r as usize] = true;
        }
        let mut relabel = vec![0u32; max + 1];
        let mut next = 0;
        for (value, &u) in used.iter().enumerate() {
            if u {
                next += 1;
                relabel[value] = next;
            }
        }
        Ranking { ranks: self.ranks.iter().map(|&r| relabel[r as usize]).collect() }
    }

    /// Reverses the class order: rank `j` becomes `R - j + 1`.
    ///
    /// Expects a normalized ranking (`R` = [`Ranking::max_rank`]); on
    /// normalized input this is an involution.
    #[must_use]
    pub fn invert(&self) -> Ranking {
        let r = self.max_rank();
        Ranking { ranks: self.ranks.iter().map(|&x| r - x + 1).collect() }
    }

    /// Groups each run of `block` adjacent classes into one: classes
    /// `1..=block` map to 1, `block+1..=2*block` to 2, and so on.
    ///
    /// Expects a normalized ranking whose class count `R` is divisible by
    /// `block`; the result is normalized with `R / block` classes.
    ///
    /// # Errors
    ///
    /// [`RankingError::BlockDoesNotDivide`] when `block` is 0 or does not
    /// divide `R`.
    pub fn merge(&self, block: u32) -> Result<Ranking, RankingError> {
        let classes = self.max_rank();
        if block == 0 || classes % block != 0 {
            return Err(RankingError::BlockDoesNotDivide { block, classes });
        }
        Ok(Ranking { ranks: self.ranks.iter().map(|&r| (r - 1) / block + 1).collect() })
    }

    /// Class sizes `n_1..n_R` of a normalized ranking (indexed by
    /// `rank - 1`).
    #[must_use]
    pub fn class_sizes(&self) -> Vec<u64> {
        let mut sizes = vec![0u64; self.max_rank() as usize];
        for &r in &self.ranks {
            sizes[r as usize - 1] += 1;
        }
        sizes
    }

    /// Node ids of each class of a normalized ranking, ascending within each
    /// class.
    #[must_use]
    pub fn class_members(&self) -> Vec<Vec<u32>> {
        let mut members = vec![Vec::new(); self.max_rank() as usize];
        for (node, &r) in self.ranks.iter().enumerate() {
            members[r as usize - 1].push(node as u32);
        }
        members
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction_rejects_zero() {
        assert!(Ranking::new(vec![1, 2]).is_ok());
        assert_eq!(Ranking::new(vec![1, 0]), Err(RankingError::ZeroRank { node: 1 }));
    }

    #[test]
    fn normalize_squeezes_gaps() {
        let r = Ranking::new(vec![2, 5, 5]).unwrap();
        assert_eq!(r.normalize().ranks(), &[1, 2, 2]);
        let r = Ranking::new(vec![1, 2, 3]).unwrap();
        assert_eq!(r.normalize().ranks(), &[1, 2, 3]);
        let r = Ranking::new(vec![7]).unwrap();
        assert_eq!(r.normalize().ranks(), &[1]);
        // Idempotent.
        let r = Ranking::new(vec![9, 3, 9, 1]).unwrap();
        assert_eq!(r.normalize().normalize(), r.normalize());
    }

    #[test]
    fn invert_is_involution() {
        let r = Ranking::new(vec![1, 2, 3]).unwrap();
        assert_eq!(r.invert().ranks(), &[3, 2, 1]);
        assert_eq!(r.invert().invert(), r);
        let single = Ranking::new(vec![1, 1]).unwrap();
        assert_eq!(single.invert(), single);
    }

    #[test]
    fn merge_blocks() {
        let r = Ranking::new(vec![1, 2, 3, 4]).unwrap();
        assert_eq!(r.merge(2).unwrap().ranks(), &[1, 1, 2, 2]);
        assert_eq!(r.merge(1).unwrap(), r);
        let r3 = Ranking::new(vec![1, 2, 3]).unwrap();
        assert_eq!(r3.merge(2), Err(RankingError::BlockDoesNotDivide { block: 2, classes: 3 }));
    }

    #[test]
    fn class_queries() {
        let r = Ranking::new(vec![2, 1, 2, 2]).unwrap();
        assert_eq!(r.max_rank(), 2);
        assert_eq!(r.num_classes(), 2);
        assert!(r.is_normalized());
        assert_eq!(r.class_sizes(), vec![1, 3]);
        assert_eq!(r.class_members(), vec![vec![1], vec![0, 2, 3]]);
        let gappy = Ranking::new(vec![1, 3]).unwrap();
        assert!(!gappy.is_normalized());
    }
}
