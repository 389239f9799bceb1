//! Ranking-comparison measures: adjusted Rand index and the
//! planted-vs-inferred confusion matrix.

use alloc::vec::Vec;

use crate::ranking::Ranking;

/// Errors produced by metric computations.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MetricsError {
    /// The two rankings must cover the same node set.
    #[error("rankings cover different node counts: {left} vs {right}")]
    LengthMismatch {
        /// Length of the first ranking.
        left: usize,
        /// Length of the second ranking.
        right: usize,
    },
}

/// `x` choose 2, exactly (0 for `x < 2`, e.g. empty rank classes).
fn comb2(x: u64) -> u128 {
    let x = x as u128;
    x * x.saturating_sub(1) / 2
}

/// Sparse contingency table between two rankings: cell `(i, j)` counts the
/// nodes with rank `i` in the first ranking and rank `j` in the second.
///
/// Cells are sorted by `(i, j)` (1-based ranks). Sparse storage keeps the
/// table affordable when either ranking has one class per node.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfusionMatrix {
    rows: u32,
    cols: u32,
    cells: Vec<((u32, u32), u64)>,
    total: u64,
}

impl ConfusionMatrix {
    /// Number of row classes (largest rank of the first ranking).
    #[must_use]
    pub fn rows(&self) -> u32 {
        self.rows
    }

    /// Number of column classes (largest rank of the second ranking).
    #[must_use]
    pub fn cols(&self) -> u32 {
        self.cols
    }

    /// Total node count (sum of all entries).
    #[must_use]
    pub fn total(&self) -> u64 {
        self.total
    }

    /// The count in cell `(i, j)` for 1-based ranks.
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

    /// Dense row-major matrix (row `i-1`, column `j-1`); quadratic in the
    /// class counts, intended for small matrices.
    #[must_use]
    pub fn to_dense(&self) -> Vec<Vec<u64>> {
        let mut dense = alloc::vec![alloc::vec![0u64; self.cols as usize]; self.rows as usize];
        for &((i, j), c) in &self.cells {
            dense[i as usize - 1][j as usize - 1] = c;
        }
        dense
    }

    /// Row sums (size of each class of the first ranking), 1-based rank
    /// `i` at index `i-1`.
    #[must_use]
    pub fn row_sums(&self) -> Vec<u64> {
        let mut sums = alloc::vec![0u64; self.rows as usize];
        for &((i, _), c) in &self.cells {
            sums[i as usize - 1] += c;
        }
        sums
    }

    /// Column sums (size of each class of the second ranking).
    #[must_use]
    pub fn col_sums(&self) -> Vec<u64> {
        let mut sums = alloc::vec![0u64; self.cols as usize];
        for &((_, j), c) in &self.cells {
            sums[j as usize - 1] += c;
        }
        sums
    }
}

/// Builds the contingency table between two rankings over the same nodes.
///
/// # Errors
///
/// [`MetricsError::LengthMismatch`] if the rankings differ in length.
pub fn confusion_matrix(
    planted: &Ranking,
    inferred: &Ranking,
) -> Result<ConfusionMatrix, MetricsError> {
    if planted.len() != inferred.len() {
        return Err(MetricsError::LengthMismatch { left: planted.len(), right: inferred.len() });
    }
    let mut cells: Vec<((u32, u32), u64)> =
        planted.ranks().iter().zip(inferred.ranks()).map(|(&i, &j)| ((i, j), 1)).collect();
    cells.sort_unstable_by_key(|&(k, _)| k);
    cells.dedup_by(|a, b| {
        if a.0 == b.0 {
            b.1 += a.1;
            true
        } else {
            false
        }
    });
    Ok(ConfusionMatrix {
        rows: planted.max_rank(),
        cols: inferred.max_rank(),
        cells,
        total: planted.len() as u64,
    })
}

/// Adjusted Rand index (Hubert–Arabie) between two partitions of the same
/// node set: `(Index - Expected) / (Max - Expected)` over node-pair counts.
///
/// 1 for identical partitions, about 0 for independent ones; invariant
/// under relabeling of either argument's classes, so a ranking and its
/// inversion score 1. The degenerate case where the correction denominator
/// vanishes (both partitions trivial, or both all-singletons) is defined as
/// 1: the partitions are then necessarily identical.
///
/// Pair counts use exact 128-bit integer arithmetic; only the final ratio
/// is floating point.
///
/// # Errors
///
/// [`MetricsError::LengthMismatch`] if the rankings differ in length.
pub fn adjusted_rand_index(r1: &Ranking, r2: &Ranking) -> Result<f64, MetricsError> {
    let table = confusion_matrix(r1, r2)?;
    let index: u128 = table.cells().iter().map(|&(_, c)| comb2(c)).sum();
    let sum_rows: u128 = table.row_sums().iter().map(|&c| comb2(c)).sum();
    let sum_cols: u128 = table.col_sums().iter().map(|&c| comb2(c)).sum();
    let pairs = comb2(table.total());
    if pairs == 0 {
        // 0 or 1 nodes: the partitions coincide trivially.
        return Ok(1.0);
    }
    let expected = (sum_rows as f64) * (sum_cols as f64) / (pairs as f64);
    let max = 0.5 * (sum_rows as f64 + sum_cols as f64);
    let denom = max - expected;
    if denom == 0.0 {
        // Both trivial or both all-singletons: identical partitions.
        return Ok(1.0);
    }
    Ok((index as f64 - expected) / denom)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn rk(v: &[u32]) -> Ranking {
        Ranking::new(v.to_vec()).unwrap()
    }

    #[test]
    fn identical_partitions_score_one() {
        let r = rk(&[1, 1, 2, 2]);
        assert_eq!(adjusted_rand_index(&r, &r).unwrap(), 1.0);
    }

    #[test]
    fn inverted_ranking_scores_one() {
        let r = rk(&[1, 2, 2, 3, 3, 3]);
        assert_eq!(adjusted_rand_index(&r, &r.invert()).unwrap(), 1.0);
    }

    #[test]
    fn crossed_partition_hand_value() {
        // Contingency is all-ones 2x2: Index 0, Expected 2/3, Max 2.
        let a = rk(&[1, 1, 2, 2]);
        let b = rk(&[1, 2, 1, 2]);
        let ari = adjusted_rand_index(&a, &b).unwrap();
        assert!((ari - (-0.5)).abs() < 1e-15);
    }

    #[test]
    fn trivial_against_structured_scores_zero() {
        let a = rk(&[1, 1, 2, 2, 3]);
        let b = Ranking::trivial(5);
        assert_eq!(adjusted_rand_index(&a, &b).unwrap(), 0.0);
        assert_eq!(adjusted_rand_index(&b, &a).unwrap(), 0.0);
    }

    #[test]
    fn degenerate_pairs_score_one() {
        let singletons = rk(&[1, 2, 3]);
        assert_eq!(adjusted_rand_index(&singletons, &singletons.invert()).unwrap(), 1.0);
        let trivial = Ranking::trivial(3);
        assert_eq!(adjusted_rand_index(&trivial, &trivial).unwrap(), 1.0);
        let one = rk(&[1]);
        assert_eq!(adjusted_rand_index(&one, &one).unwrap(), 1.0);
    }

    #[test]
    fn empty_rank_classes_are_harmless() {
        // Rank 1 is unused on the left; marginals then contain a zero
        // class size, which must contribute zero pairs (not underflow).
        let gappy = rk(&[2, 2, 3]);
        let dense = rk(&[1, 1, 2]);
        assert_eq!(adjusted_rand_index(&gappy, &dense).unwrap(), 1.0);
        assert_eq!(adjusted_rand_index(&dense, &gappy).unwrap(), 1.0);
        let lone = rk(&[5]);
        assert_eq!(adjusted_rand_index(&lone, &lone).unwrap(), 1.0);
    }

    #[test]
    fn symmetry_and_relabel_invariance() {
        let a = rk(&[1, 1, 2, 3, 3, 2, 1]);
        let b = rk(&[2, 2, 1, 1, 3, 3, 3]);
        let ab = adjusted_rand_index(&a, &b).unwrap();
        let ba = adjusted_rand_index(&b, &a).unwrap();
        assert_eq!(ab, ba);
        // Relabel b's classes 1<->3.
        let b_relab = rk(&[2, 2, 3, 3, 1, 1, 1]);
        let ab2 = adjusted_rand_index(&a, &b_relab).unwrap();
        assert_eq!(ab, ab2);
    }

    #[test]
    fn confusion_matrix_shapes() {
        let planted = rk(&[1, 1, 2, 2]);
        let same = confusion_matrix(&planted, &planted).unwrap();
        assert_eq!(same.to_dense(), vec![vec![2, 0], vec![0, 2]]);
        let trivial = Ranking::trivial(4);
        let col = confusion_matrix(&planted, &trivial).unwrap();
        assert_eq!(col.to_dense(), vec![vec![2], vec![2]]);
        let anti = confusion_matrix(&rk(&[1, 2]), &rk(&[2, 1])).unwrap();
        assert_eq!(anti.to_dense(), vec![vec![0, 1], vec![1, 0]]);
        assert_eq!(anti.total(), 2);
        assert_eq!(col.row_sums(), vec![2, 2]);
        assert_eq!(col.col_sums(), vec![4]);
    }

    #[test]
    fn mismatch_is_error() {
        let a = rk(&[1, 2]);
        let b = rk(&[1, 2, 3]);
        assert_eq!(
            adjusted_rand_index(&a, &b),
            Err(MetricsError::LengthMismatch { left: 2, right: 3 })
        );
    }
}
