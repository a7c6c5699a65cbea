//! Dense matrices over the two-element field, rows packed into `u64` words.

use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct F2Matrix {
    rows: usize,
    cols: usize,
    words_per_row: usize,
    bits: Vec<u64>,
}

impl F2Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let words_per_row = cols.div_ceil(64);
        F2Matrix {
            rows,
            cols,
            words_per_row,
            bits: vec![0; rows * words_per_row],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds a matrix from boolean rows of equal length `cols`.
    pub fn from_rows(cols: usize, rows: &[Vec<bool>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged F2 matrix row");
            for (j, &b) in row.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols);
        self.bits[i * self.words_per_row + j / 64] >> (j % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols);
        let w = &mut self.bits[i * self.words_per_row + j / 64];
        if value {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn row_sum(&self, i: usize) -> bool {
        let row = &self.bits[i * self.words_per_row..(i + 1) * self.words_per_row];
        row.iter().map(|w| w.count_ones()).sum::<u32>() % 2 == 1
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Rank by Gaussian elimination on a local copy.
    pub fn rank(&self) -> usize {
        let w = self.words_per_row;
        if w == 0 {
            return 0;
        }
        let mut work: Vec<Vec<u64>> = self.bits.chunks(w).map(|r| r.to_vec()).collect();
        let mut rank = 0;
        for col in 0..self.cols {
            let (word, bit) = (col / 64, 1u64 << (col % 64));
            let Some(pivot) = (rank..work.len()).find(|&r| work[r][word] & bit != 0) else {
                continue;
            };
            work.swap(rank, pivot);
            let pivot_row = work[rank].clone();
            for (r, row) in work.iter_mut().enumerate() {
                if r != rank && row[word] & bit != 0 {
                    for (a, b) in row.iter_mut().zip(&pivot_row) {
                        *a ^= b;
                    }
                }
            }
            rank += 1;
        }
        rank
    }
}

/// Rank over F_2.
pub fn f2_rank(m: &F2Matrix) -> usize {
    m.rank()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn trivial_ranks() {
        assert_eq!(f2_rank(&F2Matrix::zeros(3, 5)), 0);
        assert_eq!(f2_rank(&F2Matrix::zeros(0, 0)), 0);
        for n in [1, 7, 64, 65, 130] {
            assert_eq!(f2_rank(&F2Matrix::identity(n)), n);
        }
        let m = F2Matrix::from_rows(3, &[vec![true, true, false], vec![false, true, true], vec![true, false, true]]);
        assert_eq!(m.rank(), 2);
    }

    fn brute_rank(rows: &[Vec<bool>]) -> usize {
        // Size of the row space by enumerating all subset sums.
        let n = rows.len();
        let cols = rows.first().map_or(0, |r| r.len());
        let mut span = std::collections::HashSet::new();
        for mask in 0u32..(1 << n) {
            let mut v = vec![false; cols];
            for (i, row) in rows.iter().enumerate() {
                if mask >> i & 1 == 1 {
                    for (a, &b) in v.iter_mut().zip(row) {
                        *a ^= b;
                    }
                }
            }
            span.insert(v);
        }
        span.len().trailing_zeros() as usize
    }

    proptest! {
        #[test]
        fn rank_matches_span_size(rows in proptest::collection::vec(proptest::collection::vec(any::<bool>(), 6), 0..8)) {
            let m = F2Matrix::from_rows(6, &rows);
            prop_assert_eq!(m.rank(), brute_rank(&rows));
            prop_assert_eq!(m.rank(), m.transpose().rank());
        }
    }
}
