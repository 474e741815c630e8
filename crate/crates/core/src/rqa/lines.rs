//! Diagonal line structure of a finite recurrence plot.

use alloc::collections::BTreeMap;

use super::matrix::BitMatrix;

/// `P(l)`: number of maximal diagonal runs of ones of length `l` in the
/// leading `n x n` block, main diagonal included.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LineHistogram {
    pub n: usize,
    pub lengths: BTreeMap<usize, u64>,
}

impl LineHistogram {
    pub fn from_matrix(mat: &BitMatrix, n: usize) -> Self {
        assert!(n <= mat.n());
        let mut lengths = BTreeMap::new();
        let mut record = |len: usize| {
            if len > 0 {
                *lengths.entry(len).or_insert(0u64) += 1;
            }
        };
        for d in 0..n {
            // upper diagonal (i, i + d) and, for d > 0, lower (i + d, i)
            for lower in [false, true] {
                if lower && d == 0 {
                    continue;
                }
                let mut run = 0usize;
                for i in 0..n - d {
                    let set = if lower { mat.get(i + d, i) } else { mat.get(i, i + d) };
                    if set {
                        run += 1;
                    } else {
                        record(run);
                        run = 0;
                    }
                }
                record(run);
            }
        }
        LineHistogram { n, lengths }
    }

    /// `sum_{l >= m} l P(l)`.
    pub fn points_on_lines(&self, m: usize) -> u64 {
        self.lengths
            .range(m.max(1)..)
            .map(|(&l, &c)| l as u64 * c)
            .sum()
    }

    /// Every recurrence point lies on exactly one maximal line.
    pub fn recurrence_points(&self) -> u64 {
        self.points_on_lines(1)
    }

    /// Fraction of recurrence points on diagonal lines of length `>= m`.
    pub fn det(&self, m: usize) -> f64 {
        let total = self.recurrence_points();
        if total == 0 {
            return 0.0;
        }
        self.points_on_lines(m) as f64 / total as f64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_block_lines() {
        let mat = BitMatrix::from_fn(5, |_, _| true);
        let h = LineHistogram::from_matrix(&mat, 5);
        assert_eq!(h.recurrence_points(), 25);
        assert_eq!(h.lengths[&5], 1);
        assert_eq!(h.lengths[&1], 2);
        assert_eq!(h.det(1), 1.0);
        assert_eq!(h.det(5), 5.0 / 25.0);
    }

    #[test]
    fn broken_diagonal() {
        // identity with one hole at (2, 2)
        let mat = BitMatrix::from_fn(6, |i, j| i == j && i != 2);
        let h = LineHistogram::from_matrix(&mat, 6);
        assert_eq!(h.lengths.get(&2), Some(&1));
        assert_eq!(h.lengths.get(&3), Some(&1));
        assert_eq!(h.recurrence_points(), 5);
    }
}
