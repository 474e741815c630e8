//! Effect of discarding a transient on correlation counts.
//!
//! Counting over `[h, n + h)^2` instead of `[0, n + h)^2` drops exactly the
//! pairs with a coordinate below `h`, at most `2hn + h^2` of them.

use super::kernel::{stage_counts, Window};
use super::matrix::BitMatrix;
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftCheck {
    pub h: usize,
    pub n: usize,
    pub m: usize,
    /// Count over `[0, n + h)^2`.
    pub full: u64,
    /// Count over `[h, n + h)^2`.
    pub shifted: u64,
    pub slack: u64,
}

impl ShiftCheck {
    pub fn holds(&self) -> bool {
        self.shifted <= self.full && self.full <= self.shifted + self.slack
    }

    /// `|C_m(shifted) - C_m(full)|` with both normalised by their own size.
    pub fn corr_gap(&self) -> f64 {
        let big = (self.n + self.h) as f64;
        let small = self.n as f64;
        let a = self.full as f64 / (big * big);
        let b = self.shifted as f64 / (small * small);
        (a - b).abs()
    }
}

/// Checks the shift bound for every `m <= m_max`. The matrix must cover
/// `h + n + m_max - 1` points.
pub fn shift_bound(mat: &BitMatrix, h: usize, n: usize, m_max: usize) -> Result<alloc::vec::Vec<ShiftCheck>> {
    let full = stage_counts(mat, Window::new(0, n + h, m_max))?;
    let shifted = stage_counts(mat, Window::new(h, n, m_max))?;
    let (h64, n64) = (h as u64, n as u64);
    Ok((1..=m_max)
        .map(|m| ShiftCheck {
            h,
            n,
            m,
            full: full.extended[m - 1],
            shifted: shifted.extended[m - 1],
            slack: 2 * h64 * n64 + h64 * h64,
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rqa::matrix::recurrence_matrix;

    #[test]
    fn bound_holds_and_is_tight_for_constant_orbit() {
        let mat = recurrence_matrix(&[0.3; 40], 0.0);
        let checks = shift_bound(&mat, 5, 30, 4).unwrap();
        for c in &checks {
            assert!(c.holds());
            assert_eq!(c.full - c.shifted, c.slack);
        }
    }

    #[test]
    fn bound_holds_on_mixed_orbit() {
        let xs: alloc::vec::Vec<f64> = (0..120).map(|i| ((i * i) % 17) as f64 / 17.0).collect();
        let mat = recurrence_matrix(&xs, 0.06);
        for h in [0, 1, 7, 20] {
            for c in shift_bound(&mat, h, 90, 6).unwrap() {
                assert!(c.holds(), "{c:?}");
            }
        }
    }
}
