//! Recurrence plots, correlation sums and determinism.

pub mod kernel;
pub mod lines;
pub mod matrix;
pub mod naive;
pub mod profile;
pub mod shift;

pub use kernel::{stage_counts, stage_counts_rows, StageCounts, Window};
pub use lines::LineHistogram;
pub use matrix::{enclosure_matrices, recurrence_matrix, BitMatrix, EnclosureMatrices};
pub use profile::{DeterminismReport, RecurrenceProfile, TailStats};
pub use shift::{shift_bound, ShiftCheck};

use crate::Result;

fn counts(xs: &[f64], n: usize, m: usize, eps: f64) -> Result<StageCounts> {
    let w = Window::new(0, n, m);
    if xs.len() < n + m - 1 {
        return Err(crate::Error::TrajectoryTooShort {
            needed: n + m - 1,
            have: xs.len(),
        });
    }
    let mat = recurrence_matrix(&xs[..n + m - 1], eps);
    stage_counts(&mat, w)
}

/// `C_m(x, n, eps)`; reads `n + m - 1` points.
pub fn correlation_sum(xs: &[f64], n: usize, m: usize, eps: f64) -> Result<f64> {
    let c = counts(xs, n, m, eps)?;
    Ok(c.extended[m - 1] as f64 / (n as f64 * n as f64))
}

/// `C_m / C_1` over the first `n` starting points.
pub fn rdet(xs: &[f64], n: usize, m: usize, eps: f64) -> Result<f64> {
    let c = counts(xs, n, m, eps)?;
    Ok(c.extended[m - 1] as f64 / c.extended[0] as f64)
}

/// Line-based DET of the `n x n` plot with minimum length `m`.
pub fn rqa_det(xs: &[f64], n: usize, m: usize, eps: f64) -> Result<f64> {
    if xs.len() < n {
        return Err(crate::Error::TrajectoryTooShort {
            needed: n,
            have: xs.len(),
        });
    }
    let mat = recurrence_matrix(&xs[..n], eps);
    Ok(LineHistogram::from_matrix(&mat, n).det(m))
}
