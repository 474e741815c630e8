//! Multi-threaded drivers for the core kernels. Results do not depend on
//! the number of worker threads.

use rayon::prelude::*;
use rdet_core::dynamics::Enclosures;
use rdet_core::rqa::{
    enclosure_matrices, recurrence_matrix, stage_counts_rows, BitMatrix, LineHistogram, RecurrenceProfile,
    StageCounts, Window,
};
use num_rational::BigRational;

use crate::Result;

/// Rows per rayon task.
const ROW_BLOCK: usize = 256;

pub fn stage_counts_par(mat: &BitMatrix, w: Window) -> Result<StageCounts> {
    w.check(mat)?;
    let blocks: Vec<_> = (0..w.n).step_by(ROW_BLOCK).collect();
    let parts = blocks
        .par_iter()
        .map(|&b| stage_counts_rows(mat, w, b..(b + ROW_BLOCK).min(w.n)))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let mut total = StageCounts::zeros(w.m_max);
    for p in &parts {
        total.merge(p);
    }
    Ok(total)
}

fn counts_for(mat: &BitMatrix, n_values: &[usize], m_cap: usize) -> Result<Vec<StageCounts>> {
    n_values
        .iter()
        .map(|&n| stage_counts_par(mat, Window::new(0, n, m_cap)))
        .collect()
}

/// Profile of a float trajectory; `xs` must hold `max(n) + m_cap - 1` points.
pub fn float_profile(xs: &[f64], eps: f64, n_values: &[usize], m_cap: usize) -> Result<RecurrenceProfile> {
    let len = n_values.iter().copied().max().unwrap_or(0) + m_cap - 1;
    let xs = xs.get(..len).ok_or(rdet_core::Error::TrajectoryTooShort {
        needed: len,
        have: xs.len(),
    })?;
    let mat = recurrence_matrix(xs, eps);
    let counts = counts_for(&mat, n_values, m_cap)?;
    Ok(RecurrenceProfile::from_counts(eps, m_cap, n_values.to_vec(), counts)?)
}

/// Profile from exact enclosures; certain counts with possible counts as
/// the upper row.
pub fn enclosure_profile(
    enc: &Enclosures,
    eps: &BigRational,
    n_values: &[usize],
    m_cap: usize,
) -> Result<RecurrenceProfile> {
    let len = n_values.iter().copied().max().unwrap_or(0) + m_cap - 1;
    if enc.len() < len {
        return Err(rdet_core::Error::TrajectoryTooShort {
            needed: len,
            have: enc.len(),
        }
        .into());
    }
    let mut enc = enc.clone();
    enc.truncate(len);
    let mats = enclosure_matrices(&enc, eps);
    let certain = counts_for(&mats.certain, n_values, m_cap)?;
    let possible = counts_for(&mats.possible, n_values, m_cap)?;
    let mut p = RecurrenceProfile::from_counts(rdet_core::rational::to_f64(eps), m_cap, n_values.to_vec(), certain)?;
    p.upper = Some(possible);
    p.check_monotone()?;
    Ok(p)
}

/// Line histograms of the leading `n x n` blocks.
pub fn line_histograms(xs: &[f64], eps: f64, n_values: &[usize]) -> Vec<LineHistogram> {
    let n_max = n_values.iter().copied().max().unwrap_or(0);
    let mat = recurrence_matrix(&xs[..n_max], eps);
    n_values
        .par_iter()
        .map(|&n| LineHistogram::from_matrix(&mat, n))
        .collect()
}
