//! Bit-parallel correlation counts.
//!
//! For a row `i` the accumulator starts as `R(i, start..start+n)`; stage `k`
//! ANDs in row `i+k` shifted left by `k` columns, so after stage `k` bit `j`
//! is set iff `R(i+l, j+l) = 1` for all `l <= k`. Popcounts after each stage
//! give the pair counts for `m = 1, 2, ...` in one pass.
//!
//! Two counts come out of the same pass:
//!
//! * `extended`: all `(i, j)` in the window, reading up to `m - 1` points past
//!   it (the matrix must cover `n + m_max - 1` indices);
//! * `windowed`: only segments lying wholly inside the `n x n` window.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::ops::Range;

use super::matrix::BitMatrix;
use crate::{Error, Result};

/// Pair counts indexed by `m - 1`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StageCounts {
    pub extended: Vec<u64>,
    pub windowed: Vec<u64>,
}

impl StageCounts {
    pub fn zeros(m_max: usize) -> Self {
        StageCounts {
            extended: vec![0; m_max],
            windowed: vec![0; m_max],
        }
    }

    pub fn merge(&mut self, other: &StageCounts) {
        for (a, b) in self.extended.iter_mut().zip(&other.extended) {
            *a += b;
        }
        for (a, b) in self.windowed.iter_mut().zip(&other.windowed) {
            *a += b;
        }
    }

    pub fn m_max(&self) -> usize {
        self.extended.len()
    }
}

/// Which square of the matrix a count runs over.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub start: usize,
    pub n: usize,
    pub m_max: usize,
}

impl Window {
    pub fn new(start: usize, n: usize, m_max: usize) -> Self {
        Window { start, n, m_max }
    }

    pub fn check(&self, mat: &BitMatrix) -> Result<()> {
        if self.n == 0 || self.m_max == 0 {
            return Err(Error::Parameter(format!(
                "window needs n >= 1 and m >= 1, got n={} m={}",
                self.n, self.m_max
            )));
        }
        let needed = self.start + self.n + self.m_max - 1;
        if needed > mat.n() {
            return Err(Error::TrajectoryTooShort {
                needed,
                have: mat.n(),
            });
        }
        Ok(())
    }
}

/// Bits `[from, from + 64)` of a packed row.
#[inline]
fn word_at(row: &[u64], from: usize) -> u64 {
    let wi = from / 64;
    let off = from % 64;
    let lo = row.get(wi).copied().unwrap_or(0) >> off;
    if off == 0 {
        lo
    } else {
        lo | row.get(wi + 1).copied().unwrap_or(0) << (64 - off)
    }
}

#[inline]
fn low_mask(bits: usize) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Counts for window rows `rows` (relative to `w.start`).
pub fn stage_counts_rows(mat: &BitMatrix, w: Window, rows: Range<usize>) -> Result<StageCounts> {
    w.check(mat)?;
    let n = w.n;
    let words = n.div_ceil(64);
    let tail = low_mask(n - (words - 1) * 64);
    let mut out = StageCounts::zeros(w.m_max);
    let mut acc = vec![0u64; words];
    for i in rows.start..rows.end.min(n) {
        let row = mat.row(w.start + i);
        for (k, slot) in acc.iter_mut().enumerate() {
            *slot = word_at(row, w.start + 64 * k);
        }
        acc[words - 1] &= tail;
        let (mut lo, mut hi) = (0usize, words);
        for stage in 0..w.m_max {
            if stage > 0 {
                let row = mat.row(w.start + i + stage);
                let base = w.start + stage;
                let (mut new_lo, mut new_hi) = (hi, lo);
                for k in lo..hi {
                    acc[k] &= word_at(row, base + 64 * k);
                    if acc[k] != 0 {
                        new_lo = new_lo.min(k);
                        new_hi = k + 1;
                    }
                }
                if new_lo >= new_hi {
                    break;
                }
                lo = new_lo;
                hi = new_hi;
            }
            let mut total = 0u64;
            for &a in &acc[lo..hi] {
                total += a.count_ones() as u64;
            }
            out.extended[stage] += total;
            if i + stage < n {
                let limit = n - stage;
                let full = limit / 64;
                let mut win = 0u64;
                for &a in &acc[lo.min(full)..hi.min(full)] {
                    win += a.count_ones() as u64;
                }
                if full < words && full >= lo && full < hi && !limit.is_multiple_of(64) {
                    win += (acc[full] & low_mask(limit % 64)).count_ones() as u64;
                }
                out.windowed[stage] += win;
            }
        }
    }
    Ok(out)
}

pub fn stage_counts(mat: &BitMatrix, w: Window) -> Result<StageCounts> {
    stage_counts_rows(mat, w, 0..w.n)
}
