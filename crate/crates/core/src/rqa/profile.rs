//! Correlation-sum profiles over grids of `m` and `n`, and the determinism
//! summaries built from them.

use alloc::format;
use alloc::vec::Vec;
use core::ops::Range;

use super::kernel::{stage_counts, StageCounts, Window};
use super::lines::LineHistogram;
use super::matrix::{BitMatrix, EnclosureMatrices};
use crate::{Error, Result};

/// Absolute tolerance for comparisons between derived floating values.
pub const FLOAT_TOL: f64 = 1e-12;

/// Indices of the last `ceil(len / 2)` grid entries.
pub fn tail_range(len: usize) -> Range<usize> {
    len - len.div_ceil(2)..len
}

/// Geometric grid `start, 2 start, ...` capped at `end` (always included).
pub fn geometric_grid(start: usize, end: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut n = start.max(1);
    while n < end {
        out.push(n);
        n *= 2;
    }
    out.push(end);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct RecurrenceProfile {
    pub eps: f64,
    pub m_cap: usize,
    pub n_values: Vec<usize>,
    /// One entry per `n`; for enclosure input these are the certain counts.
    pub counts: Vec<StageCounts>,
    /// Possible counts, present for enclosure input.
    pub upper: Option<Vec<StageCounts>>,
}

impl RecurrenceProfile {
    pub fn from_counts(eps: f64, m_cap: usize, n_values: Vec<usize>, counts: Vec<StageCounts>) -> Result<Self> {
        let p = RecurrenceProfile {
            eps,
            m_cap,
            n_values,
            counts,
            upper: None,
        };
        p.check_monotone()?;
        Ok(p)
    }

    pub fn from_matrix(mat: &BitMatrix, eps: f64, n_values: &[usize], m_cap: usize) -> Result<Self> {
        let counts = n_values
            .iter()
            .map(|&n| stage_counts(mat, Window::new(0, n, m_cap)))
            .collect::<Result<Vec<_>>>()?;
        Self::from_counts(eps, m_cap, n_values.to_vec(), counts)
    }

    pub fn from_enclosures(
        mats: &EnclosureMatrices,
        eps: f64,
        n_values: &[usize],
        m_cap: usize,
    ) -> Result<Self> {
        let mut p = Self::from_matrix(&mats.certain, eps, n_values, m_cap)?;
        let upper = n_values
            .iter()
            .map(|&n| stage_counts(&mats.possible, Window::new(0, n, m_cap)))
            .collect::<Result<Vec<_>>>()?;
        p.upper = Some(upper);
        Ok(p)
    }

    pub fn count(&self, ni: usize, m: usize) -> u64 {
        self.counts[ni].extended[m - 1]
    }

    /// `C_m(x, n, eps)`.
    pub fn corr(&self, ni: usize, m: usize) -> f64 {
        let n = self.n_values[ni] as f64;
        self.count(ni, m) as f64 / (n * n)
    }

    /// `C_m / C_1`.
    pub fn rdet(&self, ni: usize, m: usize) -> f64 {
        self.count(ni, m) as f64 / self.count(ni, 1) as f64
    }

    /// Determinism of the finite plot: both counts restricted to the window.
    pub fn windowed_rdet(&self, ni: usize, m: usize) -> f64 {
        let w = &self.counts[ni].windowed;
        w[m - 1] as f64 / w[0] as f64
    }

    /// Certain-versus-possible gap in pair counts, zero for float input.
    pub fn undecided(&self, ni: usize, m: usize) -> u64 {
        self.upper
            .as_ref()
            .map_or(0, |u| u[ni].extended[m - 1] - self.count(ni, m))
    }

    pub fn check_monotone(&self) -> Result<()> {
        for (ni, c) in self.counts.iter().enumerate() {
            if c.extended.len() != self.m_cap {
                return Err(Error::Consistency(format!(
                    "count row for n={} has {} stages, expected {}",
                    self.n_values[ni],
                    c.extended.len(),
                    self.m_cap
                )));
            }
            for row in [&c.extended, &c.windowed] {
                if let Some(m) = row.windows(2).position(|w| w[1] > w[0]) {
                    return Err(Error::Consistency(format!(
                        "pair count increases from m={} to m={} at n={}",
                        m + 1,
                        m + 2,
                        self.n_values[ni]
                    )));
                }
            }
        }
        Ok(())
    }

    /// First `m` from which every count equals its value at `m_cap`.
    pub fn stabilized_at(&self) -> usize {
        let mut at = 1;
        for c in &self.counts {
            let last = c.extended[self.m_cap - 1];
            let first = c.extended.iter().position(|&v| v == last).unwrap_or(0) + 1;
            at = at.max(first);
        }
        at
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TailStats {
    pub m: usize,
    pub c_min: f64,
    pub c_max: f64,
    pub rdet_min: f64,
    pub rdet_max: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DeterminismReport {
    pub eps: f64,
    pub m_cap: usize,
    pub n_values: Vec<usize>,
    /// `[n][m - 1]`.
    pub corr: Vec<Vec<f64>>,
    pub rdet: Vec<Vec<f64>>,
    pub windowed_rdet: Vec<Vec<f64>>,
    /// Line-based DET for `m < m_cap`, when line histograms were supplied.
    pub rqa_det: Option<Vec<Vec<f64>>>,
    /// Largest `|DET_m - (m wrdet_m - (m-1) wrdet_{m+1})|`.
    pub det_identity_error: Option<f64>,
    pub tails: Vec<TailStats>,
    pub monotone_ok: bool,
    pub sandwich_ok: bool,
    pub stabilized_at: usize,
    /// Total undecided pair decisions at `m = 1` over the largest `n`.
    pub undecided: u64,
}

impl DeterminismReport {
    pub fn new(profile: &RecurrenceProfile, lines: Option<&[LineHistogram]>) -> Result<Self> {
        profile.check_monotone()?;
        let m_cap = profile.m_cap;
        let nn = profile.n_values.len();
        let grid = |f: &dyn Fn(usize, usize) -> f64| -> Vec<Vec<f64>> {
            (0..nn).map(|ni| (1..=m_cap).map(|m| f(ni, m)).collect()).collect()
        };
        let corr = grid(&|ni, m| profile.corr(ni, m));
        let rdet = grid(&|ni, m| profile.rdet(ni, m));
        let windowed_rdet = grid(&|ni, m| profile.windowed_rdet(ni, m));

        let (rqa_det, det_identity_error) = match lines {
            Some(lines) => {
                if lines.len() != nn {
                    return Err(Error::Parameter("one line histogram per n expected".into()));
                }
                let mut err: f64 = 0.0;
                let mut table = Vec::with_capacity(nn);
                for (ni, h) in lines.iter().enumerate() {
                    let mut row = Vec::new();
                    for m in 1..m_cap {
                        let det = h.det(m);
                        let w = &windowed_rdet[ni];
                        let via_rdet = m as f64 * w[m - 1] - (m as f64 - 1.0) * w[m];
                        err = err.max((det - via_rdet).abs());
                        row.push(det);
                    }
                    table.push(row);
                }
                (Some(table), Some(err))
            }
            None => (None, None),
        };

        let tail = tail_range(nn);
        let tails: Vec<TailStats> = (1..=m_cap)
            .map(|m| {
                let pick = |t: &Vec<Vec<f64>>| -> (f64, f64) {
                    tail.clone()
                        .map(|ni| t[ni][m - 1])
                        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| (a.min(v), b.max(v)))
                };
                let (c_min, c_max) = pick(&corr);
                let (rdet_min, rdet_max) = pick(&rdet);
                TailStats {
                    m,
                    c_min,
                    c_max,
                    rdet_min,
                    rdet_max,
                }
            })
            .collect();

        let monotone_ok = rdet
            .iter()
            .all(|row| row.windows(2).all(|w| w[1] <= w[0] + FLOAT_TOL));
        let first = &tails[0];
        let sandwich_ok = tails.iter().all(|s| {
            s.c_min / first.c_max <= s.rdet_min + FLOAT_TOL
                && s.rdet_min <= s.rdet_max
                && s.rdet_max <= s.c_max / first.c_min + FLOAT_TOL
        });
        let undecided = (1..=1).map(|m| profile.undecided(nn - 1, m)).sum();

        Ok(DeterminismReport {
            eps: profile.eps,
            m_cap,
            n_values: profile.n_values.clone(),
            corr,
            rdet,
            windowed_rdet,
            rqa_det,
            det_identity_error,
            tails,
            monotone_ok,
            sandwich_ok,
            stabilized_at: profile.stabilized_at(),
            undecided,
        })
    }

    pub fn tail(&self, m: usize) -> &TailStats {
        &self.tails[m - 1]
    }
}

/// Point-wise check that `C_m` does not decrease when `eps` grows. Profiles
/// must share the `n` grid and `m` range and be listed by increasing `eps`.
pub fn monotone_in_eps(profiles: &[&RecurrenceProfile]) -> bool {
    profiles.windows(2).all(|w| {
        w[0].eps <= w[1].eps
            && w[0].n_values == w[1].n_values
            && w[0]
                .counts
                .iter()
                .zip(&w[1].counts)
                .all(|(a, b)| a.extended.iter().zip(&b.extended).all(|(x, y)| x <= y))
    })
}
