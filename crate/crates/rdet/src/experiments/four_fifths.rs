//! Upper bound 4/5 on full-period determinism at the extreme-grandchild
//! scales of a solenoidal system.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use rdet_core::bounds::{count_n, count_n_circ, epsilon_t};
use rdet_core::dynamics::{MapSpec, DEFAULT_EVAL_DEPTH};
use rdet_core::rational::{format_fraction, ratio, to_f64};
use rdet_core::rqa::profile::geometric_grid;
use rdet_core::rqa::DeterminismReport;
use rdet_core::IntervalSystem;
use serde::Serialize;

use crate::compute::float_profile;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FourFifthsOptions {
    /// Also estimate determinism from a float orbit.
    pub trajectory: bool,
    pub x0: f64,
    /// Allowed excess of the orbit estimate over 4/5.
    pub tolerance: f64,
    pub min_n: usize,
}

impl Default for FourFifthsOptions {
    fn default() -> Self {
        FourFifthsOptions {
            trajectory: true,
            x0: 0.25,
            tolerance: 0.02,
            min_n: 4096,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FourFifthsRow {
    pub t: u32,
    pub eps: String,
    pub eps_value: f64,
    /// `eps` is `eps_{t-2}` and no larger scale `eps_s`, `s <= t-2`, is smaller.
    pub in_hypothesis: bool,
    pub n_inf: u64,
    pub n_circ_1: u64,
    /// `N_inf <= 2^(t+1)`.
    pub cap_ok: bool,
    /// `N°_1 - N_inf >= 2^(t-1)`.
    pub margin_ok: bool,
    /// `N_inf / N°_1`.
    pub bound: String,
    pub bound_ok: bool,
    pub orbit_n: Option<usize>,
    pub orbit_m: Option<usize>,
    pub orbit_rdet_upper: Option<f64>,
    pub orbit_ok: Option<bool>,
}

impl FourFifthsRow {
    pub fn passed(&self) -> bool {
        self.cap_ok && self.margin_ok && self.bound_ok && self.orbit_ok.unwrap_or(true)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FourFifthsReport {
    pub system: String,
    pub t_range: (u32, u32),
    pub options: FourFifthsOptions,
    pub rows: Vec<FourFifthsRow>,
    /// Rows whose hypothesis failed; reported, not counted.
    pub out_of_hypothesis: Vec<u32>,
    pub passed: bool,
}

/// Checks one level at `eps`; `in_hypothesis` is decided against the
/// extreme-grandchild scales of the system.
pub fn four_fifths_row(sys: &Arc<IntervalSystem>, t: u32, eps: &BigRational, opts: &FourFifthsOptions) -> Result<FourFifthsRow> {
    if t < 2 {
        return Err(Error::Usage(format!("level {t} too small; need t >= 2")));
    }
    let scales = (0..=t - 2)
        .map(|s| epsilon_t(sys, s).map(|g| g.value))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let last = scales.last().unwrap();
    let in_hypothesis = eps == last && scales.iter().all(|e| e >= last);

    let n_inf = count_n(sys, t, eps, None)?;
    let n_circ_1 = count_n_circ(sys, t, eps, Some(1))?;
    let cap_ok = n_inf <= 2u64 << t;
    let margin_ok = n_circ_1 as i128 - n_inf as i128 >= 1i128 << (t - 1);
    let bound = if n_circ_1 == 0 {
        BigRational::from_integer(1.into())
    } else {
        BigRational::new(BigInt::from(n_inf), BigInt::from(n_circ_1))
    };
    let bound_ok = bound <= ratio(4, 5);

    let mut row = FourFifthsRow {
        t,
        eps: format_fraction(eps),
        eps_value: to_f64(eps),
        in_hypothesis,
        n_inf,
        n_circ_1,
        cap_ok,
        margin_ok,
        bound: format_fraction(&bound),
        bound_ok,
        orbit_n: None,
        orbit_m: None,
        orbit_rdet_upper: None,
        orbit_ok: None,
    };
    if opts.trajectory {
        let period = 1usize << t;
        let n = opts.min_n.max(8 * period);
        let m_cap = period.max(2);
        let map = MapSpec::odometer(sys.clone(), DEFAULT_EVAL_DEPTH.min(sys.depth_cap() - 1))?;
        let xs = map.trajectory(opts.x0, n + m_cap - 1)?;
        let grid = geometric_grid(256.min(n), n);
        let profile = float_profile(&xs, to_f64(eps), &grid, m_cap)?;
        let report = DeterminismReport::new(&profile, None)?;
        let upper = report.tail(m_cap).rdet_max;
        row.orbit_n = Some(n);
        row.orbit_m = Some(m_cap);
        row.orbit_rdet_upper = Some(upper);
        row.orbit_ok = Some(upper <= 0.8 + opts.tolerance);
    }
    Ok(row)
}

/// Runs every `t` in `t_range` at `eps_{t-2}`.
pub fn four_fifths_report(sys: Arc<IntervalSystem>, t_range: (u32, u32), opts: FourFifthsOptions) -> Result<FourFifthsReport> {
    let (lo, hi) = t_range;
    if lo < 2 || lo > hi {
        return Err(Error::Usage(format!("bad level range {lo}..{hi}; need 2 <= a <= b")));
    }
    let mut rows = Vec::new();
    for t in lo..=hi {
        let eps = epsilon_t(&sys, t - 2)?.value;
        rows.push(four_fifths_row(&sys, t, &eps, &opts)?);
    }
    let out_of_hypothesis = rows.iter().filter(|r| !r.in_hypothesis).map(|r| r.t).collect();
    let passed = rows.iter().filter(|r| r.in_hypothesis).all(FourFifthsRow::passed);
    Ok(FourFifthsReport {
        system: sys.kind().name().to_string(),
        t_range,
        options: opts,
        rows,
        out_of_hypothesis,
        passed,
    })
}
