//! Three-way verdict on a radius sweep.

use serde::{Deserialize, Serialize};

use super::sweep::{SweepEntry, SweepResult};
use crate::{Error, Result};

/// Sweeps should cover at least this many radii...
pub const MIN_RADII: usize = 6;
/// ...spanning at least this many decades.
pub const MIN_DECADES: f64 = 3.0;
/// Slack on monotonicity of correlation sums across radii.
pub const SWEEP_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `DetOne` when every small-radius lower determinism is at least `1 - theta_one`.
    pub theta_one: f64,
    /// `DetZero` when every small-radius upper determinism is at most `theta_zero`.
    pub theta_zero: f64,
    /// Fraction of the grid (smallest radii) treated as "small".
    pub small_fraction: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            theta_one: 0.05,
            theta_zero: 0.1,
            small_fraction: 1.0 / 3.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Verdict {
    /// Recurrences persist: finite limit set.
    DetOne,
    /// Determinism bounded away from zero and one.
    PositiveBounded,
    /// Recurrences die out.
    DetZero,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub thresholds: Thresholds,
    /// Radii used for the verdict, as fractions.
    pub small_eps: Vec<String>,
    pub min_rdet_lower: f64,
    pub max_rdet_upper: f64,
    /// Smallest lower determinism over the small radii.
    pub positivity_margin: f64,
    pub radii: usize,
    pub decades: f64,
    /// Grid meets the size and span requirements.
    pub coverage_ok: bool,
}

fn check_consistency(entries: &[&SweepEntry]) -> Result<()> {
    for e in entries {
        let values = [e.rdet_lower, e.rdet_upper, e.c_lower, e.c_upper];
        if values.iter().any(|v| !(0.0..=1.0 + SWEEP_TOL).contains(v)) || !e.monotone_ok {
            return Err(rdet_core::Error::Consistency(format!("entry {} has values outside [0, 1] or non-monotone rows", e.eps)).into());
        }
    }
    // C_M at a fixed grid cannot grow as the radius shrinks
    for w in entries.windows(2) {
        let (big, small) = (w[0], w[1]);
        if big.n_max == small.n_max && small.c_upper > big.c_upper + SWEEP_TOL {
            return Err(rdet_core::Error::Consistency(format!(
                "correlation sum grows from {} at eps={} to {} at eps={}",
                big.c_upper, big.eps, small.c_upper, small.eps
            ))
            .into());
        }
    }
    Ok(())
}

pub fn classify(sweep: &SweepResult, thresholds: Thresholds) -> Result<Classification> {
    let done: Vec<&SweepEntry> = sweep.completed().collect();
    if done.is_empty() {
        return Err(Error::Usage("sweep has no completed radii".into()));
    }
    if !(0.0..=1.0).contains(&thresholds.small_fraction) || thresholds.small_fraction == 0.0 {
        return Err(Error::Usage("small_fraction must lie in (0, 1]".into()));
    }
    check_consistency(&done)?;

    let decades = (done[0].eps_value / done[done.len() - 1].eps_value).log10();
    let k = ((done.len() as f64 * thresholds.small_fraction).ceil() as usize).max(1);
    let small = &done[done.len() - k..];
    let min_lower = small.iter().map(|e| e.rdet_lower).fold(f64::INFINITY, f64::min);
    let max_upper = small.iter().map(|e| e.rdet_upper).fold(f64::NEG_INFINITY, f64::max);
    let verdict = if min_lower >= 1.0 - thresholds.theta_one {
        Verdict::DetOne
    } else if max_upper <= thresholds.theta_zero {
        Verdict::DetZero
    } else {
        Verdict::PositiveBounded
    };
    Ok(Classification {
        verdict,
        thresholds,
        small_eps: small.iter().map(|e| e.eps.clone()).collect(),
        min_rdet_lower: min_lower,
        max_rdet_upper: max_upper,
        positivity_margin: min_lower,
        radii: done.len(),
        decades,
        coverage_ok: done.len() >= MIN_RADII && decades >= MIN_DECADES - 1e-9,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::Provenance;

    fn entry(eps: f64, lower: f64, upper: f64, c: f64) -> SweepEntry {
        SweepEntry {
            eps: format!("{eps}"),
            eps_value: eps,
            label: String::new(),
            level: None,
            n_max: 1024,
            m_cap: 32,
            rdet_upper: upper,
            rdet_lower: lower,
            c_upper: c,
            c_lower: c,
            stabilized_at: 1,
            undecided: 0,
            monotone_ok: true,
            sandwich_ok: true,
            error: None,
            report: None,
            profile: None,
        }
    }

    fn sweep(rows: &[(f64, f64, f64, f64)]) -> SweepResult {
        SweepResult {
            map: "test".into(),
            provenance: Provenance::Generic,
            entries: rows.iter().map(|&(e, l, u, c)| entry(e, l, u, c)).collect(),
        }
    }

    #[test]
    fn verdicts_follow_thresholds() {
        let t = Thresholds::default();
        let ones = sweep(&[(1e-1, 1.0, 1.0, 0.5), (1e-2, 0.97, 1.0, 0.5), (1e-3, 0.96, 0.99, 0.5)]);
        assert_eq!(classify(&ones, t).unwrap().verdict, Verdict::DetOne);
        let zeros = sweep(&[(1e-1, 0.5, 0.6, 0.5), (1e-2, 0.01, 0.05, 0.1), (1e-3, 0.0, 0.09, 0.01)]);
        assert_eq!(classify(&zeros, t).unwrap().verdict, Verdict::DetZero);
        let mid = sweep(&[(1e-1, 0.5, 0.6, 0.5), (1e-2, 0.4, 0.7, 0.1), (1e-3, 0.5, 0.8, 0.01)]);
        let c = classify(&mid, t).unwrap();
        assert_eq!(c.verdict, Verdict::PositiveBounded);
        assert_eq!(c.positivity_margin, 0.5);
        assert_eq!(c.small_eps, vec!["0.001"]);
        assert!(!c.coverage_ok);
    }

    #[test]
    fn coverage_needs_six_radii_over_three_decades() {
        let rows: Vec<_> = (0..7).map(|i| (10f64.powf(-0.5 * i as f64), 1.0, 1.0, 0.5)).collect();
        let c = classify(&sweep(&rows), Thresholds::default()).unwrap();
        assert!(c.coverage_ok);
        assert_eq!(c.small_eps.len(), 3);
        assert!((c.decades - 3.0).abs() < 1e-12);
    }

    #[test]
    fn growing_correlation_sum_is_inconsistent() {
        let bad = sweep(&[(1e-1, 1.0, 1.0, 0.2), (1e-2, 1.0, 1.0, 0.3)]);
        assert!(matches!(
            classify(&bad, Thresholds::default()),
            Err(Error::Core(rdet_core::Error::Consistency(_)))
        ));
    }
}
