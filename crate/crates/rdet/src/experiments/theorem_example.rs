//! Oscillating determinism of the staged construction.
//!
//! At every stage `n` the pair counts pin determinism to exactly one at
//! `(t_n, eps_n)` and bound it by `2^(1-n)` at `(t_n', eps_n')`.

use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;
use rdet_core::bounds::combinatorial_rdet_bounds;
use rdet_core::rational::format_fraction;
use rdet_core::validate::validate;
use rdet_core::IntervalSystem;
use serde::Serialize;

use super::sandwich::{symbolic_sandwich, SandwichReport};
use super::BoundsSummary;
use crate::Result;

/// Stages beyond this one need more than the default depth cap.
pub const MAX_STAGES: u32 = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct TheoremExampleOptions {
    /// Orbit length in periods of the level being checked.
    pub periods: usize,
    pub m_cap: usize,
    /// Orbit checks longer than this are skipped.
    pub max_orbit: usize,
}

impl Default for TheoremExampleOptions {
    fn default() -> Self {
        TheoremExampleOptions {
            periods: 4,
            m_cap: 64,
            max_orbit: 1 << 14,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StageReport {
    pub n: u32,
    pub t: u32,
    pub eps: String,
    pub t_prime: u32,
    pub eps_prime: String,
    /// Bounds at `(t_n, eps_n)` for one step and for a full period.
    pub pinned_one_step: BoundsSummary,
    pub pinned: BoundsSummary,
    pub pinned_ok: bool,
    /// Bounds at `(t_n', eps_n')` for a full period.
    pub collapsed: BoundsSummary,
    pub collapse_limit: String,
    pub collapse_ok: bool,
    pub orbit_at_eps: Option<SandwichReport>,
    pub orbit_at_eps_prime: Option<SandwichReport>,
    pub orbit_note: Option<String>,
}

impl StageReport {
    pub fn passed(&self) -> bool {
        self.pinned_ok
            && self.collapse_ok
            && self.orbit_at_eps.as_ref().is_none_or(|r| r.passed())
            && self.orbit_at_eps_prime.as_ref().is_none_or(|r| r.passed())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TheoremExampleReport {
    pub stages: u32,
    pub options: TheoremExampleOptions,
    pub validation_passed: bool,
    pub validation_failures: Vec<String>,
    pub stage_reports: Vec<StageReport>,
    /// `(label, lower, upper)` along `eps_1 > eps_1' > eps_2 > ...`.
    pub oscillation: Vec<(String, String, String)>,
    pub passed: bool,
}

pub fn theorem_example_report(stages: u32, opts: TheoremExampleOptions) -> Result<TheoremExampleReport> {
    let sys = Arc::new(IntervalSystem::theorem3(stages)?);
    let validation = validate(&sys, sys.materialized_depth());
    let validation_failures = validation
        .failures()
        .map(|r| format!("{} level={:?} stage={:?}", r.check, r.level, r.stage))
        .collect();
    let one = BigRational::one();
    let ladder = sys.ladder().expect("staged system has a ladder").clone();

    let mut stage_reports = Vec::new();
    let mut oscillation = Vec::new();
    for st in ladder.stages() {
        let pinned_one_step = combinatorial_rdet_bounds(&sys, st.t, &st.eps, Some(1))?;
        let pinned = combinatorial_rdet_bounds(&sys, st.t, &st.eps, None)?;
        let size = 1u64 << st.t;
        let pinned_ok = [&pinned_one_step, &pinned]
            .iter()
            .all(|b| !b.trivial && b.lower == one && b.upper == one && b.n_m == size && b.n_circ_m == size);

        let collapsed = combinatorial_rdet_bounds(&sys, st.t_prime, &st.eps_prime, None)?;
        let limit = BigRational::new(BigInt::from(2), BigInt::one() << st.n);
        let collapse_ok = collapsed.upper <= limit;

        let orbit = |t: u32, eps: &BigRational| -> Result<Option<SandwichReport>> {
            if opts.periods << t > opts.max_orbit {
                return Ok(None);
            }
            symbolic_sandwich(sys.clone(), t, eps, opts.periods, opts.m_cap).map(Some)
        };
        let orbit_at_eps = orbit(st.t, &st.eps)?;
        let orbit_at_eps_prime = orbit(st.t_prime, &st.eps_prime)?;
        let orbit_note = orbit_at_eps_prime.is_none().then(|| {
            format!(
                "orbit check at level {} needs {} points, above the limit {}",
                st.t_prime,
                opts.periods << st.t_prime,
                opts.max_orbit
            )
        });

        oscillation.push((format!("eps_{}", st.n), format_fraction(&pinned.lower), format_fraction(&pinned.upper)));
        oscillation.push((
            format!("eps_{}'", st.n),
            format_fraction(&collapsed.lower),
            format_fraction(&collapsed.upper),
        ));
        stage_reports.push(StageReport {
            n: st.n,
            t: st.t,
            eps: format_fraction(&st.eps),
            t_prime: st.t_prime,
            eps_prime: format_fraction(&st.eps_prime),
            pinned_one_step: BoundsSummary::from(&pinned_one_step),
            pinned: BoundsSummary::from(&pinned),
            pinned_ok,
            collapsed: BoundsSummary::from(&collapsed),
            collapse_limit: format_fraction(&limit),
            collapse_ok,
            orbit_at_eps,
            orbit_at_eps_prime,
            orbit_note,
        });
    }
    let passed = validation.passed() && stage_reports.iter().all(StageReport::passed);
    Ok(TheoremExampleReport {
        stages,
        options: opts,
        validation_passed: validation.passed(),
        validation_failures,
        stage_reports,
        oscillation,
        passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_stages_pass() {
        let r = theorem_example_report(2, TheoremExampleOptions::default()).unwrap();
        assert!(r.passed, "{r:#?}");
        assert_eq!(r.oscillation[0].1, "1");
        assert_eq!(r.oscillation[0].2, "1");
        assert_eq!(r.stage_reports[1].collapse_limit, "1/2");
        assert!(r.stage_reports.iter().all(|s| s.orbit_at_eps_prime.is_some()));
    }

    #[test]
    fn orbit_checks_respect_the_limit() {
        let opts = TheoremExampleOptions {
            max_orbit: 64,
            ..Default::default()
        };
        let r = theorem_example_report(2, opts).unwrap();
        assert!(r.stage_reports[1].orbit_at_eps_prime.is_none());
        assert!(r.stage_reports[1].orbit_note.is_some());
        assert!(r.passed);
    }
}
