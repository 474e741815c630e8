//! Radius sweeps: one asymptotic profile per radius.

use std::sync::Arc;

use rayon::prelude::*;
use rdet_core::dynamics::{MapSpec, SymbolicOrbit};
use rdet_core::rqa::profile::geometric_grid;
use rdet_core::rqa::{DeterminismReport, RecurrenceProfile};
use rdet_core::{IntervalSystem, Word};
use serde::Serialize;

use crate::compute::{enclosure_profile, float_profile};
use crate::config::{Budgets, Provenance, Radius};
use crate::{Error, Result};

/// Smallest window in a geometric `n` grid.
pub const N_GRID_START: usize = 256;
/// Floor on the window for odometer maps.
pub const ODOMETER_MIN_N: usize = 4096;

#[derive(Clone, Debug)]
pub enum Source {
    /// Float orbit of `x0` after discarding `transient` points.
    Map {
        map: MapSpec,
        x0: f64,
        transient: usize,
    },
    /// Exact enclosures of the orbit with address `alpha`.
    Symbolic {
        sys: Arc<IntervalSystem>,
        alpha: Word,
    },
}

impl Source {
    pub fn label(&self) -> String {
        match self {
            Source::Map { map, .. } => map.label(),
            Source::Symbolic { sys, alpha } => format!("symbolic:{}:{}", sys.kind().name(), alpha),
        }
    }

    fn system(&self) -> Option<&IntervalSystem> {
        match self {
            Source::Map {
                map: MapSpec::Odometer(o),
                ..
            } => Some(o.system()),
            Source::Symbolic { sys, .. } => Some(sys),
            Source::Map { .. } => None,
        }
    }

    /// Window for one radius. Odometer orbits need several full periods of
    /// the level that resolves `eps`.
    pub fn window(&self, r: &Radius, budgets: &Budgets) -> (usize, Option<u32>) {
        match self.system() {
            Some(sys) => {
                let t = sys.resolving_level(&r.exact);
                let periods = 8usize.checked_shl(t).unwrap_or(usize::MAX);
                (ODOMETER_MIN_N.max(periods), Some(t))
            }
            None => (budgets.n_max, None),
        }
    }

    /// Profile over the geometric grid ending at `n`.
    pub fn profile(&self, r: &Radius, n: usize, m_cap: usize) -> Result<RecurrenceProfile> {
        let grid = geometric_grid(N_GRID_START.min(n), n);
        let len = n + m_cap - 1;
        match self {
            Source::Map { map, x0, transient } => {
                let xs = map.trajectory_after(*x0, *transient, len)?;
                float_profile(&xs, r.value(), &grid, m_cap)
            }
            Source::Symbolic { sys, alpha } => {
                let enc = SymbolicOrbit::new(sys.clone(), *alpha, len)?.enclosures()?;
                enclosure_profile(&enc, &r.exact, &grid, m_cap)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepEntry {
    pub eps: String,
    pub eps_value: f64,
    pub label: String,
    /// Resolving level, for odometer sources.
    pub level: Option<u32>,
    pub n_max: usize,
    pub m_cap: usize,
    pub rdet_upper: f64,
    pub rdet_lower: f64,
    pub c_upper: f64,
    pub c_lower: f64,
    pub stabilized_at: usize,
    pub undecided: u64,
    pub monotone_ok: bool,
    pub sandwich_ok: bool,
    pub error: Option<String>,
    #[serde(skip)]
    pub report: Option<DeterminismReport>,
    #[serde(skip)]
    pub profile: Option<RecurrenceProfile>,
}

impl SweepEntry {
    pub fn ok(&self) -> bool {
        self.error.is_none()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepResult {
    pub map: String,
    pub provenance: Provenance,
    /// Sorted by decreasing radius.
    pub entries: Vec<SweepEntry>,
}

impl SweepResult {
    pub fn completed(&self) -> impl Iterator<Item = &SweepEntry> {
        self.entries.iter().filter(|e| e.ok())
    }
}

fn run_one(source: &Source, r: &Radius, budgets: &Budgets) -> SweepEntry {
    let (n, level) = source.window(r, budgets);
    let m_cap = budgets.m_cap;
    let mut entry = SweepEntry {
        eps: rdet_core::rational::format_fraction(&r.exact),
        eps_value: r.value(),
        label: r.label.clone(),
        level,
        n_max: n,
        m_cap,
        rdet_upper: f64::NAN,
        rdet_lower: f64::NAN,
        c_upper: f64::NAN,
        c_lower: f64::NAN,
        stabilized_at: 0,
        undecided: 0,
        monotone_ok: false,
        sandwich_ok: false,
        error: None,
        report: None,
        profile: None,
    };
    let result = budgets
        .check(n, m_cap)
        .and_then(|_| source.profile(r, n, m_cap))
        .and_then(|p| Ok((DeterminismReport::new(&p, None)?, p)));
    match result {
        Ok((report, profile)) => {
            let tail = report.tail(m_cap);
            entry.rdet_upper = tail.rdet_max;
            entry.rdet_lower = tail.rdet_min;
            entry.c_upper = tail.c_max;
            entry.c_lower = tail.c_min;
            entry.stabilized_at = report.stabilized_at;
            entry.undecided = report.undecided;
            entry.monotone_ok = report.monotone_ok;
            entry.sandwich_ok = report.sandwich_ok;
            entry.report = Some(report);
            entry.profile = Some(profile);
        }
        Err(e) => entry.error = Some(e.to_string()),
    }
    entry
}

/// Runs every radius; failures (budget included) are recorded per entry.
pub fn epsilon_sweep(source: &Source, radii: &[Radius], provenance: Provenance, budgets: &Budgets) -> Result<SweepResult> {
    if radii.is_empty() {
        return Err(Error::Usage("empty radius grid".into()));
    }
    if budgets.m_cap == 0 {
        return Err(Error::Usage("m_cap must be positive".into()));
    }
    let mut radii = radii.to_vec();
    radii.sort_by(|a, b| b.exact.cmp(&a.exact));
    let entries = radii.par_iter().map(|r| run_one(source, r, budgets)).collect();
    Ok(SweepResult {
        map: source.label(),
        provenance,
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rdet_core::rational::ratio;

    fn budgets(n_max: usize, m_cap: usize) -> Budgets {
        Budgets {
            n_max,
            m_cap,
            ..Budgets::default()
        }
    }

    #[test]
    fn periodic_logistic_entries() {
        let source = Source::Map {
            map: MapSpec::logistic(3.2).unwrap(),
            x0: 0.3,
            transient: 1000,
        };
        let radii = [Radius::new(ratio(1, 100), "1/100"), Radius::new(ratio(1, 10), "1/10")];
        let sweep = epsilon_sweep(&source, &radii, Provenance::Generic, &budgets(1024, 16)).unwrap();
        assert_eq!(sweep.entries[0].eps, "1/10");
        for e in &sweep.entries {
            assert_eq!(e.rdet_lower, 1.0);
            assert_eq!(e.c_upper, 0.5);
        }
    }

    #[test]
    fn budget_failures_are_per_entry() {
        let source = Source::Map {
            map: MapSpec::tent(2.0).unwrap(),
            x0: 0.2,
            transient: 0,
        };
        let mut b = budgets(1024, 16);
        b.max_cells = 100;
        let sweep = epsilon_sweep(&source, &[Radius::new(ratio(1, 10), "0.1")], Provenance::Generic, &b).unwrap();
        assert!(sweep.entries[0].error.as_deref().unwrap().contains("budget"));
        assert_eq!(sweep.completed().count(), 0);
    }

    #[test]
    fn odometer_window_tracks_resolving_level() {
        let sys = Arc::new(IntervalSystem::ternary());
        let source = Source::Symbolic {
            sys: sys.clone(),
            alpha: rdet_core::dynamics::alternating_address(20),
        };
        let b = Budgets::default();
        // nu_t = 3^-t: radius 1/3^10 resolves level 10
        let (n, t) = source.window(&Radius::new(ratio(1, 59049), "3^-10"), &b);
        assert_eq!((n, t), (8192, Some(10)));
        let (n, t) = source.window(&Radius::new(ratio(1, 9), "1/9"), &b);
        assert_eq!((n, t), (4096, Some(2)));
    }
}
