use std::sync::Arc;

use rdet::config::{Budgets, EpsSpec, Provenance};
use rdet::experiments::{classify, epsilon_sweep, four_fifths_row, Source, Thresholds, Verdict};
use rdet_core::bounds::epsilon_t;
use rdet_core::dynamics::{MapSpec, DEFAULT_EVAL_DEPTH};
use rdet_core::IntervalSystem;

fn verdict(source: &Source, eps: &str, sys: Option<&IntervalSystem>, budgets: &Budgets) -> Verdict {
    let spec: EpsSpec = eps.parse().unwrap();
    let radii = spec.resolve(sys).unwrap();
    let sweep = epsilon_sweep(source, &radii, spec.provenance(), budgets).unwrap();
    let c = classify(&sweep, Thresholds::default()).unwrap();
    assert!(sweep.entries.iter().all(|e| e.monotone_ok), "{:?}", sweep.entries);
    c.verdict
}

#[test]
fn tent_orbit_loses_determinism() {
    let source = Source::Map {
        map: MapSpec::tent(2.0).unwrap(),
        x0: 0.2,
        transient: 0,
    };
    let budgets = Budgets {
        m_cap: 32,
        ..Budgets::default()
    };
    let v = verdict(&source, "3.2,1,0.32,0.1,0.032,0.01,0.0032", None, &budgets);
    assert_eq!(v, Verdict::DetZero);
}

#[test]
fn periodic_orbit_is_deterministic_under_shifts() {
    let budgets = Budgets {
        n_max: 2048,
        m_cap: 16,
        ..Budgets::default()
    };
    for h in [0, 1, 7, 64] {
        let source = Source::Map {
            map: MapSpec::logistic(3.2).unwrap(),
            x0: 0.3,
            transient: 1000 + h,
        };
        assert_eq!(verdict(&source, "0.1,0.03,0.01,0.003,0.001,0.0003,0.0001", None, &budgets), Verdict::DetOne);
    }
}

#[test]
fn odometer_orbit_stays_positive_under_shifts() {
    let sys = Arc::new(IntervalSystem::ternary());
    let map = MapSpec::odometer(sys.clone(), DEFAULT_EVAL_DEPTH).unwrap();
    let budgets = Budgets {
        m_cap: 64,
        ..Budgets::default()
    };
    for h in [0, 64] {
        let source = Source::Map {
            map: map.clone(),
            x0: 0.25,
            transient: h,
        };
        let v = verdict(&source, "eps_t:2..7", Some(&sys), &budgets);
        assert_eq!(v, Verdict::PositiveBounded, "shift {h}");
    }
}

#[test]
fn four_fifths_row_outside_hypothesis_is_flagged() {
    let sys = Arc::new(IntervalSystem::ternary());
    let wrong = epsilon_t(&sys, 5).unwrap().value;
    let row = four_fifths_row(&sys, 3, &wrong, &Default::default()).unwrap();
    assert!(!row.in_hypothesis);
    let right = epsilon_t(&sys, 3).unwrap().value;
    let row = four_fifths_row(&sys, 5, &right, &Default::default()).unwrap();
    assert!(row.in_hypothesis && row.passed());
}

#[test]
fn ladder_radii_are_strictly_decreasing() {
    let spec: EpsSpec = "ladder".parse().unwrap();
    assert_eq!(spec.provenance(), Provenance::Ladder);
    let sys = IntervalSystem::theorem3(3).unwrap();
    let radii = spec.resolve(Some(&sys)).unwrap();
    assert_eq!(radii.len(), 6);
    assert!(radii.windows(2).all(|w| w[0].exact > w[1].exact));
}
