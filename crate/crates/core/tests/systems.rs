use std::sync::Arc;

use num_rational::BigRational;
use num_traits::Signed;
use rdet_core::bounds::{combinatorial_rdet_bounds, count_n, count_n_circ, epsilon_t};
use rdet_core::dynamics::{alternating_address, odometer_extension_exact, MapSpec, SymbolicOrbit, DEFAULT_EVAL_DEPTH};
use rdet_core::rational::{ratio, to_f64};
use rdet_core::rqa::enclosure_matrices;
use rdet_core::validate::validate;
use rdet_core::{IntervalSystem, Word};

fn systems() -> Vec<IntervalSystem> {
    vec![IntervalSystem::ternary(), IntervalSystem::theorem3(3).unwrap()]
}

#[test]
fn cylinders_map_to_successors() {
    for sys in systems() {
        for len in 1..=6 {
            for a in Word::all(len) {
                let k = sys.interval_of(a).unwrap();
                let next = sys.interval_of(a.add(1)).unwrap();
                let mid = (k.lo() + k.hi()) / ratio(2, 1);
                for x in [k.lo(), k.hi(), &mid] {
                    let y = odometer_extension_exact(&sys, x, DEFAULT_EVAL_DEPTH).unwrap();
                    assert!(next.contains(&y), "{:?} {a:?}", sys.kind());
                }
            }
        }
    }
}

#[test]
fn float_map_agrees_with_exact_on_cantor_points() {
    let sys = Arc::new(IntervalSystem::ternary());
    let map = MapSpec::odometer(sys.clone(), DEFAULT_EVAL_DEPTH).unwrap();
    for a in Word::all(5) {
        let x = sys.interval_of(a).unwrap().lo().clone();
        let exact = to_f64(&odometer_extension_exact(&sys, &x, DEFAULT_EVAL_DEPTH).unwrap());
        assert!((map.eval(to_f64(&x)).unwrap() - exact).abs() < 1e-9);
    }
}

#[test]
fn materialized_systems_validate() {
    for sys in systems() {
        let r = validate(&sys, sys.materialized_depth().max(6));
        assert!(r.passed(), "{:?}", r.failures().collect::<Vec<_>>());
    }
}

#[test]
fn symbolic_decisions_agree_with_midpoints() {
    for sys in systems() {
        let sys = Arc::new(sys);
        let orbit = SymbolicOrbit::new(sys.clone(), alternating_address(16), 96).unwrap();
        let enc = orbit.enclosures().unwrap();
        let mids: Vec<BigRational> = (0..enc.len())
            .map(|i| {
                let k = enc.interval(i);
                (k.lo() + k.hi()) / ratio(2, 1)
            })
            .collect();
        let floats = enc.midpoints();
        for t in 1..6 {
            let eps = epsilon_t(&sys, t).unwrap().value;
            let eps_f = to_f64(&eps);
            let mats = enclosure_matrices(&enc, &eps);
            let mut decided = 0;
            for i in 0..enc.len() {
                for j in 0..enc.len() {
                    let d = (&mids[i] - &mids[j]).abs();
                    let exact = d <= eps;
                    if mats.certain.get(i, j) {
                        assert!(exact);
                    }
                    if !mats.possible.get(i, j) {
                        assert!(!exact);
                    }
                    let decided_here = mats.certain.get(i, j) || !mats.possible.get(i, j);
                    if decided_here && (to_f64(&d) - eps_f).abs() > 1e-12 {
                        decided += 1;
                        assert_eq!((floats[i] - floats[j]).abs() <= eps_f, exact);
                    }
                }
            }
            assert!(decided > 0);
        }
    }
}

#[test]
fn gap_counts_dominate_hull_counts() {
    for sys in systems() {
        for t in 1..=5 {
            for s in 0..=t {
                let eps = epsilon_t(&sys, s).unwrap().value;
                for m in [Some(1), Some(3), None] {
                    let n = count_n(&sys, t, &eps, m).unwrap();
                    let nc = count_n_circ(&sys, t, &eps, m).unwrap();
                    assert!(nc <= n && n <= 1 << (2 * t));
                }
                let b = combinatorial_rdet_bounds(&sys, t, &eps, None).unwrap();
                assert!(b.lower <= b.upper);
            }
        }
    }
}

#[test]
fn staged_ladder_is_consistent() {
    let sys = IntervalSystem::theorem3(3).unwrap();
    let ladder = sys.ladder().unwrap();
    assert_eq!(ladder.len(), 3);
    assert!(ladder.is_strictly_decreasing());
    assert!(ladder.levels_consistent());
}
