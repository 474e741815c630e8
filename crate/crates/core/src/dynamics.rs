//! Interval maps and their orbits.
//!
//! Besides the logistic and tent families this module provides the
//! odometer extension of an admissible system: a continuous map that sends
//! every `K_a` onto `K_{a+1}`. On the Cantor set it is the odometer; on each
//! gap between `K_{a0}` and `K_{a1}` it interpolates linearly between the
//! images of the two gap endpoints.

use alloc::format;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::rational::{to_f64, RationalInterval};
use crate::system::IntervalSystem;
use crate::word::Word;
use crate::{Error, Result};

pub const DEFAULT_EVAL_DEPTH: u32 = 20;

/// Grid `k / TENT_GRID` used for tent orbits with slope 2. Doubling a binary
/// float shifts its mantissa out after ~53 steps and the orbit collapses to
/// 0; on this odd-denominator grid the map is exact integer arithmetic.
pub const TENT_GRID: u64 = 3 * 1_000_000_007;

/// Values are linearly interpolated; implemented for `f64` and exact
/// rationals so both evaluators share one descent.
trait Coord: Clone + PartialOrd {
    fn lerp(x: &Self, x0: &Self, x1: &Self, y0: &Self, y1: &Self) -> Self;
    fn zero() -> Self;
}

impl Coord for f64 {
    fn lerp(x: &f64, x0: &f64, x1: &f64, y0: &f64, y1: &f64) -> f64 {
        if x1 <= x0 {
            return *y0;
        }
        let s = ((x - x0) / (x1 - x0)).clamp(0.0, 1.0);
        y0 + (y1 - y0) * s
    }

    fn zero() -> f64 {
        0.0
    }
}

impl Coord for BigRational {
    fn lerp(x: &Self, x0: &Self, x1: &Self, y0: &Self, y1: &Self) -> Self {
        if x1 <= x0 {
            return y0.clone();
        }
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    fn zero() -> Self {
        <BigRational as Zero>::zero()
    }
}

/// Descends the cylinder tree to the gap (or depth-`depth` cylinder)
/// containing `x` and interpolates there.
fn extension_eval<C: Coord>(x: &C, depth: u32, interval: impl Fn(Word) -> (C, C)) -> C {
    // image of y_c (the point c0^inf)
    let img_left = |c: Word| {
        if c.is_all_ones() {
            let w = Word::from_parts(1u64 << c.len(), c.len() + 1);
            interval(w).0
        } else {
            interval(c.add(1)).0
        }
    };
    // image of z_c (the point c1^inf)
    let img_right = |c: Word| {
        if c.is_all_ones() {
            C::zero()
        } else {
            interval(c.add(1)).1
        }
    };
    let mut a = Word::EMPTY;
    let (mut y, mut z) = interval(a);
    loop {
        if a.len() >= depth {
            return C::lerp(x, &y, &z, &img_left(a), &img_right(a));
        }
        let a0 = Word::from_parts(a.value(), a.len() + 1);
        let a1 = Word::from_parts(a.value() | 1 << a.len(), a.len() + 1);
        let (y0, z0) = interval(a0);
        let (y1, z1) = interval(a1);
        if *x <= z0 {
            a = a0;
            (y, z) = (y0, z0);
        } else if *x >= y1 {
            a = a1;
            (y, z) = (y1, z1);
        } else {
            return C::lerp(x, &z0, &y1, &img_right(a0), &img_left(a1));
        }
    }
}

/// Float copy of a system's materialized levels.
#[derive(Clone, Debug)]
struct FloatTree {
    lo: Vec<Vec<f64>>,
    hi: Vec<Vec<f64>>,
}

impl FloatTree {
    fn new(sys: &IntervalSystem) -> Self {
        let (lo, hi) = sys.materialized_levels().iter().map(|l| l.to_f64()).unzip();
        FloatTree { lo, hi }
    }

    fn interval(&self, a: Word) -> (f64, f64) {
        let d = self.lo.len() as u32 - 1;
        let t = a.len().min(d);
        let i = (a.value() & ((1u64 << t) - 1)) as usize;
        let (mut y, mut z) = (self.lo[t as usize][i], self.hi[t as usize][i]);
        for k in t..a.len() {
            let third = (z - y) / 3.0;
            if a.digit(k) == Some(1) {
                y = z - third;
            } else {
                z = y + third;
            }
        }
        (y, z)
    }
}

/// The odometer extension of an admissible system.
#[derive(Clone, Debug)]
pub struct OdometerMap {
    sys: Arc<IntervalSystem>,
    depth: u32,
    tree: FloatTree,
}

impl OdometerMap {
    pub fn new(sys: Arc<IntervalSystem>, depth: u32) -> Result<Self> {
        sys.check_depth(depth + 1)?;
        let tree = FloatTree::new(&sys);
        Ok(OdometerMap { sys, depth, tree })
    }

    pub fn system(&self) -> &Arc<IntervalSystem> {
        &self.sys
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn interval_f64(&self, a: Word) -> (f64, f64) {
        self.tree.interval(a)
    }

    pub fn eval(&self, x: f64) -> f64 {
        extension_eval(&x, self.depth, |a| self.tree.interval(a))
    }

    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, x: &BigRational) -> Result<BigRational> {
        odometer_extension_exact(&self.sys, x, self.depth)
    }
}

pub fn odometer_extension_exact(sys: &IntervalSystem, x: &BigRational, depth: u32) -> Result<BigRational> {
    if x < &<BigRational as Zero>::zero() || x > &BigRational::one() {
        return Err(Error::Domain(to_f64(x)));
    }
    sys.check_depth(depth + 1)?;
    Ok(extension_eval(x, depth, |a| {
        let k = sys.interval_of(a).expect("depth checked");
        (k.lo().clone(), k.hi().clone())
    }))
}

#[derive(Clone, Debug)]
pub enum MapSpec {
    Logistic { r: f64 },
    Tent { s: f64 },
    Odometer(OdometerMap),
}

impl MapSpec {
    pub fn logistic(r: f64) -> Result<Self> {
        if !(0.0..=4.0).contains(&r) {
            return Err(Error::Parameter(format!("logistic parameter {r} outside [0, 4]")));
        }
        Ok(MapSpec::Logistic { r })
    }

    pub fn tent(s: f64) -> Result<Self> {
        if !(0.0..=2.0).contains(&s) {
            return Err(Error::Parameter(format!("tent slope {s} outside [0, 2]")));
        }
        Ok(MapSpec::Tent { s })
    }

    pub fn odometer(sys: Arc<IntervalSystem>, depth: u32) -> Result<Self> {
        Ok(MapSpec::Odometer(OdometerMap::new(sys, depth)?))
    }

    pub fn label(&self) -> String {
        match self {
            MapSpec::Logistic { r } => format!("logistic:{r}"),
            MapSpec::Tent { s } => format!("tent:{s}"),
            MapSpec::Odometer(o) => format!("odometer:{}", o.sys.kind().name()),
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::Domain(x));
        }
        Ok(match self {
            MapSpec::Logistic { r } => r * x * (1.0 - x),
            MapSpec::Tent { s } => s * x.min(1.0 - x),
            MapSpec::Odometer(o) => o.eval(x),
        })
    }

    fn exact_tent(&self) -> bool {
        matches!(self, MapSpec::Tent { s } if *s == 2.0)
    }

    /// `len` orbit points starting at `f^transient(x0)`.
    pub fn trajectory_after(&self, x0: f64, transient: usize, len: usize) -> Result<Vec<f64>> {
        if len == 0 {
            return Err(Error::Parameter("trajectory length must be at least 1".into()));
        }
        if !(0.0..=1.0).contains(&x0) {
            return Err(Error::Domain(x0));
        }
        let mut out = Vec::with_capacity(len);
        if self.exact_tent() {
            let q = TENT_GRID;
            let mut k = libm_round(x0 * q as f64).min(q as f64) as u64;
            let step = |k: u64| if 2 * k <= q { 2 * k } else { 2 * (q - k) };
            for _ in 0..transient {
                k = step(k);
            }
            for _ in 0..len {
                out.push(k as f64 / q as f64);
                k = step(k);
            }
            return Ok(out);
        }
        let mut x = x0;
        for _ in 0..transient {
            x = self.eval(x)?;
        }
        out.push(x);
        while out.len() < len {
            x = self.eval(x)?;
            out.push(x);
        }
        Ok(out)
    }

    pub fn trajectory(&self, x0: f64, len: usize) -> Result<Vec<f64>> {
        self.trajectory_after(x0, 0, len)
    }
}

fn libm_round(x: f64) -> f64 {
    // non-negative inputs only
    let f = x as u64 as f64;
    if x - f >= 0.5 {
        f + 1.0
    } else {
        f
    }
}

/// Address `0101...` of length `depth`; in the ternary system it is the
/// cylinder around `1/4`.
pub fn alternating_address(depth: u32) -> Word {
    Word::from_parts(0xAAAA_AAAA_AAAA_AAAA, depth)
}

/// Orbit of a point of the Cantor set followed through its depth-`T`
/// addresses `alpha + i`.
#[derive(Clone, Debug)]
pub struct SymbolicOrbit {
    sys: Arc<IntervalSystem>,
    alpha: Word,
    len: usize,
}

impl SymbolicOrbit {
    pub fn new(sys: Arc<IntervalSystem>, alpha: Word, len: usize) -> Result<Self> {
        if alpha.is_empty() {
            return Err(Error::Parameter("start address must be non-empty".into()));
        }
        sys.check_depth(alpha.len())?;
        Ok(SymbolicOrbit { sys, alpha, len })
    }

    pub fn alpha(&self) -> Word {
        self.alpha
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn system(&self) -> &Arc<IntervalSystem> {
        &self.sys
    }

    pub fn address(&self, i: usize) -> Word {
        self.alpha.add(i as i64)
    }

    pub fn enclosure(&self, i: usize) -> Result<RationalInterval> {
        self.sys.interval_of(self.address(i))
    }

    /// All enclosures over the common denominator of level `T`.
    pub fn enclosures(&self) -> Result<Enclosures> {
        let denom = self.sys.denominator(self.alpha.len())?;
        let mut lo = Vec::with_capacity(self.len);
        let mut hi = Vec::with_capacity(self.len);
        for i in 0..self.len {
            let (l, h) = self.sys.numerators_of(self.address(i))?;
            lo.push(l);
            hi.push(h);
        }
        Ok(Enclosures { denom, lo, hi })
    }
}

/// Exact enclosures `[lo_i, hi_i] / denom` of orbit points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Enclosures {
    pub denom: BigInt,
    pub lo: Vec<BigInt>,
    pub hi: Vec<BigInt>,
}

impl Enclosures {
    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    pub fn interval(&self, i: usize) -> RationalInterval {
        RationalInterval::new_unchecked(
            BigRational::new(self.lo[i].clone(), self.denom.clone()),
            BigRational::new(self.hi[i].clone(), self.denom.clone()),
        )
    }

    pub fn midpoints(&self) -> Vec<f64> {
        let two = &self.denom * 2u32;
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| to_f64(&BigRational::new(l + h, two.clone())))
            .collect()
    }

    pub fn truncate(&mut self, len: usize) {
        self.lo.truncate(len);
        self.hi.truncate(len);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn ternary_map(depth: u32) -> OdometerMap {
        OdometerMap::new(Arc::new(IntervalSystem::ternary()), depth).unwrap()
    }

    #[test]
    fn analytic_examples() {
        assert_eq!(MapSpec::tent(2.0).unwrap().eval(0.25).unwrap(), 0.5);
        assert_eq!(MapSpec::logistic(4.0).unwrap().eval(0.5).unwrap(), 1.0);
        assert!(MapSpec::logistic(4.5).is_err());
        assert!(MapSpec::tent(2.0).unwrap().eval(1.5).is_err());
        assert!(MapSpec::tent(2.0).unwrap().eval(f64::NAN).is_err());
    }

    #[test]
    fn tent_third_is_eventually_fixed() {
        let orbit = MapSpec::tent(2.0).unwrap().trajectory(1.0 / 3.0, 5).unwrap();
        assert_eq!(orbit[0], 1.0 / 3.0);
        assert!(orbit[1..].iter().all(|&x| x == 2.0 / 3.0));
    }

    #[test]
    fn tent_orbit_does_not_collapse() {
        let orbit = MapSpec::tent(2.0).unwrap().trajectory(0.1234, 2000).unwrap();
        assert!(orbit[1900..].iter().any(|&x| x > 0.01));
    }

    #[test]
    fn logistic_fixed_point_and_two_cycle() {
        let zeros = MapSpec::logistic(3.7).unwrap().trajectory(0.0, 10).unwrap();
        assert!(zeros.iter().all(|&x| x == 0.0));
        let orbit = MapSpec::logistic(3.2).unwrap().trajectory_after(0.3, 1000, 4).unwrap();
        let (lo, hi) = (orbit[0].min(orbit[1]), orbit[0].max(orbit[1]));
        // fixed points of the second iterate: (r+1 ± sqrt((r+1)(r-3))) / 2r
        let r: f64 = 3.2;
        let disc = ((r + 1.0) * (r - 3.0)).sqrt();
        assert!((lo - (r + 1.0 - disc) / (2.0 * r)).abs() < 1e-12);
        assert!((hi - (r + 1.0 + disc) / (2.0 * r)).abs() < 1e-12);
        assert_eq!(orbit[0], orbit[2]);
    }

    #[test]
    fn odometer_at_zero() {
        for d in [8, 12, 20] {
            let f = ternary_map(d);
            assert!((f.eval(0.0) - 2.0 / 3.0).abs() < 1e-15);
            assert_eq!(f.eval_exact(&ratio(0, 1)).unwrap(), ratio(2, 3));
        }
    }

    #[test]
    fn cylinders_map_to_successors() {
        let sys = Arc::new(IntervalSystem::ternary());
        for t in 0..=6u32 {
            for a in Word::all(t) {
                let k = sys.interval_of(a).unwrap();
                let target = sys.interval_of(a.add(1)).unwrap();
                for x in [k.lo(), k.hi()] {
                    let y = odometer_extension_exact(&sys, x, t + 2).unwrap();
                    assert!(target.contains(&y), "a={a} x={x} y={y}");
                }
            }
        }
    }

    #[test]
    fn all_ones_children_swap() {
        let sys = Arc::new(IntervalSystem::ternary());
        for t in 1..=5u32 {
            let ones = Word::ones(t).unwrap();
            for u in 0..2u8 {
                let k = sys.interval_of(ones.child(u).unwrap()).unwrap();
                let target = sys
                    .interval_of(Word::zeros(t).unwrap().child(1 - u).unwrap())
                    .unwrap();
                let y = odometer_extension_exact(&sys, k.lo(), t + 3).unwrap();
                assert!(target.contains(&y));
            }
        }
    }

    #[test]
    fn deeper_evaluation_agrees_on_resolved_gaps() {
        let sys = Arc::new(IntervalSystem::ternary());
        // 1/2 sits in the root gap, 5/54 in a level-2 gap
        for x in [ratio(1, 2), ratio(5, 54), ratio(7, 27) + ratio(1, 1000)] {
            let a = odometer_extension_exact(&sys, &x, 6).unwrap();
            let b = odometer_extension_exact(&sys, &x, 7).unwrap();
            assert_eq!(a, b, "x={x}");
        }
    }

    #[test]
    fn float_and_exact_agree() {
        let f = ternary_map(10);
        for k in 0..=200 {
            let x = ratio(k, 200);
            let exact = to_f64(&f.eval_exact(&x).unwrap());
            assert!((f.eval(k as f64 / 200.0) - exact).abs() < 1e-12, "x={x}");
        }
    }

    #[test]
    fn continuity_probe() {
        let f = ternary_map(12);
        let nu = 3f64.powi(-12);
        let n = 20_000;
        let h = 1.0 / n as f64;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let x = i as f64 * h;
            worst = worst.max((f.eval(x + h) - f.eval(x)).abs());
        }
        // slope is at most 3 on the gap images and 1 on cylinders
        assert!(worst <= 3.0 * h + 2.0 * nu, "{worst}");
    }

    #[test]
    fn symbolic_orbit_addresses() {
        let sys = Arc::new(IntervalSystem::ternary());
        let orbit = SymbolicOrbit::new(sys.clone(), Word::zeros(6).unwrap(), 200).unwrap();
        assert_eq!(orbit.address(1), Word::parse("100000").unwrap());
        assert_eq!(orbit.address(64), orbit.address(0));
        let enc = orbit.enclosures().unwrap();
        for i in 0..10 {
            assert_eq!(enc.interval(i), orbit.enclosure(i).unwrap());
        }
        assert!(SymbolicOrbit::new(sys, Word::EMPTY, 3).is_err());
    }

    #[test]
    fn alternating_address_is_one_quarter() {
        let sys = IntervalSystem::ternary();
        for d in [2, 7, 20] {
            let k = sys.interval_of(alternating_address(d)).unwrap();
            assert!(k.contains(&ratio(1, 4)));
        }
    }

    #[test]
    fn float_orbit_stays_in_enclosures() {
        for t in 1..=6u32 {
            let sys = Arc::new(IntervalSystem::ternary());
            let f = OdometerMap::new(sys.clone(), 20).unwrap();
            let orbit = SymbolicOrbit::new(sys, Word::zeros(t).unwrap(), 1 << t).unwrap();
            let mut x = 0.0;
            for i in 0..1usize << t {
                let (lo, hi) = orbit.enclosure(i).unwrap().to_f64();
                assert!(lo - 1e-12 <= x && x <= hi + 1e-12, "t={t} i={i} x={x}");
                x = f.eval(x);
            }
        }
    }

    #[test]
    fn trajectory_rejects_bad_input() {
        let f = MapSpec::logistic(3.2).unwrap();
        assert!(f.trajectory(0.3, 0).is_err());
        assert!(f.trajectory(-0.1, 3).is_err());
        assert_eq!(f.trajectory(0.3, 3).unwrap().len(), 3);
    }
}
