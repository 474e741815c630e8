//! Exact cylinder-pair counts and the quantities derived from them.
//!
//! For a level `t` and radius `eps` the counts run over ordered pairs
//! `(a, b)` of level-`t` words:
//!
//! * the gap count takes pairs whose intervals stay strictly closer than
//!   `eps` along `m` odometer steps,
//! * the hull count takes pairs whose joint hull stays within `eps`.
//!
//! Writing `b = a + h`, a pair survives `m` steps iff the forward run of
//! one-step successes for shift `h` starting at `a` has length at least `m`.
//! One pass over the pairs that pass at `m = 1` therefore yields the counts
//! for every `m` at once.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

use crate::system::{IntervalSystem, Level};
use crate::word::{spatial_rank, Word};
use crate::{Error, Result};

/// Largest number of ordered close pairs collected for a count profile.
pub const PAIR_BUDGET: u64 = 1 << 25;

/// Which closeness test a pair count uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairRule {
    /// `dist(K_a, K_b) < eps`.
    Gap,
    /// `diam(K_a ∪ K_b) <= eps`.
    Hull,
}

fn steps(t: u32, m: Option<u64>) -> u64 {
    let period = 1u64 << t;
    m.map_or(period, |m| m.clamp(1, period))
}

fn orbit_max(
    sys: &IntervalSystem,
    a: Word,
    b: Word,
    m: Option<u64>,
    f: impl Fn(&crate::RationalInterval, &crate::RationalInterval) -> BigRational,
) -> Result<BigRational> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    let mut best = BigRational::zero();
    for i in 0..steps(a.len(), m) as i64 {
        let v = f(&sys.interval_of(a.add(i))?, &sys.interval_of(b.add(i))?);
        if v > best {
            best = v;
        }
    }
    Ok(best)
}

/// Largest gap between `K_{a+i}` and `K_{b+i}` over `i < m`; `None` means
/// a full period.
pub fn dist_m(sys: &IntervalSystem, a: Word, b: Word, m: Option<u64>) -> Result<BigRational> {
    orbit_max(sys, a, b, m, |x, y| x.gap(y))
}

/// Largest hull diameter of `K_{a+i} ∪ K_{b+i}` over `i < m`.
pub fn diam_m(sys: &IntervalSystem, a: Word, b: Word, m: Option<u64>) -> Result<BigRational> {
    orbit_max(sys, a, b, m, |x, y| x.hull_diam(y))
}

/// Endpoints of one level in spatial order, scaled so that `eps` shares
/// their denominator, with `eps` already added where the scans need it.
struct View<T> {
    lo: Vec<T>,
    hi: Vec<T>,
    lo_plus: Vec<T>,
    hi_plus: Vec<T>,
}

enum Scaled {
    Small(View<i128>),
    Big(View<BigInt>),
}

fn scaled_view(level: &Level, eps: &BigRational) -> Scaled {
    let t = level.t();
    let n = level.len();
    let q = eps.denom();
    let e = eps.numer() * level.denom();
    let order: Vec<usize> = (0..n as u64).map(|r| spatial_rank(r, t) as usize).collect();
    let lo: Vec<BigInt> = order.iter().map(|&i| &level.lo_numers()[i] * q).collect();
    let hi: Vec<BigInt> = order.iter().map(|&i| &level.hi_numers()[i] * q).collect();
    let bits = hi
        .iter()
        .chain(core::iter::once(&e))
        .map(|x| x.bits())
        .max()
        .unwrap_or(0);
    if bits < 120 {
        let conv = |v: &[BigInt]| -> Vec<i128> { v.iter().map(|x| x.to_i128().unwrap()).collect() };
        let e = e.to_i128().unwrap();
        let lo = conv(&lo);
        let hi = conv(&hi);
        let lo_plus = lo.iter().map(|x| x + e).collect();
        let hi_plus = hi.iter().map(|x| x + e).collect();
        Scaled::Small(View { lo, hi, lo_plus, hi_plus })
    } else {
        let lo_plus = lo.iter().map(|x| x + &e).collect();
        let hi_plus = hi.iter().map(|x| x + &e).collect();
        Scaled::Big(View { lo, hi, lo_plus, hi_plus })
    }
}

/// Calls `f(r, s)` for every spatial-rank pair `r <= s` passing `rule` at one
/// step. Assumes the level is disjoint and ordered, as in admissible systems.
fn scan<T: Ord>(v: &View<T>, rule: PairRule, mut f: impl FnMut(usize, usize)) {
    let n = v.lo.len();
    match rule {
        PairRule::Gap => {
            let mut end = 0usize;
            for r in 0..n {
                // gap(r, r) = 0 < eps requires eps > 0
                if v.hi_plus[r] <= v.hi[r] {
                    continue;
                }
                end = end.max(r);
                while end + 1 < n && v.lo[end + 1] < v.hi_plus[r] {
                    end += 1;
                }
                for s in r..=end {
                    f(r, s);
                }
            }
        }
        PairRule::Hull => {
            let mut p = 0usize;
            for r in 0..n {
                while p < n && v.hi[p] <= v.lo_plus[r] {
                    p += 1;
                }
                for s in r..p {
                    f(r, s);
                }
            }
        }
    }
}

fn scan_range_sum<T: Ord>(v: &View<T>, rule: PairRule) -> u64 {
    let n = v.lo.len();
    let mut total = 0u64;
    match rule {
        PairRule::Gap => {
            let mut end = 0usize;
            for r in 0..n {
                if v.hi_plus[r] <= v.hi[r] {
                    continue;
                }
                end = end.max(r);
                while end + 1 < n && v.lo[end + 1] < v.hi_plus[r] {
                    end += 1;
                }
                total += 2 * (end - r) as u64 + 1;
            }
        }
        PairRule::Hull => {
            let mut p = 0usize;
            for r in 0..n {
                while p < n && v.hi[p] <= v.lo_plus[r] {
                    p += 1;
                }
                if p > r {
                    total += 2 * (p - r - 1) as u64 + 1;
                }
            }
        }
    }
    total
}

/// Ordered-pair count at one step, without building a profile.
pub fn count_one_step(sys: &IntervalSystem, t: u32, eps: &BigRational, rule: PairRule) -> Result<u64> {
    let level = sys.level(t)?;
    Ok(match scaled_view(&level, eps) {
        Scaled::Small(v) => scan_range_sum(&v, rule),
        Scaled::Big(v) => scan_range_sum(&v, rule),
    })
}

/// Pair counts for every number of steps at a fixed `(t, eps, rule)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountProfile {
    t: u32,
    rule: PairRule,
    /// Pairs whose run never breaks.
    full: u64,
    /// Maximal runs of consecutive successes, by length (each `< 2^t`).
    blocks: BTreeMap<u64, u64>,
}

impl CountProfile {
    pub fn build(sys: &IntervalSystem, t: u32, eps: &BigRational, rule: PairRule) -> Result<Self> {
        let level = sys.level(t)?;
        let view = scaled_view(&level, eps);
        let total = match &view {
            Scaled::Small(v) => scan_range_sum(v, rule),
            Scaled::Big(v) => scan_range_sum(v, rule),
        };
        if total > PAIR_BUDGET {
            return Err(Error::Budget(alloc::format!(
                "{total} close pairs at level {t} exceed the pair budget {PAIR_BUDGET}"
            )));
        }
        let period = 1u64 << t;
        let mask = period - 1;
        let mut keys: Vec<u64> = Vec::with_capacity(total as usize);
        let mut push = |r: usize, s: usize| {
            let a = spatial_rank(r as u64, t);
            let b = spatial_rank(s as u64, t);
            keys.push((b.wrapping_sub(a) & mask) << 32 | a);
            if r != s {
                keys.push((a.wrapping_sub(b) & mask) << 32 | b);
            }
        };
        match &view {
            Scaled::Small(v) => scan(v, rule, &mut push),
            Scaled::Big(v) => scan(v, rule, &mut push),
        }
        keys.sort_unstable();

        let mut full = 0u64;
        let mut blocks = BTreeMap::new();
        let mut start = 0usize;
        while start < keys.len() {
            let h = keys[start] >> 32;
            let mut end = start;
            while end < keys.len() && keys[end] >> 32 == h {
                end += 1;
            }
            let cs: Vec<u64> = keys[start..end].iter().map(|k| k & 0xffff_ffff).collect();
            if cs.len() as u64 == period {
                full += period;
            } else {
                let mut runs = Vec::new();
                let mut len = 1u64;
                for w in cs.windows(2) {
                    if w[1] == w[0] + 1 {
                        len += 1;
                    } else {
                        runs.push(len);
                        len = 1;
                    }
                }
                runs.push(len);
                // a run ending at 2^t - 1 continues at 0
                if runs.len() > 1 && cs[0] == 0 && *cs.last().unwrap() == mask {
                    let last = runs.pop().unwrap();
                    runs[0] += last;
                }
                for r in runs {
                    *blocks.entry(r).or_insert(0) += 1;
                }
            }
            start = end;
        }
        Ok(CountProfile { t, rule, full, blocks })
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn rule(&self) -> PairRule {
        self.rule
    }

    /// Count for `m` steps; `None` is the full period.
    pub fn count(&self, m: Option<u64>) -> u64 {
        let m = steps(self.t, m);
        self.full
            + self
                .blocks
                .range(m..)
                .map(|(&len, &k)| k * (len - m + 1))
                .sum::<u64>()
    }
}

/// `N_m`: pairs whose `m`-step orbits stay strictly closer than `eps`.
pub fn count_n(sys: &IntervalSystem, t: u32, eps: &BigRational, m: Option<u64>) -> Result<u64> {
    if m == Some(1) {
        return count_one_step(sys, t, eps, PairRule::Gap);
    }
    Ok(CountProfile::build(sys, t, eps, PairRule::Gap)?.count(m))
}

/// `N°_m`: pairs whose joint hull stays within `eps` for `m` steps.
pub fn count_n_circ(sys: &IntervalSystem, t: u32, eps: &BigRational, m: Option<u64>) -> Result<u64> {
    if m == Some(1) {
        return count_one_step(sys, t, eps, PairRule::Hull);
    }
    Ok(CountProfile::build(sys, t, eps, PairRule::Hull)?.count(m))
}

/// The extreme-grandchild gap of one level and where it is attained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremeGap {
    pub t: u32,
    pub value: BigRational,
    pub argmax: Word,
    /// For every parent the two left grandchildren share digit `t` and
    /// differ there from the inner right one.
    pub labels_ok: bool,
}

/// Max over `a` of the gap between the outermost grandchildren of `K_a`,
/// with grandchildren labelled by spatial position.
pub fn epsilon_t(sys: &IntervalSystem, t: u32) -> Result<ExtremeGap> {
    let level = sys.level(t + 2)?;
    let n = 1usize << t;
    let d = level.denom();
    let mut best: Option<(BigInt, usize)> = None;
    let mut labels_ok = true;
    for a in 0..n {
        let mut kids = [a, a + 2 * n, a + n, a + 3 * n];
        kids.sort_by(|&x, &y| level.lo_numers()[x].cmp(&level.lo_numers()[y]));
        for p in kids.windows(2) {
            if level.hi_numers()[p[0]] >= level.lo_numers()[p[1]] {
                return Err(Error::Admissibility(alloc::format!(
                    "grandchildren of {} at level {} are not disjoint",
                    Word::from_parts(a as u64, t),
                    t + 2
                )));
            }
        }
        let digit = |i: usize| (i >> t) & 1;
        labels_ok &= digit(kids[0]) == digit(kids[1]) && digit(kids[1]) != digit(kids[2]);
        let gap = &level.lo_numers()[kids[3]] - &level.hi_numers()[kids[0]];
        if best.as_ref().is_none_or(|(g, _)| &gap > g) {
            best = Some((gap, a));
        }
    }
    let (g, a) = best.unwrap();
    Ok(ExtremeGap {
        t,
        value: BigRational::new(g, d.clone()),
        argmax: Word::from_parts(a as u64, t),
        labels_ok,
    })
}

/// `(ℓ_t, λ_t)`: how many level-`t` intervals have diameter at least `eps`
/// and their total length.
pub fn ell_lambda(sys: &IntervalSystem, t: u32, eps: &BigRational) -> Result<(u64, BigRational)> {
    let level = sys.level(t)?;
    let threshold = eps.numer() * level.denom();
    let q = eps.denom();
    let mut count = 0u64;
    let mut sum = BigInt::zero();
    for (l, h) in level.lo_numers().iter().zip(level.hi_numers()) {
        let diam = h - l;
        if &diam * q >= threshold {
            count += 1;
            sum += diam;
        }
    }
    Ok((count, BigRational::new(sum, level.denom().clone())))
}

/// Exact bounds on determinism and correlation sums from pair counts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DetBounds {
    pub t: u32,
    pub eps: BigRational,
    pub m: Option<u64>,
    pub n_m: u64,
    pub n_circ_m: u64,
    pub n_1: u64,
    pub n_circ_1: u64,
    /// `N°_m / N_1`.
    pub lower: BigRational,
    /// `N_m / N°_1`, or 1 when `N°_1 = 0`.
    pub upper: BigRational,
    /// Set when `N°_1 = 0` and the bounds are the trivial `(0, 1)`.
    pub trivial: bool,
}

impl DetBounds {
    /// `N°_m / 4^t`, a lower bound on the correlation sum.
    pub fn corr_lower(&self) -> BigRational {
        BigRational::new(self.n_circ_m.into(), BigInt::from(1u64) << (2 * self.t))
    }

    /// `N_m / 4^t`.
    pub fn corr_upper(&self) -> BigRational {
        BigRational::new(self.n_m.into(), BigInt::from(1u64) << (2 * self.t))
    }

    pub fn from_profiles(gap: &CountProfile, hull: &CountProfile, eps: &BigRational, m: Option<u64>) -> Self {
        let n_m = gap.count(m);
        let n_circ_m = hull.count(m);
        let n_1 = gap.count(Some(1));
        let n_circ_1 = hull.count(Some(1));
        let (lower, upper, trivial) = if n_circ_1 == 0 {
            (BigRational::zero(), BigRational::from_integer(1.into()), true)
        } else {
            (
                BigRational::new(n_circ_m.into(), n_1.into()),
                BigRational::new(n_m.into(), n_circ_1.into()),
                false,
            )
        };
        DetBounds {
            t: gap.t(),
            eps: eps.clone(),
            m,
            n_m,
            n_circ_m,
            n_1,
            n_circ_1,
            lower,
            upper,
            trivial,
        }
    }
}

pub fn combinatorial_rdet_bounds(
    sys: &IntervalSystem,
    t: u32,
    eps: &BigRational,
    m: Option<u64>,
) -> Result<DetBounds> {
    let gap = CountProfile::build(sys, t, eps, PairRule::Gap)?;
    let hull = CountProfile::build(sys, t, eps, PairRule::Hull)?;
    Ok(DetBounds::from_profiles(&gap, &hull, eps, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    // Brute force straight from the definitions.
    fn brute(sys: &IntervalSystem, t: u32, eps: &BigRational, m: Option<u64>, rule: PairRule) -> u64 {
        let mut n = 0;
        for a in Word::all(t) {
            for b in Word::all(t) {
                let ok = match rule {
                    PairRule::Gap => &dist_m(sys, a, b, m).unwrap() < eps,
                    PairRule::Hull => &diam_m(sys, a, b, m).unwrap() <= eps,
                };
                n += ok as u64;
            }
        }
        n
    }

    #[test]
    fn dist_and_diam_examples() {
        let sys = IntervalSystem::ternary();
        assert_eq!(dist_m(&sys, w("0"), w("1"), Some(1)).unwrap(), ratio(1, 3));
        assert_eq!(diam_m(&sys, w("0"), w("1"), Some(1)).unwrap(), ratio(1, 1));
        assert_eq!(diam_m(&sys, w("0"), w("0"), Some(1)).unwrap(), ratio(1, 3));
        assert!(dist_m(&sys, w("01"), w("01"), None).unwrap().is_zero());
        assert!(dist_m(&sys, w("0"), w("01"), None).is_err());
        // explicit max over the 4-cycle: pairs (00,10),(10,01),(01,11),(11,00)
        let manual = (0..4)
            .map(|i| {
                let a = sys.interval_of(w("00").add(i)).unwrap();
                let b = sys.interval_of(w("10").add(i)).unwrap();
                a.gap(&b)
            })
            .max()
            .unwrap();
        assert_eq!(dist_m(&sys, w("00"), w("10"), None).unwrap(), manual);
        assert_eq!(manual, ratio(7, 9));
    }

    #[test]
    fn count_examples() {
        let sys = IntervalSystem::ternary();
        assert_eq!(count_n(&sys, 3, &ratio(2, 1), Some(1)).unwrap(), 64);
        assert_eq!(count_n(&sys, 2, &ratio(1, 9), None).unwrap(), 4);
        assert_eq!(brute(&sys, 2, &ratio(1, 9), None, PairRule::Gap), 4);
        assert_eq!(count_n_circ(&sys, 3, &ratio(1, 1), None).unwrap(), 64);
        assert_eq!(count_n_circ(&sys, 1, &ratio(1, 3), Some(1)).unwrap(), 2);
        assert_eq!(count_n(&sys, 2, &ratio(0, 1), Some(1)).unwrap(), 0);
    }

    #[test]
    fn profiles_match_brute_force() {
        let ternary = IntervalSystem::ternary();
        let t3 = IntervalSystem::theorem3(2).unwrap();
        for sys in [&ternary, &t3] {
            for t in 0..=4 {
                let mut grid = alloc::vec![ratio(1, 3), ratio(1, 9), ratio(7, 81), ratio(1, 2), ratio(1, 100)];
                grid.push(sys.nu(t).unwrap());
                for eps in &grid {
                    for rule in [PairRule::Gap, PairRule::Hull] {
                        let p = CountProfile::build(sys, t, eps, rule).unwrap();
                        for m in [Some(1), Some(2), Some(3), Some(5), Some(16), None] {
                            assert_eq!(
                                p.count(m),
                                brute(sys, t, eps, m, rule),
                                "{:?} t={t} eps={eps} m={m:?} {rule:?}",
                                sys.kind()
                            );
                        }
                        assert_eq!(p.count(Some(1)), count_one_step(sys, t, eps, rule).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn epsilon_t_ternary() {
        let sys = IntervalSystem::ternary();
        let e0 = epsilon_t(&sys, 0).unwrap();
        assert_eq!(e0.value, ratio(7, 9));
        for t in 0..=6u32 {
            let e = epsilon_t(&sys, t).unwrap();
            assert_eq!(e.value, ratio(7, 9 * 3i64.pow(t)));
            assert!(e.labels_ok);
        }
    }

    #[test]
    fn ell_lambda_examples() {
        let sys = IntervalSystem::ternary();
        assert_eq!(ell_lambda(&sys, 2, &ratio(1, 9)).unwrap(), (4, ratio(4, 9)));
        assert_eq!(ell_lambda(&sys, 2, &ratio(1, 5)).unwrap(), (0, ratio(0, 1)));
        assert_eq!(ell_lambda(&sys, 3, &ratio(1, 1000)).unwrap(), (8, ratio(8, 27)));
    }

    #[test]
    fn bounds_at_first_stage_are_tight() {
        let sys = IntervalSystem::theorem3(1).unwrap();
        let b = combinatorial_rdet_bounds(&sys, 1, &ratio(1, 3), None).unwrap();
        assert_eq!((b.n_m, b.n_circ_m), (2, 2));
        assert_eq!(b.lower, ratio(1, 1));
        assert_eq!(b.upper, ratio(1, 1));
    }

    #[test]
    fn trivial_bounds_without_hull_pairs() {
        let sys = IntervalSystem::ternary();
        let b = combinatorial_rdet_bounds(&sys, 1, &ratio(1, 10), Some(1)).unwrap();
        assert!(b.trivial);
        assert_eq!((b.lower, b.upper), (ratio(0, 1), ratio(1, 1)));
    }
}
