//! Admissible systems of nested intervals indexed by binary words.
//!
//! Each system stores a prefix of materialized levels; level `t` holds the
//! `2^t` intervals over one common denominator, indexed by word value.
//! Below the materialized depth every interval is split by the thirds rule
//! (`K_{a0}` is the left third of `K_a`, `K_{a1}` the right third), so the
//! tail of every system is a scaled copy of the ternary Cantor system.

use alloc::borrow::Cow;
use alloc::format;
use alloc::vec::Vec;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::rational::{lcm_denominator, ratio, to_f64, RationalInterval};
use crate::word::{Word, MAX_LEN};
use crate::{Error, Result};

pub const DEFAULT_DEPTH_CAP: u32 = 24;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SystemKind {
    Ternary,
    Theorem3,
    Custom,
}

impl SystemKind {
    pub fn name(self) -> &'static str {
        match self {
            SystemKind::Ternary => "ternary",
            SystemKind::Theorem3 => "theorem3",
            SystemKind::Custom => "custom",
        }
    }
}

/// All intervals of one level over a common denominator.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Level {
    t: u32,
    denom: BigInt,
    lo: Vec<BigInt>,
    hi: Vec<BigInt>,
}

impl Level {
    pub fn from_intervals(t: u32, intervals: &[(BigRational, BigRational)]) -> Result<Level> {
        if intervals.len() as u64 != 1u64 << t {
            return Err(Error::Construction(format!(
                "level {t} needs {} intervals, got {}",
                1u64 << t,
                intervals.len()
            )));
        }
        let denom = lcm_denominator(intervals.iter().flat_map(|(a, b)| [a, b]));
        let scale = |r: &BigRational| r.numer() * (&denom / r.denom());
        let lo = intervals.iter().map(|(a, _)| scale(a)).collect();
        let hi = intervals.iter().map(|(_, b)| scale(b)).collect();
        Ok(Level { t, denom, lo, hi })
    }

    pub fn root() -> Level {
        Level {
            t: 0,
            denom: BigInt::one(),
            lo: alloc::vec![BigInt::zero()],
            hi: alloc::vec![BigInt::one()],
        }
    }

    pub fn t(&self) -> u32 {
        self.t
    }

    pub fn len(&self) -> usize {
        self.lo.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lo.is_empty()
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    pub fn lo_numers(&self) -> &[BigInt] {
        &self.lo
    }

    pub fn hi_numers(&self) -> &[BigInt] {
        &self.hi
    }

    pub fn lo(&self, i: usize) -> BigRational {
        BigRational::new(self.lo[i].clone(), self.denom.clone())
    }

    pub fn hi(&self, i: usize) -> BigRational {
        BigRational::new(self.hi[i].clone(), self.denom.clone())
    }

    pub fn diam(&self, i: usize) -> BigRational {
        BigRational::new(&self.hi[i] - &self.lo[i], self.denom.clone())
    }

    pub fn interval(&self, i: usize) -> RationalInterval {
        RationalInterval::new_unchecked(self.lo(i), self.hi(i))
    }

    pub fn max_diam(&self) -> BigRational {
        let m = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| h - l)
            .max()
            .unwrap_or_default();
        BigRational::new(m, self.denom.clone())
    }

    pub fn min_diam(&self) -> BigRational {
        let m = self
            .lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| h - l)
            .min()
            .unwrap_or_default();
        BigRational::new(m, self.denom.clone())
    }

    pub fn to_f64(&self) -> (Vec<f64>, Vec<f64>) {
        let d = &self.denom;
        let conv = |v: &Vec<BigInt>| {
            v.iter()
                .map(|x| to_f64(&BigRational::new(x.clone(), d.clone())))
                .collect()
        };
        (conv(&self.lo), conv(&self.hi))
    }

    /// The next level under the thirds rule.
    pub fn refine_thirds(&self) -> Level {
        let n = self.len();
        let mut lo = Vec::with_capacity(2 * n);
        let mut hi = Vec::with_capacity(2 * n);
        lo.resize(2 * n, BigInt::zero());
        hi.resize(2 * n, BigInt::zero());
        for i in 0..n {
            let l3 = &self.lo[i] * 3u32;
            let h3 = &self.hi[i] * 3u32;
            let d = &self.hi[i] - &self.lo[i];
            lo[i + n] = &h3 - &d;
            hi[i] = &l3 + &d;
            lo[i] = l3;
            hi[i + n] = h3;
        }
        Level {
            t: self.t + 1,
            denom: &self.denom * 3u32,
            lo,
            hi,
        }
    }
}

/// One stage of the oscillating construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub n: u32,
    /// Level with uniform diameters, gaps at least `eps`.
    pub t: u32,
    pub eps: BigRational,
    /// Level where every cylinder off the all-ones branch is `eps_prime`-small.
    pub t_prime: u32,
    pub eps_prime: BigRational,
    /// Diameter of `K_{1^t}`.
    pub delta: BigRational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct EpsilonLadder {
    stages: Vec<Stage>,
}

/// `(t_n, t_n')` for `n = 1..=stages`: `t_1 = 1`, `t_n' = t_n + n + 1`,
/// `t_{n+1} = t_n' + 1`.
pub fn ladder_levels(stages: u32) -> Vec<(u32, u32)> {
    let mut out = Vec::with_capacity(stages as usize);
    let mut t = 1u32;
    for n in 1..=stages {
        let tp = t + n + 1;
        out.push((t, tp));
        t = tp + 1;
    }
    out
}

impl EpsilonLadder {
    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn stage(&self, n: u32) -> Option<&Stage> {
        self.stages.iter().find(|s| s.n == n)
    }

    pub fn len(&self) -> usize {
        self.stages.len()
    }

    pub fn is_empty(&self) -> bool {
        self.stages.is_empty()
    }

    /// The interleaved sequence `eps_1, eps_1', eps_2, eps_2', ...`.
    pub fn interleaved(&self) -> Vec<BigRational> {
        self.stages
            .iter()
            .flat_map(|s| [s.eps.clone(), s.eps_prime.clone()])
            .collect()
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.interleaved().windows(2).all(|w| w[0] > w[1])
    }

    pub fn levels_consistent(&self) -> bool {
        let expected = ladder_levels(self.stages.len() as u32);
        self.stages
            .iter()
            .zip(expected)
            .enumerate()
            .all(|(i, (s, (t, tp)))| s.n == i as u32 + 1 && s.t == t && s.t_prime == tp)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalSystem {
    kind: SystemKind,
    levels: Vec<Level>,
    depth_cap: u32,
    ladder: Option<EpsilonLadder>,
}

impl IntervalSystem {
    /// The middle-thirds Cantor system.
    pub fn ternary() -> Self {
        IntervalSystem {
            kind: SystemKind::Ternary,
            levels: alloc::vec![Level::root()],
            depth_cap: DEFAULT_DEPTH_CAP,
            ladder: None,
        }
    }

    /// Ternary system with levels `0..=depth` held in memory.
    pub fn ternary_materialized(depth: u32) -> Result<Self> {
        let mut sys = Self::ternary();
        sys.check_depth(depth)?;
        while sys.materialized_depth() < depth {
            let next = sys.levels.last().unwrap().refine_thirds();
            sys.levels.push(next);
        }
        Ok(sys)
    }

    /// The oscillating-determinism construction run for `stages` stages.
    /// Levels are materialized through `t_N'`; deeper levels follow the
    /// thirds rule.
    pub fn theorem3(stages: u32) -> Result<Self> {
        Self::theorem3_with_cap(stages, DEFAULT_DEPTH_CAP)
    }

    pub fn theorem3_with_cap(stages: u32, depth_cap: u32) -> Result<Self> {
        if stages == 0 {
            return Err(Error::Parameter("theorem3 needs at least one stage".into()));
        }
        let schedule = ladder_levels(stages);
        let (_, last) = *schedule.last().unwrap();
        let cap = depth_cap.min(MAX_LEN);
        if last > cap {
            return Err(Error::DepthCap {
                requested: last,
                cap,
            });
        }
        let (levels, ladder) = build_theorem3(&schedule)?;
        let levels = levels
            .iter()
            .enumerate()
            .map(|(t, l)| Level::from_intervals(t as u32, l))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntervalSystem {
            kind: SystemKind::Theorem3,
            levels,
            depth_cap,
            ladder: Some(ladder),
        })
    }

    /// A system given by explicit levels `0..=D`. No admissibility check is
    /// made here; run the validator.
    pub fn from_levels(levels: Vec<Vec<RationalInterval>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Construction("no levels".into()));
        }
        let levels = levels
            .iter()
            .enumerate()
            .map(|(t, l)| {
                let pairs: Vec<_> = l.iter().map(|k| (k.lo().clone(), k.hi().clone())).collect();
                Level::from_intervals(t as u32, &pairs)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(IntervalSystem {
            kind: SystemKind::Custom,
            depth_cap: DEFAULT_DEPTH_CAP.max(levels.len() as u32 - 1),
            levels,
            ladder: None,
        })
    }

    pub fn with_depth_cap(mut self, cap: u32) -> Result<Self> {
        let cap = cap.min(MAX_LEN);
        if self.materialized_depth() > cap {
            return Err(Error::DepthCap {
                requested: self.materialized_depth(),
                cap,
            });
        }
        self.depth_cap = cap;
        Ok(self)
    }

    pub fn kind(&self) -> SystemKind {
        self.kind
    }

    pub fn depth_cap(&self) -> u32 {
        self.depth_cap
    }

    pub fn materialized_depth(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn materialized_levels(&self) -> &[Level] {
        &self.levels
    }

    pub fn ladder(&self) -> Option<&EpsilonLadder> {
        self.ladder.as_ref()
    }

    pub fn check_depth(&self, t: u32) -> Result<()> {
        if t > self.depth_cap {
            Err(Error::DepthCap {
                requested: t,
                cap: self.depth_cap,
            })
        } else {
            Ok(())
        }
    }

    /// Common denominator of level `t`.
    pub fn denominator(&self, t: u32) -> Result<BigInt> {
        self.check_depth(t)?;
        let d = self.materialized_depth();
        if t <= d {
            Ok(self.levels[t as usize].denom.clone())
        } else {
            Ok(&self.levels[d as usize].denom * num_traits::pow(BigInt::from(3u32), (t - d) as usize))
        }
    }

    /// Numerators of `y_a` and `z_a` over [`IntervalSystem::denominator`].
    pub fn numerators_of(&self, a: Word) -> Result<(BigInt, BigInt)> {
        self.check_depth(a.len())?;
        let d = self.materialized_depth();
        if a.len() <= d {
            let l = &self.levels[a.len() as usize];
            return Ok((l.lo[a.index()].clone(), l.hi[a.index()].clone()));
        }
        let base = &self.levels[d as usize];
        let b = a.prefix(d)?.index();
        let mut lo = base.lo[b].clone();
        let mut hi = base.hi[b].clone();
        for i in d..a.len() {
            let diam = &hi - &lo;
            lo *= 3u32;
            hi *= 3u32;
            if a.digit(i) == Some(1) {
                lo = &hi - diam;
            } else {
                hi = &lo + diam;
            }
        }
        Ok((lo, hi))
    }

    /// `K_a`.
    pub fn interval_of(&self, a: Word) -> Result<RationalInterval> {
        let (lo, hi) = self.numerators_of(a)?;
        let d = self.denominator(a.len())?;
        Ok(RationalInterval::new_unchecked(
            BigRational::new(lo, d.clone()),
            BigRational::new(hi, d),
        ))
    }

    /// Level `t`, borrowed when materialized, otherwise generated by thirds.
    pub fn level(&self, t: u32) -> Result<Cow<'_, Level>> {
        self.check_depth(t)?;
        let d = self.materialized_depth();
        if t <= d {
            return Ok(Cow::Borrowed(&self.levels[t as usize]));
        }
        let mut l = self.levels[d as usize].refine_thirds();
        while l.t < t {
            l = l.refine_thirds();
        }
        Ok(Cow::Owned(l))
    }

    /// `nu_t`, the largest diameter at level `t`.
    pub fn nu(&self, t: u32) -> Result<BigRational> {
        self.check_depth(t)?;
        let d = self.materialized_depth();
        if t <= d {
            return Ok(self.levels[t as usize].max_diam());
        }
        let base = self.levels[d as usize].max_diam();
        Ok(base / BigRational::from_integer(num_traits::pow(BigInt::from(3u32), (t - d) as usize)))
    }

    /// Deepest level `t <= cap` with `nu_t >= eps` (0 if none deeper).
    pub fn resolving_level(&self, eps: &BigRational) -> u32 {
        let mut t = 0;
        while t < self.depth_cap {
            match self.nu(t + 1) {
                Ok(nu) if &nu >= eps => t += 1,
                _ => break,
            }
        }
        t
    }
}

type Endpoints = (BigRational, BigRational);

fn build_theorem3(schedule: &[(u32, u32)]) -> Result<(Vec<Vec<Endpoints>>, EpsilonLadder)> {
    let zero = BigRational::zero;
    let mut levels: Vec<Vec<Endpoints>> = alloc::vec![
        alloc::vec![(zero(), BigRational::one())],
        alloc::vec![(zero(), ratio(1, 3)), (ratio(2, 3), BigRational::one())],
    ];
    let mut stages = Vec::with_capacity(schedule.len());
    for (idx, &(t, tp)) in schedule.iter().enumerate() {
        let n = idx as u32 + 1;
        debug_assert_eq!(levels.len() as u32, t + 1);
        let top = &levels[t as usize];
        let eps = top.iter().map(|(a, b)| b - a).max().unwrap();
        let (y, z) = top.last().unwrap();
        let delta = z - y;
        let eps_prime = &delta / BigRational::from_integer(num_traits::pow(BigInt::from(4u32), n as usize + 2));

        // level t+1: tiny children everywhere, a long right child under 1^t
        let half = &eps_prime / BigRational::from_integer(2.into());
        let ones = top.len() - 1;
        let next = split(top, |i, y, z| {
            let quarter = (z - y) / BigRational::from_integer(4.into());
            let w = if half < quarter { half.clone() } else { quarter };
            let left = (y.clone(), y + &w);
            let right = if i == ones {
                (y + &delta / BigRational::from_integer(3.into()), z.clone())
            } else {
                (z - &w, z.clone())
            };
            (left, right)
        });
        levels.push(next);

        // levels t+2..=t': keep the all-ones branch well separated
        for _ in t + 2..=tp {
            let parent = levels.last().unwrap();
            let ones = parent.len() - 1;
            let next = split(parent, |i, y, z| {
                let len = z - y;
                if i == ones {
                    (
                        (y.clone(), y + &len / BigRational::from_integer(8.into())),
                        (z - &len / BigRational::from_integer(4.into()), z.clone()),
                    )
                } else {
                    thirds(y, z)
                }
            });
            levels.push(next);
        }

        stages.push(Stage {
            n,
            t,
            eps,
            t_prime: tp,
            eps_prime,
            delta,
        });

        // level t_{n+1}: uniform diameters, flush to the parent's ends
        if idx + 1 < schedule.len() {
            let parent = levels.last().unwrap();
            let min = parent.iter().map(|(a, b)| b - a).min().unwrap();
            let e = min / BigRational::from_integer(3.into());
            let next = split(parent, |_, y, z| ((y.clone(), y + &e), (z - &e, z.clone())));
            levels.push(next);
        }
    }
    Ok((levels, EpsilonLadder { stages }))
}

fn thirds(y: &BigRational, z: &BigRational) -> (Endpoints, Endpoints) {
    let third = (z - y) / BigRational::from_integer(3.into());
    ((y.clone(), y + &third), (z - &third, z.clone()))
}

fn split(
    parent: &[Endpoints],
    mut rule: impl FnMut(usize, &BigRational, &BigRational) -> (Endpoints, Endpoints),
) -> Vec<Endpoints> {
    let n = parent.len();
    let mut left = Vec::with_capacity(n);
    let mut right = Vec::with_capacity(n);
    for (i, (y, z)) in parent.iter().enumerate() {
        let (a, b) = rule(i, y, z);
        left.push(a);
        right.push(b);
    }
    left.extend(right);
    left
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn w(s: &str) -> Word {
        Word::parse(s).unwrap()
    }

    // Ternary interval of a word straight from its expansion: digit a_i
    // contributes 2 a_i / 3^{i+1} to the left endpoint.
    fn ternary_oracle(a: Word) -> (BigRational, BigRational) {
        let mut lo = BigRational::zero();
        let mut scale = BigRational::one();
        for d in a.digits() {
            scale /= BigRational::from_integer(3.into());
            if d == 1 {
                lo += &scale * BigRational::from_integer(2.into());
            }
        }
        let hi = &lo + &scale;
        (lo, hi)
    }

    #[test]
    fn ternary_examples() {
        let sys = IntervalSystem::ternary();
        assert_eq!(sys.interval_of(Word::EMPTY).unwrap(), RationalInterval::unit());
        assert_eq!(sys.interval_of(w("0")).unwrap().to_string(), "[0, 1/3]");
        assert_eq!(sys.interval_of(w("1")).unwrap().to_string(), "[2/3, 1]");
        assert_eq!(sys.interval_of(w("10")).unwrap().to_string(), "[2/3, 7/9]");
    }

    #[test]
    fn ternary_matches_expansion() {
        let sys = IntervalSystem::ternary();
        for t in 0..=8 {
            let level = sys.level(t).unwrap();
            for a in Word::all(t) {
                let (lo, hi) = ternary_oracle(a);
                let k = sys.interval_of(a).unwrap();
                assert_eq!((k.lo(), k.hi()), (&lo, &hi));
                assert_eq!(level.interval(a.index()), k);
            }
        }
    }

    #[test]
    fn materialized_and_lazy_agree() {
        let lazy = IntervalSystem::ternary();
        let eager = IntervalSystem::ternary_materialized(6).unwrap();
        for a in Word::all(7) {
            assert_eq!(lazy.interval_of(a).unwrap(), eager.interval_of(a).unwrap());
        }
        assert_eq!(eager.nu(9).unwrap(), ratio(1, 19683));
    }

    #[test]
    fn depth_cap_is_enforced() {
        let sys = IntervalSystem::ternary();
        let deep = Word::zeros(25).unwrap();
        assert!(matches!(sys.interval_of(deep), Err(Error::DepthCap { requested: 25, cap: 24 })));
        assert!(matches!(IntervalSystem::theorem3(5), Err(Error::DepthCap { requested: 25, .. })));
        assert!(IntervalSystem::theorem3(0).is_err());
    }

    #[test]
    fn ladder_schedule() {
        assert_eq!(ladder_levels(3), alloc::vec![(1, 3), (4, 7), (8, 12)]);
        assert_eq!(ladder_levels(4).last(), Some(&(13, 18)));
    }

    #[test]
    fn theorem3_first_stage() {
        let sys = IntervalSystem::theorem3(3).unwrap();
        assert_eq!(sys.interval_of(w("0")).unwrap().to_string(), "[0, 1/3]");
        assert_eq!(sys.interval_of(w("1")).unwrap().to_string(), "[2/3, 1]");
        let ladder = sys.ladder().unwrap();
        assert_eq!(ladder.stage(1).unwrap().eps, ratio(1, 3));
        assert!(ladder.is_strictly_decreasing());
        assert!(ladder.levels_consistent());
        assert_eq!(sys.materialized_depth(), 12);
        // eps_1' = diam K_1 / 4^3
        assert_eq!(ladder.stage(1).unwrap().eps_prime, ratio(1, 192));
    }

    #[test]
    fn theorem3_uniform_levels() {
        let sys = IntervalSystem::theorem3(3).unwrap();
        for s in sys.ladder().unwrap().stages() {
            let l = sys.level(s.t).unwrap();
            assert_eq!(l.max_diam(), s.eps);
            assert_eq!(l.min_diam(), s.eps);
        }
    }

    #[test]
    fn nu_strictly_decreases() {
        for sys in [IntervalSystem::ternary(), IntervalSystem::theorem3(3).unwrap()] {
            let nus: Vec<_> = (0..=16).map(|t| sys.nu(t).unwrap()).collect();
            assert!(nus.windows(2).all(|p| p[0] > p[1]), "{:?}", sys.kind());
        }
    }

    #[test]
    fn resolving_level_ternary() {
        let sys = IntervalSystem::ternary();
        assert_eq!(sys.resolving_level(&ratio(1, 9)), 2);
        assert_eq!(sys.resolving_level(&ratio(1, 10)), 2);
        assert_eq!(sys.resolving_level(&ratio(2, 1)), 0);
    }
}
