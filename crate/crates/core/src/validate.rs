//! Admissibility and stage-inequality checks with exact witnesses.
//!
//! Failures are collected into the report rather than returned as errors.
//! Each record carries the tightest (or first violating) instance so that a
//! passing record still shows how much room was left.

use alloc::borrow::Cow;
use alloc::string::String;
use alloc::vec::Vec;
use alloc::{format, vec};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::system::{IntervalSystem, Level, SystemKind};
use crate::word::{spatial_rank, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CheckRecord {
    pub check: &'static str,
    pub level: Option<u32>,
    pub stage: Option<u32>,
    pub passed: bool,
    pub checked: u64,
    pub violations: u64,
    pub words: Vec<Word>,
    pub values: Vec<(&'static str, BigRational)>,
    pub note: Option<String>,
}

impl CheckRecord {
    fn new(check: &'static str) -> Self {
        CheckRecord {
            check,
            level: None,
            stage: None,
            passed: true,
            checked: 0,
            violations: 0,
            words: Vec::new(),
            values: Vec::new(),
            note: None,
        }
    }

    fn at_level(mut self, t: u32) -> Self {
        self.level = Some(t);
        self
    }

    fn at_stage(mut self, n: u32) -> Self {
        self.stage = Some(n);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ValidationReport {
    pub kind: SystemKind,
    pub depth: u32,
    pub records: Vec<CheckRecord>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckRecord> {
        self.records.iter().filter(|r| !r.passed)
    }

    pub fn find(&self, check: &str) -> impl Iterator<Item = &CheckRecord> + '_ {
        let check = String::from(check);
        self.records.iter().filter(move |r| r.check == check)
    }
}

fn frac(n: BigInt, d: &BigInt) -> BigRational {
    BigRational::new(n, d.clone())
}

/// Tracks the instance with the smallest margin.
struct Tightest {
    margin: Option<BigRational>,
    words: Vec<Word>,
    values: Vec<(&'static str, BigRational)>,
}

impl Tightest {
    fn new() -> Self {
        Tightest {
            margin: None,
            words: Vec::new(),
            values: Vec::new(),
        }
    }

    fn offer(
        &mut self,
        margin: BigRational,
        words: impl FnOnce() -> Vec<Word>,
        values: impl FnOnce() -> Vec<(&'static str, BigRational)>,
    ) {
        if self.margin.as_ref().is_none_or(|m| &margin < m) {
            self.margin = Some(margin);
            self.words = words();
            self.values = values();
        }
    }

    fn into_record(self, mut rec: CheckRecord) -> CheckRecord {
        rec.words = self.words;
        rec.values = self.values;
        if let Some(m) = self.margin {
            rec.values.push(("margin", m));
        }
        rec
    }
}

fn check_children(parent: &Level, child: &Level, out: &mut Vec<CheckRecord>) {
    let t = parent.t();
    let n = parent.len();
    let (dp, dc) = (parent.denom(), child.denom());
    let mut left = CheckRecord::new("left-endpoint-shared").at_level(t + 1);
    let mut right = CheckRecord::new("right-endpoint-shared").at_level(t + 1);
    let mut disjoint = CheckRecord::new("siblings-disjoint").at_level(t + 1);
    let mut degenerate = CheckRecord::new("non-degenerate").at_level(t + 1);
    let mut tight_gap = Tightest::new();
    let mut tight_diam = Tightest::new();
    for i in 0..n {
        let (a0, a1) = (i, i + n);
        let a = Word::from_parts(i as u64, t);
        let y = &parent.lo_numers()[i] * dc;
        let z = &parent.hi_numers()[i] * dc;
        let y0 = &child.lo_numers()[a0] * dp;
        let z1 = &child.hi_numers()[a1] * dp;
        left.checked += 1;
        if y != y0 {
            left.violations += 1;
            if left.words.is_empty() {
                left.words = vec![a];
                left.values = vec![("y_a", frac(y, &(dp * dc))), ("y_a0", frac(y0, &(dp * dc)))];
            }
        }
        right.checked += 1;
        if z != z1 {
            right.violations += 1;
            if right.words.is_empty() {
                right.words = vec![a];
                right.values = vec![("z_a", frac(z, &(dp * dc))), ("z_a1", frac(z1, &(dp * dc)))];
            }
        }
        let gap = &child.lo_numers()[a1] - &child.hi_numers()[a0];
        disjoint.checked += 1;
        if gap <= BigInt::zero() {
            disjoint.violations += 1;
        }
        tight_gap.offer(
            frac(gap, dc),
            || vec![child_word(a, 0), child_word(a, 1)],
            || {
                vec![
                    ("z_a0", child.hi(a0)),
                    ("y_a1", child.lo(a1)),
                ]
            },
        );
        for c in [a0, a1] {
            let d = &child.hi_numers()[c] - &child.lo_numers()[c];
            degenerate.checked += 1;
            if d <= BigInt::zero() {
                degenerate.violations += 1;
            }
            tight_diam.offer(
                frac(d, dc),
                || vec![Word::from_parts(c as u64, t + 1)],
                || vec![("y", child.lo(c)), ("z", child.hi(c))],
            );
        }
    }
    for r in [&mut left, &mut right] {
        r.passed = r.violations == 0;
    }
    disjoint.passed = disjoint.violations == 0;
    degenerate.passed = degenerate.violations == 0;
    out.push(left);
    out.push(right);
    out.push(tight_gap.into_record(disjoint));
    out.push(tight_diam.into_record(degenerate));
}

fn child_word(a: Word, u: u8) -> Word {
    a.child(u).unwrap_or(a)
}

/// Smallest gap between distinct intervals of a level and where it occurs.
pub fn min_separation(level: &Level) -> Option<(BigRational, Word, Word)> {
    let t = level.t();
    let n = level.len() as u64;
    let mut best: Option<(BigInt, u64, u64)> = None;
    for r in 0..n.saturating_sub(1) {
        let a = spatial_rank(r, t);
        let b = spatial_rank(r + 1, t);
        let g = &level.lo_numers()[b as usize] - &level.hi_numers()[a as usize];
        if best.as_ref().is_none_or(|(m, _, _)| &g < m) {
            best = Some((g, a, b));
        }
    }
    best.map(|(g, a, b)| {
        (
            frac(g, level.denom()),
            Word::from_parts(a, t),
            Word::from_parts(b, t),
        )
    })
}

fn max_diam_with_word(level: &Level, skip: Option<usize>) -> Option<(BigRational, Word)> {
    let mut best: Option<(BigInt, usize)> = None;
    for i in 0..level.len() {
        if Some(i) == skip {
            continue;
        }
        let d = &level.hi_numers()[i] - &level.lo_numers()[i];
        if best.as_ref().is_none_or(|(m, _)| &d > m) {
            best = Some((d, i));
        }
    }
    best.map(|(d, i)| (frac(d, level.denom()), Word::from_parts(i as u64, level.t())))
}

fn leq_record(
    check: &'static str,
    small: (&'static str, BigRational),
    large: (&'static str, BigRational),
    words: Vec<Word>,
) -> CheckRecord {
    let mut r = CheckRecord::new(check);
    r.checked = 1;
    r.passed = small.1 <= large.1;
    r.violations = u64::from(!r.passed);
    r.words = words;
    r.values = vec![small, large];
    r
}

/// Checks admissibility through `depth` and, for the oscillating
/// construction, the stage inequalities of every stage that fits.
pub fn validate(sys: &IntervalSystem, depth: u32) -> ValidationReport {
    let mut records = Vec::new();
    let depth = if depth > sys.depth_cap() {
        let mut r = CheckRecord::new("depth-cap");
        r.passed = false;
        r.violations = 1;
        r.note = Some(format!("requested depth {depth} exceeds cap {}", sys.depth_cap()));
        records.push(r);
        sys.depth_cap()
    } else {
        depth
    };

    let levels: Vec<Cow<'_, Level>> = (0..=depth).filter_map(|t| sys.level(t).ok()).collect();

    let root = &levels[0];
    let mut r = CheckRecord::new("root-is-unit").at_level(0);
    r.checked = 1;
    r.passed = root.lo(0).is_zero() && root.hi(0).is_one();
    r.violations = u64::from(!r.passed);
    r.values = vec![("y", root.lo(0)), ("z", root.hi(0))];
    records.push(r);

    for pair in levels.windows(2) {
        check_children(&pair[0], &pair[1], &mut records);
    }

    let nus: Vec<BigRational> = levels.iter().map(|l| l.max_diam()).collect();
    let mut r = CheckRecord::new("max-diameter-decreasing");
    let mut tight = Tightest::new();
    for w in nus.windows(2) {
        r.checked += 1;
        if w[1] >= w[0] {
            r.violations += 1;
        }
        // largest ratio is the slowest decay
        let margin = BigRational::one() - &w[1] / &w[0];
        tight.offer(
            margin,
            Vec::new,
            || vec![("nu_t", w[0].clone()), ("nu_t+1", w[1].clone())],
        );
    }
    r.passed = r.violations == 0;
    records.push(tight.into_record(r));

    if let Some(ladder) = sys.ladder() {
        let mut r = CheckRecord::new("ladder-decreasing");
        r.checked = ladder.len() as u64;
        r.passed = ladder.is_strictly_decreasing() && ladder.levels_consistent();
        r.violations = u64::from(!r.passed);
        records.push(r);

        for s in ladder.stages().iter().filter(|s| s.t_prime <= depth) {
            let lt = &levels[s.t as usize];
            let (dmax, wmax) = max_diam_with_word(lt, None).expect("non-empty level");
            records.push(
                leq_record("stage-diameter", ("max_diam", dmax), ("eps", s.eps.clone()), vec![wmax])
                    .at_level(s.t)
                    .at_stage(s.n),
            );
            let rec = match min_separation(lt) {
                Some((gap, a, b)) => {
                    leq_record("stage-separation", ("eps", s.eps.clone()), ("min_gap", gap), vec![a, b])
                }
                None => {
                    let mut r = CheckRecord::new("stage-separation");
                    r.note = Some("single interval".into());
                    r
                }
            };
            records.push(rec.at_level(s.t).at_stage(s.n));

            let coarse = s.t_prime - s.n;
            let lc = &levels[coarse as usize];
            let ones = lc.len() - 1;
            if let Some((dmax, wmax)) = max_diam_with_word(lc, Some(ones)) {
                records.push(
                    leq_record(
                        "stage-small-off-branch",
                        ("max_diam", dmax),
                        ("eps_prime", s.eps_prime.clone()),
                        vec![wmax],
                    )
                    .at_level(coarse)
                    .at_stage(s.n),
                );
            }
            let lp = &levels[s.t_prime as usize];
            let n = lp.len();
            let (i_last, i_prev) = (n - 1, n / 2 - 1);
            let gap = frac(&lp.lo_numers()[i_last] - &lp.hi_numers()[i_prev], lp.denom());
            records.push(
                leq_record(
                    "stage-branch-gap",
                    ("eps_prime", s.eps_prime.clone()),
                    ("gap", gap),
                    vec![
                        Word::from_parts(i_prev as u64, s.t_prime),
                        Word::from_parts(i_last as u64, s.t_prime),
                    ],
                )
                .at_level(s.t_prime)
                .at_stage(s.n),
            );
        }
    }

    ValidationReport {
        kind: sys.kind(),
        depth,
        records,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ratio, RationalInterval};

    #[test]
    fn ternary_passes() {
        let report = validate(&IntervalSystem::ternary(), 8);
        assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
        let gap = report.find("siblings-disjoint").next().unwrap();
        assert_eq!(gap.values.last().unwrap().1, ratio(1, 3));
    }

    #[test]
    fn overlapping_siblings_fail_with_witness() {
        let k = |a: i64, b: i64, d: i64| RationalInterval::new(ratio(a, d), ratio(b, d)).unwrap();
        let sys = IntervalSystem::from_levels(vec![
            vec![k(0, 1, 1)],
            vec![k(0, 2, 3), k(1, 3, 3)],
        ])
        .unwrap();
        let report = validate(&sys, 1);
        assert!(!report.passed());
        let bad: Vec<_> = report.failures().collect();
        assert_eq!(bad.len(), 1);
        assert_eq!(bad[0].check, "siblings-disjoint");
        assert_eq!(bad[0].words, vec![Word::parse("0").unwrap(), Word::parse("1").unwrap()]);
        assert_eq!(bad[0].values[0], ("z_a0", ratio(2, 3)));
        assert_eq!(bad[0].values[1], ("y_a1", ratio(1, 3)));
    }

    #[test]
    fn theorem3_passes_all_stages() {
        let sys = IntervalSystem::theorem3(3).unwrap();
        let report = validate(&sys, 14);
        assert!(report.passed(), "{:?}", report.failures().collect::<Vec<_>>());
        assert_eq!(report.find("stage-branch-gap").count(), 3);
        let first = report.find("stage-separation").next().unwrap();
        assert_eq!(first.values[0], ("eps", ratio(1, 3)));
        assert_eq!(first.values[1], ("min_gap", ratio(1, 3)));
    }

    #[test]
    fn depth_beyond_cap_is_reported() {
        let report = validate(&IntervalSystem::ternary().with_depth_cap(6).unwrap(), 8);
        assert!(!report.passed());
        assert_eq!(report.failures().next().unwrap().check, "depth-cap");
    }
}
