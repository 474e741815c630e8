//! Symbolic orbits checked against exact cylinder-pair counts.
//!
//! With `n = k 2^t` every ordered pair of level-`t` words occurs exactly
//! `k^2` times among the orbit index pairs, so pairs counted as certainly
//! recurrent are at least `k^2 N°_m` and pairs counted as possibly
//! recurrent at most `k^2 N_m`.

use std::sync::Arc;

use num_rational::BigRational;
use rdet_core::bounds::{CountProfile, DetBounds, PairRule};
use rdet_core::dynamics::alternating_address;
use rdet_core::rational::format_fraction;
use rdet_core::IntervalSystem;
use serde::Serialize;

use super::sweep::Source;
use super::BoundsSummary;
use crate::config::Radius;
use crate::{Error, Result};

/// Minimum enclosure depth for symbolic orbits.
pub const MIN_ADDRESS_DEPTH: u32 = 20;

/// Address depth used for a level-`t` comparison.
pub fn address_depth(sys: &IntervalSystem, t: u32) -> u32 {
    MIN_ADDRESS_DEPTH.max(t + 8).min(sys.depth_cap())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SandwichRow {
    pub m: usize,
    /// Pairs recurrent for every point of the enclosures.
    pub certain: u64,
    /// Pairs recurrent for some point of the enclosures.
    pub possible: u64,
    pub hull_pairs: u64,
    pub gap_pairs: u64,
    pub corr_ok: bool,
    pub rdet_ok: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SandwichReport {
    pub system: String,
    pub t: u32,
    pub eps: String,
    pub n: usize,
    pub address_depth: u32,
    pub m_cap: usize,
    pub bounds: BoundsSummary,
    pub rows: Vec<SandwichRow>,
    pub violations: usize,
    /// Certain/possible disagreements at `m = 1`.
    pub undecided: u64,
    /// Estimated range of `C_{m_cap}`.
    pub corr_range: (f64, f64),
    /// Estimated range of `rdet_{m_cap}`.
    pub rdet_range: (f64, f64),
}

impl SandwichReport {
    pub fn passed(&self) -> bool {
        self.violations == 0
    }
}

/// Checks an orbit of `periods * 2^t` points for every `m <= m_cap`.
pub fn symbolic_sandwich(
    sys: Arc<IntervalSystem>,
    t: u32,
    eps: &BigRational,
    periods: usize,
    m_cap: usize,
) -> Result<SandwichReport> {
    if periods == 0 || m_cap == 0 {
        return Err(Error::Usage("periods and m_cap must be positive".into()));
    }
    let period = 1usize << t;
    let n = periods * period;
    let depth = address_depth(&sys, t);
    if depth < t {
        return Err(rdet_core::Error::DepthCap {
            requested: t,
            cap: sys.depth_cap(),
        }
        .into());
    }
    let gap = CountProfile::build(&sys, t, eps, PairRule::Gap)?;
    let hull = CountProfile::build(&sys, t, eps, PairRule::Hull)?;
    let source = Source::Symbolic {
        sys: sys.clone(),
        alpha: alternating_address(depth),
    };
    let profile = source.profile(&Radius::new(eps.clone(), format_fraction(eps)), n, m_cap)?;
    let ni = profile.n_values.len() - 1;
    debug_assert_eq!(profile.n_values[ni], n);
    let certain = &profile.counts[ni].extended;
    let possible = &profile.upper.as_ref().expect("enclosure profile")[ni].extended;

    let k2 = (periods as u128) * (periods as u128);
    let (n_1, n_circ_1) = (gap.count(Some(1)) as u128, hull.count(Some(1)) as u128);
    let rows: Vec<SandwichRow> = (1..=m_cap)
        .map(|m| {
            let (hull_pairs, gap_pairs) = (hull.count(Some(m as u64)), gap.count(Some(m as u64)));
            let (c, p) = (certain[m - 1] as u128, possible[m - 1] as u128);
            let corr_ok = c >= k2 * hull_pairs as u128 && p <= k2 * gap_pairs as u128 && c <= p;
            // certain_m / possible_1 >= N°_m / N_1 and possible_m / certain_1 <= N_m / N°_1
            let (c1, p1) = (certain[0] as u128, possible[0] as u128);
            let rdet_ok = n_circ_1 == 0
                || (c * n_1 >= hull_pairs as u128 * p1 && p * n_circ_1 <= gap_pairs as u128 * c1);
            SandwichRow {
                m,
                certain: certain[m - 1],
                possible: possible[m - 1],
                hull_pairs,
                gap_pairs,
                corr_ok,
                rdet_ok,
            }
        })
        .collect();
    let violations = rows.iter().filter(|r| !(r.corr_ok && r.rdet_ok)).count();
    let last = rows.last().unwrap();
    let nn = (n * n) as f64;
    Ok(SandwichReport {
        system: sys.kind().name().to_string(),
        t,
        eps: format_fraction(eps),
        n,
        address_depth: depth,
        m_cap,
        bounds: BoundsSummary::from(&DetBounds::from_profiles(&gap, &hull, eps, Some(m_cap as u64))),
        undecided: rows[0].possible - rows[0].certain,
        corr_range: (last.certain as f64 / nn, last.possible as f64 / nn),
        rdet_range: (
            last.certain as f64 / rows[0].possible as f64,
            last.possible as f64 / rows[0].certain as f64,
        ),
        rows,
        violations,
    })
}
