//! Exact rational endpoints and the `num/den` text format.

use alloc::format;
use alloc::string::{String, ToString};
use core::cmp::{max, min};
use core::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Renders `r` as `num/den`, or just `num` when the denominator is one.
pub fn format_fraction(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parses `"7/2187"`, `"3"`, `"0.25"` or `"1e-3"` into an exact rational.
/// Decimal input is converted digit by digit, not through a float.
pub fn parse_fraction(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::InvalidFraction(s.to_string());
    if let Some((n, d)) = t.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match t.find(['e', 'E']) {
        Some(i) => {
            let e: i32 = t[i + 1..].parse().map_err(|_| bad())?;
            (&t[..i], e)
        }
        None => (t, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mut numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    if neg {
        numer = -numer;
    }
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10u32);
    let r = if scale >= 0 {
        BigRational::from_integer(numer * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(numer, num_traits::pow(ten, (-scale) as usize))
    };
    Ok(r)
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Exact rational built from a finite `f64` (every finite double is dyadic).
pub fn from_f64(x: f64) -> Option<BigRational> {
    BigRational::from_float(x)
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Least common multiple of the denominators, used to put a whole level over
/// one denominator.
pub fn lcm_denominator<'a>(values: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    let mut acc = BigInt::one();
    for v in values {
        let d = v.denom();
        if !(&acc % d).is_zero() {
            acc = acc.lcm(d);
        }
    }
    acc
}

/// A non-degenerate closed interval `[lo, hi]` inside `[0, 1]`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct RationalInterval {
    lo: BigRational,
    hi: BigRational,
}

impl RationalInterval {
    pub fn new(lo: BigRational, hi: BigRational) -> Result<Self> {
        if lo.is_negative() || hi > BigRational::one() || lo >= hi {
            return Err(Error::InvalidInterval {
                lo: format_fraction(&lo),
                hi: format_fraction(&hi),
            });
        }
        Ok(RationalInterval { lo, hi })
    }

    /// Skips validation; callers guarantee `0 <= lo < hi <= 1`.
    pub(crate) fn new_unchecked(lo: BigRational, hi: BigRational) -> Self {
        debug_assert!(lo < hi);
        RationalInterval { lo, hi }
    }

    pub fn unit() -> Self {
        RationalInterval {
            lo: BigRational::zero(),
            hi: BigRational::one(),
        }
    }

    pub fn lo(&self) -> &BigRational {
        &self.lo
    }

    pub fn hi(&self) -> &BigRational {
        &self.hi
    }

    pub fn diam(&self) -> BigRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &BigRational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn contains_interval(&self, other: &RationalInterval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }

    /// Distance between the two sets; zero when they intersect.
    pub fn gap(&self, other: &RationalInterval) -> BigRational {
        let g = max(&self.lo, &other.lo) - min(&self.hi, &other.hi);
        if g.is_negative() {
            BigRational::zero()
        } else {
            g
        }
    }

    /// Diameter of the union, i.e. the length of the convex hull.
    pub fn hull_diam(&self, other: &RationalInterval) -> BigRational {
        max(&self.hi, &other.hi) - min(&self.lo, &other.lo)
    }

    pub fn intersects(&self, other: &RationalInterval) -> bool {
        self.lo <= other.hi && other.lo <= self.hi
    }

    pub fn to_f64(&self) -> (f64, f64) {
        (to_f64(&self.lo), to_f64(&self.hi))
    }

    /// Parses `"[lo, hi]"` or `"lo,hi"` with fraction endpoints.
    pub fn parse(s: &str) -> Result<Self> {
        let inner = s.trim().trim_start_matches('[').trim_end_matches(']');
        let (a, b) = inner
            .split_once(',')
            .ok_or_else(|| Error::InvalidFraction(s.to_string()))?;
        Self::new(parse_fraction(a)?, parse_fraction(b)?)
    }
}

impl fmt::Display for RationalInterval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[{}, {}]",
            format_fraction(&self.lo),
            format_fraction(&self.hi)
        )
    }
}
