//! Reference correlation counts evaluated pair by pair from orbit values.
//! Quadratic in `n` and linear in `m`; used to cross-check the packed kernel.

use crate::{Error, Result};

fn check(xs: &[f64], n: usize, m: usize) -> Result<()> {
    if n == 0 || m == 0 {
        return Err(Error::Parameter("n and m must be positive".into()));
    }
    if xs.len() < n + m - 1 {
        return Err(Error::TrajectoryTooShort {
            needed: n + m - 1,
            have: xs.len(),
        });
    }
    Ok(())
}

#[inline]
fn close(xs: &[f64], i: usize, j: usize, m: usize, eps: f64) -> bool {
    (0..m).all(|k| (xs[i + k] - xs[j + k]).abs() <= eps)
}

/// `#{(i, j) in [0, n)^2 : max_{k<m} |x_{i+k} - x_{j+k}| <= eps}`.
pub fn pair_count(xs: &[f64], n: usize, m: usize, eps: f64) -> Result<u64> {
    check(xs, n, m)?;
    let mut c = 0u64;
    for i in 0..n {
        for j in 0..n {
            c += close(xs, i, j, m, eps) as u64;
        }
    }
    Ok(c)
}

/// Same, restricted to segments that end inside the first `n` points.
pub fn pair_count_windowed(xs: &[f64], n: usize, m: usize, eps: f64) -> Result<u64> {
    check(xs, n, 1)?;
    if m > n {
        return Ok(0);
    }
    let mut c = 0u64;
    for i in 0..=n - m {
        for j in 0..=n - m {
            c += close(xs, i, j, m, eps) as u64;
        }
    }
    Ok(c)
}
