//! Bessel functions of the first kind for integer order.
//!
//! The ascending series is used for small arguments; above
//! [`SERIES_LIMIT`] the value comes from Miller's backward recurrence,
//! normalised with `J_0 + 2 Σ J_2k = 1`.

use crate::error::{Error, Result};

/// Largest |x| for which accuracy is validated (absolute error ≤ 1e-12).
pub const MAX_ARGUMENT: f64 = 50.0;

const SERIES_LIMIT: f64 = 12.0;
const RESCALE: f64 = 1e250;

/// `J_n(x)` for any integer order `n` and `|x| ≤ 50`.
pub fn bessel_j(order: i64, x: f64) -> Result<f64> {
    if !x.is_finite() || x.abs() > MAX_ARGUMENT {
        return Err(Error::Range(format!("bessel_j argument {x} outside [-{MAX_ARGUMENT}, {MAX_ARGUMENT}]")));
    }
    let n = order.unsigned_abs();
    // J_{-n} = (-1)^n J_n and J_n(-x) = (-1)^n J_n(x)
    let mut sign = 1.0;
    if order < 0 && n % 2 == 1 {
        sign = -sign;
    }
    if x < 0.0 && n % 2 == 1 {
        sign = -sign;
    }
    let ax = x.abs();
    if ax == 0.0 {
        return Ok(if n == 0 { 1.0 } else { 0.0 });
    }
    let value = if ax <= SERIES_LIMIT { series(n, ax) } else { miller(n, ax) };
    Ok(sign * value)
}

fn series(n: u64, x: f64) -> f64 {
    let half = 0.5 * x;
    let mut term = 1.0;
    for j in 1..=n {
        term *= half / j as f64;
        if term == 0.0 {
            return 0.0;
        }
    }
    let q = -half * half;
    let mut sum = term;
    let mut k = 0u64;
    loop {
        k += 1;
        term *= q / (k as f64 * (k + n) as f64);
        sum += term;
        let past_peak = k as f64 > half;
        if past_peak && term.abs() <= 1e-17 * sum.abs().max(f64::MIN_POSITIVE) {
            break;
        }
        if k > 400 {
            break;
        }
    }
    sum
}

fn miller(n: u64, x: f64) -> f64 {
    let top = (n as f64).max(x.ceil());
    let mut start = (top + 30.0 + (60.0 * top).sqrt()) as u64;
    start += start % 2;
    let two_over_x = 2.0 / x;
    let mut next = 0.0; // J_{k+1}
    let mut cur = 1e-30; // J_k
    let mut norm = 0.0;
    let mut wanted = 0.0;
    for k in (1..=start).rev() {
        if k == n {
            wanted = cur;
        }
        if k % 2 == 0 {
            norm += 2.0 * cur;
        }
        let prev = k as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        if cur.abs() > RESCALE {
            cur /= RESCALE;
            next /= RESCALE;
            norm /= RESCALE;
            wanted /= RESCALE;
        }
    }
    // cur now holds J_0
    if n == 0 {
        wanted = cur;
    }
    norm += cur;
    wanted / norm
}
