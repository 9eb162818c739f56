//! Exact 64-bit binomial and falling-factorial arithmetic, plus log-domain
//! variants for parameter ranges where the exact values overflow.

use crate::{Error, Result};
use alloc::format;

/// Binomial coefficient C(n, k) in exact integer arithmetic.
///
/// Fails with a capacity error once the value no longer fits in `i64` range
/// (state-space sizes at or beyond 2^63 are rejected rather than truncated).
pub fn binomial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 1..=k {
        acc = acc * (n - k + i) as u128 / i as u128;
        if acc >= (1u128 << 63) {
            return Err(Error::Capacity(format!("binomial({n}, {k}) exceeds 2^63")));
        }
    }
    Ok(acc as u64)
}

/// Falling factorial (n)_k = n (n-1) ... (n-k+1).
pub fn falling_factorial(n: u64, k: u64) -> Result<u64> {
    if k > n {
        return Ok(0);
    }
    let mut acc: u128 = 1;
    for i in 0..k {
        acc *= (n - i) as u128;
        if acc >= (1u128 << 63) {
            return Err(Error::Capacity(format!(
                "falling factorial ({n})_{k} exceeds 2^63"
            )));
        }
    }
    Ok(acc as u64)
}

/// Factorial k! with the same capacity policy.
pub fn factorial(k: u64) -> Result<u64> {
    falling_factorial(k, k)
}

/// ln C(n, k) via log-gamma, valid for n far beyond integer capacity.
pub fn ln_binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return f64::NEG_INFINITY;
    }
    let (n, k) = (n as f64, k as f64);
    libm::lgamma(n + 1.0) - libm::lgamma(k + 1.0) - libm::lgamma(n - k + 1.0)
}

/// ln( C(n, i) - C(n, i-1) ) for 1 <= i <= n/2, where the difference is
/// positive. Written as ln C(n, i) + ln(1 - i/(n-i+1)) so it stays finite for
/// n up to 10^6 and beyond.
pub fn ln_binomial_diff(n: u64, i: u64) -> f64 {
    debug_assert!(i >= 1 && 2 * i <= n);
    let ratio = i as f64 / (n - i + 1) as f64;
    ln_binomial(n, i) + libm::log1p(-ratio)
}

/// Stable log-sum-exp over a slice of log-domain terms.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    let sum: f64 = terms
        .iter()
        .map(|&t| {
            let d = t - max;
            if d < -745.0 {
                0.0
            } else {
                libm::exp(d)
            }
        })
        .sum();
    max + libm::log(sum)
}
