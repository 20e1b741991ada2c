//! Floating-point special functions: normalized Hermite functions, Laguerre
//! polynomials and the regularized upper incomplete gamma function of
//! integer order.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::index::MultiIndex;

/// Largest index accepted by the recurrences in this module.
pub const MAX_INDEX: u32 = 200;

fn check_index(k: u32) -> Result<()> {
    if k > MAX_INDEX {
        return Err(Error::IndexOutOfRange {
            index: k as usize,
            max: MAX_INDEX as usize,
        });
    }
    Ok(())
}

/// L²-normalized Hermite function `h_k(x)`.
///
/// Runs the recurrence on the function values themselves, with the Gaussian
/// already folded into the seed, so nothing overflows for large `k`.
pub fn hermite_h(k: u32, x: f64) -> Result<f64> {
    check_index(k)?;
    Ok(hermite_h_unchecked(k, x))
}

pub(crate) fn hermite_h_unchecked(k: u32, x: f64) -> f64 {
    let h0 = PI.powf(-0.25) * (-0.5 * x * x).exp();
    if k == 0 {
        return h0;
    }
    let mut prev = h0;
    let mut cur = std::f64::consts::SQRT_2 * x * h0;
    for j in 1..k {
        let jf = j as f64;
        let next = x * (2.0 / (jf + 1.0)).sqrt() * cur - (jf / (jf + 1.0)).sqrt() * prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// `H_μ(x) = Π_j h_{μ_j}(x_j)`.
pub fn hermite_multi(mu: &MultiIndex, x: &[f64]) -> Result<f64> {
    mu.check_dim(x.len())?;
    mu.entries()
        .iter()
        .zip(x)
        .map(|(&k, &xj)| hermite_h(k, xj))
        .product()
}

/// `L_j^α(x)` by the three-term recurrence.
pub fn laguerre_eval(j: u32, alpha: u32, x: f64) -> Result<f64> {
    check_index(j)?;
    Ok(laguerre_unchecked(j, alpha, x))
}

pub(crate) fn laguerre_unchecked(j: u32, alpha: u32, x: f64) -> f64 {
    let a = alpha as f64;
    if j == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + a - x;
    for k in 1..j {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0 + a - x) * cur - (kf + a) * prev) / (kf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// `Γ(n, x)/(n−1)!` for integer `n ≥ 1`, via `e^(−x) Σ_{k<n} x^k/k!`.
///
/// Underflows to zero once `e^(−x)` does (around `x ≈ 745`). Values within
/// rounding of 1 are returned as 1.
pub fn regularized_upper_gamma(n: u32, x: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::InvalidArgument(
            "gamma order must be at least 1".into(),
        ));
    }
    if !(x >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "gamma argument must be non-negative, got {x}"
        )));
    }
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..n {
        term *= x / k as f64;
        sum += term;
    }
    // Rounding can push the product a hair above 1 when x is tiny.
    Ok(((-x).exp() * sum).min(1.0))
}
