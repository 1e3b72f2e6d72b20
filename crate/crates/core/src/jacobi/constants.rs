//! Normalization constants of Jacobi polynomials and Γ-ratio helpers.
//!
//! Everything is evaluated in log space so that degrees of several hundred
//! stay finite.

use std::f64::consts::LN_2;

use super::{JacobiParams, WeightExponent};
use crate::error::{param, Result};

/// `ln Γ(x)` for `x > 0`.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0, "ln_gamma called with non-positive argument {x}");
    libm::lgamma(x)
}

/// `γ_p^β = ∫ (J_p^β)² (1-x²)^β dx`.
pub fn gamma_p(beta: WeightExponent, p: usize) -> f64 {
    let b = beta.get();
    let pf = p as f64;
    if p == 0 {
        // (2β+1)Γ(2β+1) = Γ(2β+2) keeps the argument positive for β ≤ -1/2
        return ((2.0 * b + 1.0) * LN_2 + 2.0 * ln_gamma(b + 1.0) - ln_gamma(2.0 * b + 2.0)).exp();
    }
    ((2.0 * b + 1.0) * LN_2 + 2.0 * ln_gamma(pf + b + 1.0)
        - (2.0 * pf + 2.0 * b + 1.0).ln()
        - ln_gamma(pf + 1.0)
        - ln_gamma(pf + 2.0 * b + 1.0))
    .exp()
}

/// `γ_{p,k}^β = ∫ (d^k J_p^β)² (1-x²)^{β+k} dx`, for `k ≤ p`.
pub fn gamma_pk(beta: WeightExponent, p: usize, k: usize) -> Result<f64> {
    if k > p {
        return param(format!("derivative order {k} exceeds degree {p}"));
    }
    if k == 0 {
        return Ok(gamma_p(beta, p));
    }
    let b = beta.get();
    let pf = p as f64;
    let kf = k as f64;
    Ok(
        ((2.0 * b + 1.0) * LN_2 + ln_gamma(pf + 2.0 * b + kf + 1.0) + 2.0 * ln_gamma(pf + b + 1.0)
            - (2.0 * pf + 2.0 * b + 1.0).ln()
            - ln_gamma(pf + 1.0 - kf)
            - 2.0 * ln_gamma(pf + 2.0 * b + 1.0))
        .exp(),
    )
}

/// Squared norm of `P_n^{(α,β)}` against `(1-x)^α (1+x)^β`.
pub fn jacobi_norm_sq(n: usize, params: JacobiParams) -> f64 {
    let (a, b) = (params.alpha, params.beta);
    let nf = n as f64;
    if n == 0 {
        return ((a + b + 1.0) * LN_2 + ln_gamma(a + 1.0) + ln_gamma(b + 1.0)
            - ln_gamma(a + b + 2.0))
        .exp();
    }
    ((a + b + 1.0) * LN_2 + ln_gamma(nf + a + 1.0) + ln_gamma(nf + b + 1.0)
        - (2.0 * nf + a + b + 1.0).ln()
        - ln_gamma(nf + a + b + 1.0)
        - ln_gamma(nf + 1.0))
    .exp()
}

/// `Γ(n+α) / (Γ(n) n^α)`, which tends to 1 as `n → ∞`.
///
/// The integer part of `α` is peeled off with the functional equation, so
/// integer exponents give exact ratios.
pub fn gamma_ratio(n: usize, alpha: f64) -> Result<f64> {
    if n == 0 {
        return param("gamma_ratio needs n >= 1");
    }
    let nf = n as f64;
    if !alpha.is_finite() || nf + alpha <= 0.0 {
        return param(format!(
            "gamma_ratio needs n + alpha > 0, got n={n}, alpha={alpha}"
        ));
    }
    let m = alpha.floor();
    let r = alpha - m;
    if m.abs() > 64.0 {
        return Ok((ln_gamma(nf + alpha) - ln_gamma(nf) - alpha * nf.ln()).exp());
    }
    let mut ratio = 1.0;
    if m >= 0.0 {
        for i in 0..m as usize {
            ratio *= (nf + r + i as f64) / nf;
        }
    } else {
        for i in 1..=(-m) as usize {
            ratio *= nf / (nf + r - i as f64);
        }
    }
    if r > 0.0 {
        ratio *= (ln_gamma(nf + r) - ln_gamma(nf) - r * nf.ln()).exp();
    }
    Ok(ratio)
}
