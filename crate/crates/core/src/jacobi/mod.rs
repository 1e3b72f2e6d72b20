//! Jacobi polynomials on `[-1, 1]`.
//!
//! Two families are used throughout the crate: the symmetric polynomials
//! `J_p^β = P_p^{(β,β)}`, orthogonal against `(1-x²)^β`, and the general
//! two-parameter `P_p^{(α,β)}`, orthogonal against `(1-x)^α (1+x)^β`.
//! Evaluation always goes through the three-term recurrence, normalized so that
//! `P_p^{(α,β)}(1) = Γ(p+α+1) / (Γ(p+1) Γ(α+1))`.

mod constants;
mod quadrature;

pub use constants::{gamma_p, gamma_pk, gamma_ratio, jacobi_norm_sq, ln_gamma};
pub use quadrature::{cached_rule, gauss_jacobi_rule, gauss_legendre, QuadRule};

use crate::error::{param, Result};

/// Exponent `β` of the symmetric weight `(1-x²)^β`; always `> -1`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct WeightExponent(f64);

impl WeightExponent {
    pub fn new(beta: f64) -> Result<Self> {
        if !(beta > -1.0) || !beta.is_finite() {
            return param(format!(
                "weight exponent must be finite and > -1, got {beta}"
            ));
        }
        Ok(Self(beta))
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    /// The exponent shifted by an integer, as needed by derivative weights.
    pub fn shifted(self, by: f64) -> Result<Self> {
        Self::new(self.0 + by)
    }
}

/// Parameter pair `(α, β)` of `(1-x)^α (1+x)^β`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobiParams {
    pub alpha: f64,
    pub beta: f64,
}

impl JacobiParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > -1.0 && beta > -1.0) || !alpha.is_finite() || !beta.is_finite() {
            return param(format!(
                "Jacobi exponents must both be finite and > -1, got ({alpha}, {beta})"
            ));
        }
        Ok(Self { alpha, beta })
    }

    pub fn symmetric(beta: WeightExponent) -> Self {
        Self {
            alpha: beta.get(),
            beta: beta.get(),
        }
    }

    pub fn legendre() -> Self {
        Self {
            alpha: 0.0,
            beta: 0.0,
        }
    }
}

/// `P_n^{(a,b)}(x)` by forward recurrence. No validation.
pub(crate) fn jacobi_unchecked(n: usize, a: f64, b: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 0.5 * ((a - b) + (a + b + 2.0) * x);
    for k in 2..=n {
        let next = recurrence_step(k, a, b, x, cur, prev);
        prev = cur;
        cur = next;
    }
    cur
}

#[inline]
fn recurrence_step(n: usize, a: f64, b: f64, x: f64, p1: f64, p2: f64) -> f64 {
    let nf = n as f64;
    let c = 2.0 * nf + a + b;
    let a1 = 2.0 * nf * (nf + a + b) * (c - 2.0);
    let a2 = (c - 1.0) * (a * a - b * b);
    let a3 = (c - 1.0) * c * (c - 2.0);
    let a4 = 2.0 * (nf + a - 1.0) * (nf + b - 1.0) * c;
    ((a2 + a3 * x) * p1 - a4 * p2) / a1
}

/// Fills `out[k] = P_k^{(a,b)}(x)` for `k < out.len()`.
pub(crate) fn jacobi_all_unchecked(a: f64, b: f64, x: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = 0.5 * ((a - b) + (a + b + 2.0) * x);
    for k in 2..out.len() {
        out[k] = recurrence_step(k, a, b, x, out[k - 1], out[k - 2]);
    }
}

/// `d^k/dx^k P_n^{(a,b)}(x)`, via the shifted-parameter identity.
pub(crate) fn jacobi_deriv_unchecked(n: usize, k: usize, a: f64, b: f64, x: f64) -> f64 {
    if k > n {
        return 0.0;
    }
    if k == 0 {
        return jacobi_unchecked(n, a, b, x);
    }
    let s = n as f64 + a + b + 1.0;
    let scale = (ln_gamma(s + k as f64) - ln_gamma(s)).exp() * 0.5f64.powi(k as i32);
    scale * jacobi_unchecked(n - k, a + k as f64, b + k as f64, x)
}

/// Values of `d^k/dx^k J_i^β(x)` for `i < out.len()`.
pub(crate) fn symmetric_deriv_all(beta: f64, k: usize, x: f64, out: &mut [f64]) {
    if k == 0 {
        jacobi_all_unchecked(beta, beta, x, out);
        return;
    }
    let n = out.len();
    let mut shifted = vec![0.0; n.saturating_sub(k)];
    let kb = beta + k as f64;
    jacobi_all_unchecked(kb, kb, x, &mut shifted);
    for (i, o) in out.iter_mut().enumerate() {
        if i < k {
            *o = 0.0;
        } else {
            let s = i as f64 + 2.0 * beta + 1.0;
            let scale = (ln_gamma(s + k as f64) - ln_gamma(s)).exp() * 0.5f64.powi(k as i32);
            *o = scale * shifted[i - k];
        }
    }
}

fn check_abscissa(x: f64) -> Result<()> {
    if !(x.abs() <= 1.0) {
        return param(format!("abscissa must lie in [-1, 1], got {x}"));
    }
    Ok(())
}

/// Jacobi polynomial `P_p^{(α,β)}(x)` for `|x| ≤ 1`.
pub fn eval_jacobi(p: usize, params: JacobiParams, x: f64) -> Result<f64> {
    JacobiParams::new(params.alpha, params.beta)?;
    check_abscissa(x)?;
    Ok(jacobi_unchecked(p, params.alpha, params.beta, x))
}

/// `k`-th derivative of the symmetric polynomial `J_p^β` at `x`.
///
/// Uses `J_{p,k}^β = 2^{-k} Γ(p+2β+k+1)/Γ(p+2β+1) · J_{p-k}^{β+k}`. Returns zero
/// when `k > p`.
pub fn eval_jacobi_deriv(p: usize, k: usize, beta: WeightExponent, x: f64) -> Result<f64> {
    check_abscissa(x)?;
    let b = beta.get();
    Ok(jacobi_deriv_unchecked(p, k, b, b, x))
}
