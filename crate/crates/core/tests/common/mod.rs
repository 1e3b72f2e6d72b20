//! Shared oracles for the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

/// Tanh-sinh quadrature on (-1, 1). `f` receives `x` and `1 - x²`, the latter
/// computed without cancellation so endpoint-singular weights stay accurate.
pub fn tanh_sinh(f: &dyn Fn(f64, f64) -> f64) -> f64 {
    let h = 1.0 / 64.0;
    let mut s = 0.0;
    for i in -400..=400 {
        let t = i as f64 * h;
        let u = 0.5 * PI * t.sinh();
        let x = u.tanh();
        let om = 4.0 / (u.exp() + (-u).exp()).powi(2);
        let w = 0.5 * PI * t.cosh() / u.cosh().powi(2);
        if om > 0.0 && w.is_finite() {
            s += w * f(x, om);
        }
    }
    s * h
}

/// `∫ g(x) (1-x²)^b dx` by tanh-sinh.
pub fn weighted_integral(b: f64, g: &dyn Fn(f64) -> f64) -> f64 {
    tanh_sinh(&|x, om| g(x) * om.powf(b))
}

/// `P_n^{(a,b)}(x)` from the explicit sum, independent of the recurrence.
pub fn jacobi_explicit(n: usize, a: f64, b: f64, x: f64) -> f64 {
    // P_n = Σ_s C(n+a, n-s) C(n+b, s) ((x-1)/2)^s ((x+1)/2)^{n-s}
    let binom = |top: f64, k: usize| {
        let mut r = 1.0;
        for i in 0..k {
            r *= (top - i as f64) / (i + 1) as f64;
        }
        r
    };
    (0..=n)
        .map(|s| {
            binom(n as f64 + a, n - s)
                * binom(n as f64 + b, s)
                * ((x - 1.0) / 2.0).powi(s as i32)
                * ((x + 1.0) / 2.0).powi((n - s) as i32)
        })
        .sum()
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(f64::MIN_POSITIVE)
}
