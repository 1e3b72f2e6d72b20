//! Gauss-Jacobi quadrature.
//!
//! Nodes come from the eigenvalues of the symmetric tridiagonal Jacobi matrix
//! and are then polished with a few Newton steps on `P_n^{(α,β)}`. Weights use
//! the closed form in terms of `P_n'` at the nodes, which is more accurate than
//! the first eigenvector components.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

use super::{jacobi_unchecked, ln_gamma, JacobiParams};
use crate::error::{param, Result};

/// Nodes and weights for `∫ f(x) (1-x)^α (1+x)^β dx` on `(-1, 1)`.
#[derive(Debug, Clone)]
pub struct QuadRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    params: JacobiParams,
}

impl QuadRule {
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn params(&self) -> JacobiParams {
        self.params
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Highest polynomial degree integrated exactly against the weight.
    pub fn exactness(&self) -> usize {
        2 * self.nodes.len() - 1
    }

    pub fn iter(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().copied().zip(self.weights.iter().copied())
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.iter().map(|(x, w)| w * f(x)).sum()
    }
}

/// Builds an `n`-point Gauss-Jacobi rule from scratch.
pub fn gauss_jacobi_rule(n: usize, params: JacobiParams) -> Result<QuadRule> {
    if n == 0 {
        return param("a quadrature rule needs at least one node");
    }
    let params = JacobiParams::new(params.alpha, params.beta)?;
    let (a, b) = (params.alpha, params.beta);

    let mut nodes = eigen_nodes(n, a, b);
    for x in nodes.iter_mut() {
        *x = newton_polish(n, a, b, *x);
    }
    nodes.sort_by(f64::total_cmp);
    if a == b {
        for i in 0..n / 2 {
            let m = 0.5 * (nodes[n - 1 - i] - nodes[i]);
            nodes[i] = -m;
            nodes[n - 1 - i] = m;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
    }

    let nf = n as f64;
    let log_c =
        (a + b + 1.0) * std::f64::consts::LN_2 + ln_gamma(nf + a + 1.0) + ln_gamma(nf + b + 1.0)
            - ln_gamma(nf + a + b + 1.0)
            - ln_gamma(nf + 1.0);
    let c = log_c.exp();
    let weights: Vec<f64> = nodes
        .iter()
        .map(|&x| {
            let d = derivative(n, a, b, x);
            c / ((1.0 - x * x) * d * d)
        })
        .collect();

    if nodes.iter().any(|x| !(x.abs() < 1.0)) || weights.iter().any(|w| !(*w > 0.0)) {
        return Err(crate::error::Error::Solver(format!(
            "Gauss-Jacobi construction lost accuracy for n={n}, params=({a}, {b})"
        )));
    }
    Ok(QuadRule {
        nodes,
        weights,
        params,
    })
}

fn eigen_nodes(n: usize, a: f64, b: f64) -> Vec<f64> {
    let mut t = DMatrix::<f64>::zeros(n, n);
    let ab = a + b;
    t[(0, 0)] = (b - a) / (ab + 2.0);
    for k in 1..n {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        t[(k, k)] = (b * b - a * a) / (s * (s + 2.0));
        let off = if k == 1 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * kf * (kf + a) * (kf + b) * (kf + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        let off = off.sqrt();
        t[(k, k - 1)] = off;
        t[(k - 1, k)] = off;
    }
    SymmetricEigen::new(t).eigenvalues.iter().copied().collect()
}

/// `d/dx P_n^{(a,b)}(x)`.
fn derivative(n: usize, a: f64, b: f64, x: f64) -> f64 {
    0.5 * (n as f64 + a + b + 1.0) * jacobi_unchecked(n - 1, a + 1.0, b + 1.0, x)
}

fn newton_polish(n: usize, a: f64, b: f64, mut x: f64) -> f64 {
    for _ in 0..8 {
        let f = jacobi_unchecked(n, a, b, x);
        let d = derivative(n, a, b, x);
        let step = f / d;
        if !step.is_finite() {
            break;
        }
        let next = x - step;
        if !(next.abs() < 1.0) {
            break;
        }
        x = next;
        if step.abs() <= 1e-15 * (1.0 + x.abs()) {
            break;
        }
    }
    x
}

type RuleKey = (usize, u64, u64);

fn cache() -> &'static Mutex<HashMap<RuleKey, Arc<QuadRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<QuadRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Shared, memoized version of [`gauss_jacobi_rule`].
pub fn cached_rule(n: usize, params: JacobiParams) -> Result<Arc<QuadRule>> {
    let key = (n, params.alpha.to_bits(), params.beta.to_bits());
    if let Some(rule) = cache().lock().unwrap().get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gauss_jacobi_rule(n, params)?);
    cache()
        .lock()
        .unwrap()
        .entry(key)
        .or_insert_with(|| Arc::clone(&rule));
    Ok(rule)
}

/// Memoized `n`-point Gauss-Legendre rule.
pub fn gauss_legendre(n: usize) -> Result<Arc<QuadRule>> {
    cached_rule(n, JacobiParams::legendre())
}
