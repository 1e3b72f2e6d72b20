//! Jacobi-Fourier expansions on the reference square `Q = (-1, 1)²`, the
//! truncation projection, weighted Sobolev norms and edge traces.

use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::jacobi::{
    cached_rule, gamma_p, gamma_pk, jacobi_all_unchecked, symmetric_deriv_all, JacobiParams,
    QuadRule, WeightExponent,
};

/// A scalar field on the reference square, optionally with its gradient.
pub trait RefFunction: Sync {
    fn value(&self, x: f64, y: f64) -> f64;

    /// Analytic gradient, if known. Norms of order one need it.
    fn gradient(&self, _x: f64, _y: f64) -> Option<[f64; 2]> {
        None
    }
}

/// Wraps a value-only closure.
pub struct ValueFn<F>(pub F);

impl<F: Fn(f64, f64) -> f64 + Sync> RefFunction for ValueFn<F> {
    fn value(&self, x: f64, y: f64) -> f64 {
        (self.0)(x, y)
    }
}

/// Wraps a closure together with its gradient.
pub struct GradFn<F, G> {
    pub value: F,
    pub gradient: G,
}

impl<F, G> RefFunction for GradFn<F, G>
where
    F: Fn(f64, f64) -> f64 + Sync,
    G: Fn(f64, f64) -> [f64; 2] + Sync,
{
    fn value(&self, x: f64, y: f64) -> f64 {
        (self.value)(x, y)
    }

    fn gradient(&self, x: f64, y: f64) -> Option<[f64; 2]> {
        Some((self.gradient)(x, y))
    }
}

/// One-dimensional expansion `Σ b_i J_i^β(t)`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiSeries {
    beta: WeightExponent,
    coeffs: Vec<f64>,
}

impl JacobiSeries {
    pub fn new(beta: WeightExponent, coeffs: Vec<f64>) -> Self {
        Self { beta, coeffs }
    }

    /// Jacobi coefficients of `f` up to `degree`, by `q`-point Gauss-Jacobi.
    pub fn expand(
        f: impl Fn(f64) -> f64,
        beta: WeightExponent,
        degree: usize,
        q: usize,
    ) -> Result<Self> {
        if q < degree + 1 {
            return param(format!(
                "{q} quadrature points cannot resolve degree {degree}"
            ));
        }
        let rule = cached_rule(q, JacobiParams::symmetric(beta))?;
        let mut coeffs = vec![0.0; degree + 1];
        let mut vals = vec![0.0; degree + 1];
        for (x, w) in rule.iter() {
            let fx = f(x) * w;
            jacobi_all_unchecked(beta.get(), beta.get(), x, &mut vals);
            for (c, v) in coeffs.iter_mut().zip(&vals) {
                *c += fx * v;
            }
        }
        for (i, c) in coeffs.iter_mut().enumerate() {
            *c /= gamma_p(beta, i);
        }
        Ok(Self { beta, coeffs })
    }

    pub fn beta(&self) -> WeightExponent {
        self.beta
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn eval(&self, t: f64) -> f64 {
        let mut vals = vec![0.0; self.coeffs.len()];
        jacobi_all_unchecked(self.beta.get(), self.beta.get(), t, &mut vals);
        self.coeffs.iter().zip(&vals).map(|(c, v)| c * v).sum()
    }

    pub fn eval_deriv(&self, t: f64) -> f64 {
        let mut vals = vec![0.0; self.coeffs.len()];
        symmetric_deriv_all(self.beta.get(), 1, t, &mut vals);
        self.coeffs.iter().zip(&vals).map(|(c, v)| c * v).sum()
    }

    /// `‖·‖_{H^{0,β}(I)}` from Parseval.
    pub fn norm(&self) -> f64 {
        self.coeffs
            .iter()
            .enumerate()
            .map(|(i, c)| c * c * gamma_p(self.beta, i))
            .sum::<f64>()
            .sqrt()
    }
}

/// Coefficients `c_ij` of `Σ c_ij J_i^β(x) J_j^β(y)`, `0 ≤ i, j ≤ N`.
#[derive(Debug, Clone, PartialEq)]
pub struct TensorCoeffs {
    beta: WeightExponent,
    cutoff: usize,
    c: Vec<f64>,
}

impl TensorCoeffs {
    pub fn zeros(beta: WeightExponent, cutoff: usize) -> Self {
        let n = cutoff + 1;
        Self {
            beta,
            cutoff,
            c: vec![0.0; n * n],
        }
    }

    /// Row-major coefficients, `c[i * (N+1) + j]` multiplying `J_i(x) J_j(y)`.
    pub fn from_vec(beta: WeightExponent, cutoff: usize, c: Vec<f64>) -> Result<Self> {
        if c.len() != (cutoff + 1) * (cutoff + 1) {
            return param(format!(
                "expected {} coefficients for cutoff {cutoff}, got {}",
                (cutoff + 1) * (cutoff + 1),
                c.len()
            ));
        }
        if c.iter().any(|v| !v.is_finite()) {
            return param("coefficients must be finite");
        }
        Ok(Self { beta, cutoff, c })
    }

    /// `a(x) b(y)` for two one-dimensional series with the same exponent.
    pub fn outer(a: &JacobiSeries, b: &JacobiSeries) -> Result<Self> {
        if a.beta != b.beta {
            return param("outer product of series with different exponents");
        }
        let n = a.degree().max(b.degree());
        let mut out = Self::zeros(a.beta, n);
        for (i, ai) in a.coeffs.iter().enumerate() {
            for (j, bj) in b.coeffs.iter().enumerate() {
                out.c[i * (n + 1) + j] = ai * bj;
            }
        }
        Ok(out)
    }

    pub fn beta(&self) -> WeightExponent {
        self.beta
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.c
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.c[i * (self.cutoff + 1) + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.c[i * (self.cutoff + 1) + j] = v;
    }

    /// Same function with a larger cutoff (zero padding).
    pub fn padded(&self, cutoff: usize) -> Self {
        if cutoff <= self.cutoff {
            return self.clone();
        }
        let mut out = Self::zeros(self.beta, cutoff);
        for i in 0..=self.cutoff {
            for j in 0..=self.cutoff {
                out.set(i, j, self.get(i, j));
            }
        }
        out
    }

    /// `self + s * other`, padding to the larger cutoff.
    pub fn add_scaled(&self, s: f64, other: &Self) -> Result<Self> {
        if self.beta != other.beta {
            return param("cannot add expansions with different exponents");
        }
        let n = self.cutoff.max(other.cutoff);
        let mut out = self.padded(n);
        for i in 0..=other.cutoff {
            for j in 0..=other.cutoff {
                let v = out.get(i, j) + s * other.get(i, j);
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self {
            beta: self.beta,
            cutoff: self.cutoff,
            c: self.c.iter().map(|v| v * s).collect(),
        }
    }

    fn basis(&self, k: usize, t: f64) -> Vec<f64> {
        let mut v = vec![0.0; self.cutoff + 1];
        symmetric_deriv_all(self.beta.get(), k, t, &mut v);
        v
    }

    fn contract(&self, bx: &[f64], by: &[f64]) -> f64 {
        let n = self.cutoff + 1;
        let mut s = 0.0;
        for (i, &x) in bx.iter().enumerate().take(n) {
            let row = &self.c[i * n..(i + 1) * n];
            let r: f64 = row.iter().zip(by).map(|(c, b)| c * b).sum();
            s += x * r;
        }
        s
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.contract(&self.basis(0, x), &self.basis(0, y))
    }

    pub fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        let (bx, by) = (self.basis(0, x), self.basis(0, y));
        let (dx, dy) = (self.basis(1, x), self.basis(1, y));
        [self.contract(&dx, &by), self.contract(&bx, &dy)]
    }

    /// Second derivatives `[u_xx, u_xy, u_yy]`.
    pub fn hessian(&self, x: f64, y: f64) -> [f64; 3] {
        let (bx, by) = (self.basis(0, x), self.basis(0, y));
        let (dx, dy) = (self.basis(1, x), self.basis(1, y));
        let (ddx, ddy) = (self.basis(2, x), self.basis(2, y));
        [
            self.contract(&ddx, &by),
            self.contract(&dx, &dy),
            self.contract(&bx, &ddy),
        ]
    }

    /// Largest `|c_ij|` with `max(i, j) > p`.
    pub fn tail_max(&self, p: usize) -> f64 {
        let mut m: f64 = 0.0;
        for i in 0..=self.cutoff {
            for j in 0..=self.cutoff {
                if i.max(j) > p {
                    m = m.max(self.get(i, j).abs());
                }
            }
        }
        m
    }
}

impl RefFunction for TensorCoeffs {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.eval(x, y)
    }

    fn gradient(&self, x: f64, y: f64) -> Option<[f64; 2]> {
        Some(TensorCoeffs::gradient(self, x, y))
    }
}

/// Jacobi-Fourier coefficients of `f` up to `cutoff`, by `q×q` Gauss-Jacobi.
pub fn expand(
    f: &(impl Fn(f64, f64) -> f64 + Sync + ?Sized),
    beta: WeightExponent,
    cutoff: usize,
    q: usize,
) -> Result<TensorCoeffs> {
    if q < cutoff + 1 {
        return param(format!(
            "{q} quadrature points per direction alias a cutoff of {cutoff}"
        ));
    }
    let rule = cached_rule(q, JacobiParams::symmetric(beta))?;
    let n = cutoff + 1;
    let nodes = rule.nodes();
    let w = rule.weights();

    // V[a][i] = J_i(x_a)
    let mut v = vec![0.0; q * n];
    for (a, &x) in nodes.iter().enumerate() {
        jacobi_all_unchecked(beta.get(), beta.get(), x, &mut v[a * n..(a + 1) * n]);
    }
    let samples: Vec<f64> = (0..q * q)
        .into_par_iter()
        .map(|idx| {
            let (a, b) = (idx / q, idx % q);
            w[a] * w[b] * f(nodes[a], nodes[b])
        })
        .collect();

    // T[a][j] = Σ_b F[a][b] V[b][j]
    let mut t = vec![0.0; q * n];
    for a in 0..q {
        for b in 0..q {
            let fab = samples[a * q + b];
            if fab == 0.0 {
                continue;
            }
            for j in 0..n {
                t[a * n + j] += fab * v[b * n + j];
            }
        }
    }
    let mut c = vec![0.0; n * n];
    for a in 0..q {
        for i in 0..n {
            let via = v[a * n + i];
            for j in 0..n {
                c[i * n + j] += via * t[a * n + j];
            }
        }
    }
    let g: Vec<f64> = (0..n).map(|i| gamma_p(beta, i)).collect();
    for i in 0..n {
        for j in 0..n {
            c[i * n + j] /= g[i] * g[j];
        }
    }
    TensorCoeffs::from_vec(beta, cutoff, c)
}

/// The truncation `Π_p^β`: keeps `c_ij` with `i, j ≤ p`.
pub fn project(coeffs: &TensorCoeffs, p: usize) -> Result<TensorCoeffs> {
    if p > coeffs.cutoff {
        return param(format!(
            "cannot project to degree {p}: expansion only known up to {}",
            coeffs.cutoff
        ));
    }
    let mut out = TensorCoeffs::zeros(coeffs.beta, p);
    for i in 0..=p {
        for j in 0..=p {
            out.set(i, j, coeffs.get(i, j));
        }
    }
    Ok(out)
}

/// Which family of weights a norm uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Derivative `∂^α` weighted by `(1-x²)^{β+α₁}(1-y²)^{β+α₂}`.
    Plain,
    /// Derivative `∂^α` weighted by `(1-x²)^{β-α₁}(1-y²)^{β-α₂}`.
    Tilde,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightSpec {
    pub k: usize,
    pub beta: WeightExponent,
    pub variant: Variant,
    /// Drop the lower-order terms.
    pub seminorm: bool,
}

impl WeightSpec {
    pub fn plain(k: usize, beta: WeightExponent) -> Self {
        Self {
            k,
            beta,
            variant: Variant::Plain,
            seminorm: false,
        }
    }

    pub fn tilde(k: usize, beta: WeightExponent) -> Self {
        Self {
            k,
            beta,
            variant: Variant::Tilde,
            seminorm: false,
        }
    }

    pub fn semi(mut self) -> Self {
        self.seminorm = true;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.k > 1 {
            return param(format!(
                "weighted norms of order {} are not supported",
                self.k
            ));
        }
        Ok(())
    }

    /// Weight exponent in a direction differentiated `order` times.
    fn exponent(&self, order: usize) -> Result<WeightExponent> {
        let shift = match self.variant {
            Variant::Plain => order as f64,
            Variant::Tilde => -(order as f64),
        };
        self.beta.shifted(shift).map_err(|_| {
            Error::Integrability(format!(
                "weight (1-x²)^{} is not integrable",
                self.beta.get() + shift
            ))
        })
    }
}

fn rule_for(exponent: WeightExponent, q: usize) -> Result<std::sync::Arc<QuadRule>> {
    cached_rule(q, JacobiParams::symmetric(exponent))
}

/// Weighted norm of a function on `Q` by tensor Gauss-Jacobi quadrature with
/// `q` points per direction. Order-one norms need an analytic gradient.
pub fn weighted_norm(f: &dyn RefFunction, spec: WeightSpec, q: usize) -> Result<f64> {
    Ok(weighted_norm_sq(f, spec, q)?.sqrt())
}

/// Square of [`weighted_norm`].
pub fn weighted_norm_sq(f: &dyn RefFunction, spec: WeightSpec, q: usize) -> Result<f64> {
    spec.validate()?;
    if q == 0 {
        return param("need at least one quadrature point");
    }
    let mut total = 0.0;
    if spec.k == 0 || !spec.seminorm {
        let r = rule_for(spec.exponent(0)?, q)?;
        total += tensor_sum(&r, &r, &|x, y| {
            let v = f.value(x, y);
            v * v
        });
    }
    if spec.k == 1 {
        let r0 = rule_for(spec.exponent(0)?, q)?;
        let r1 = rule_for(spec.exponent(1)?, q)?;
        if f.gradient(0.0, 0.0).is_none() {
            return param("order-one norms need an analytic gradient");
        }
        total += tensor_sum(&r1, &r0, &|x, y| f.gradient(x, y).unwrap()[0].powi(2));
        total += tensor_sum(&r0, &r1, &|x, y| f.gradient(x, y).unwrap()[1].powi(2));
    }
    Ok(total)
}

/// `Σ_a Σ_b wx_a wy_b g(x_a, y_b)`.
pub fn tensor_sum(rx: &QuadRule, ry: &QuadRule, g: &(dyn Fn(f64, f64) -> f64 + Sync)) -> f64 {
    let ys: Vec<(f64, f64)> = ry.iter().collect();
    let rows: Vec<f64> = rx
        .nodes()
        .par_iter()
        .zip(rx.weights().par_iter())
        .map(|(&x, &wx)| wx * ys.iter().map(|&(y, wy)| wy * g(x, y)).sum::<f64>())
        .collect();
    rows.iter().sum()
}

/// Plain weighted norm from the coefficients, using orthogonality. For the
/// tilde variant the weights are not those of the basis and quadrature with
/// enough points to be exact is used instead.
pub fn coeff_norm(coeffs: &TensorCoeffs, spec: WeightSpec) -> Result<f64> {
    Ok(coeff_norm_sq(coeffs, spec)?.sqrt())
}

pub fn coeff_norm_sq(coeffs: &TensorCoeffs, spec: WeightSpec) -> Result<f64> {
    spec.validate()?;
    if spec.variant == Variant::Tilde || spec.beta != coeffs.beta {
        // integrand is a polynomial of degree 2N per variable
        return weighted_norm_sq(coeffs, spec, coeffs.cutoff + 2);
    }
    let n = coeffs.cutoff;
    let b = coeffs.beta;
    let g0: Vec<f64> = (0..=n).map(|i| gamma_p(b, i)).collect();
    let g1: Vec<f64> = (0..=n)
        .map(|i| {
            if i == 0 {
                0.0
            } else {
                gamma_pk(b, i, 1).unwrap()
            }
        })
        .collect();
    let mut total = 0.0;
    for i in 0..=n {
        for j in 0..=n {
            let c2 = coeffs.get(i, j).powi(2);
            if c2 == 0.0 {
                continue;
            }
            if spec.k == 0 || !spec.seminorm {
                total += c2 * g0[i] * g0[j];
            }
            if spec.k == 1 {
                total += c2 * (g1[i] * g0[j] + g0[i] * g1[j]);
            }
        }
    }
    Ok(total)
}

/// The four edges of `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RefEdge {
    /// `y = -1`, parametrized by `x`.
    Bottom,
    /// `y = 1`, parametrized by `x`.
    Top,
    /// `x = -1`, parametrized by `y`.
    Left,
    /// `x = 1`, parametrized by `y`.
    Right,
}

/// Restriction of the expansion to an edge of `Q`, as a 1D Jacobi series in
/// the edge's own coordinate.
pub fn trace_to_edge(coeffs: &TensorCoeffs, edge: RefEdge) -> JacobiSeries {
    let n = coeffs.cutoff;
    let at = match edge {
        RefEdge::Bottom | RefEdge::Left => -1.0,
        RefEdge::Top | RefEdge::Right => 1.0,
    };
    let mut ends = vec![0.0; n + 1];
    jacobi_all_unchecked(coeffs.beta.get(), coeffs.beta.get(), at, &mut ends);
    let mut b = vec![0.0; n + 1];
    for i in 0..=n {
        for j in 0..=n {
            match edge {
                RefEdge::Bottom | RefEdge::Top => b[i] += coeffs.get(i, j) * ends[j],
                RefEdge::Left | RefEdge::Right => b[j] += coeffs.get(i, j) * ends[i],
            }
        }
    }
    JacobiSeries::new(coeffs.beta, b)
}
