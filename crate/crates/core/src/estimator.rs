//! Residual a posteriori error estimation in Jacobi-weighted norms: interior
//! residuals, normal-derivative jumps, data oscillation, and the computable
//! error quantities the estimator is compared against.

use std::io::Write;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{param, Result};
use crate::fem::{DiscreteSolution, FemSpace};
use crate::interpolation::{jump_lift, JumpLift};
use crate::jacobi::{cached_rule, gauss_legendre, JacobiParams, QuadRule, WeightExponent};
use crate::mesh::{local_edge_point, DegreeMap, MeshEdge};
use crate::weighted::{expand, tensor_sum, JacobiSeries, TensorCoeffs};

/// Below this, errors and estimators count as zero.
pub const ZERO_TOL: f64 = 1e-10;

/// A load or solution given in physical coordinates.
pub type PhysicalFn<'a> = &'a (dyn Fn(f64, f64) -> f64 + Sync);
pub type PhysicalGrad<'a> = &'a (dyn Fn(f64, f64) -> [f64; 2] + Sync);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorParams {
    /// `β = 1/2 + δ`, with `0 < δ < 1/4`.
    pub delta: f64,
    /// Extra Gauss-Jacobi points per unit of boost when measuring `f - f_p`.
    pub load_projection_boost: usize,
    /// Reverse every edge normal (the report must not change).
    pub flip_normals: bool,
    /// Extra quadrature points on top of the exact count.
    pub extra_points: usize,
}

impl Default for EstimatorParams {
    fn default() -> Self {
        Self {
            delta: 0.1,
            load_projection_boost: 4,
            flip_normals: false,
            extra_points: 0,
        }
    }
}

impl EstimatorParams {
    pub fn with_delta(delta: f64) -> Result<Self> {
        let p = Self {
            delta,
            ..Self::default()
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.delta > 0.0 && self.delta < 0.25) {
            return param(format!("δ must lie in (0, 1/4), got {}", self.delta));
        }
        Ok(())
    }

    pub fn beta(&self) -> f64 {
        0.5 + self.delta
    }

    fn exponent(&self) -> Result<WeightExponent> {
        self.validate()?;
        WeightExponent::new(self.beta())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElementIndicators {
    pub element: usize,
    pub p: usize,
    pub eta_b: f64,
    pub eta_e: f64,
    pub osc: f64,
}

impl ElementIndicators {
    pub fn eta(&self) -> f64 {
        (self.eta_b * self.eta_b + self.eta_e * self.eta_e).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgeIndicator {
    pub edge: usize,
    pub p: usize,
    pub eta_l: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorReport {
    pub elements: Vec<ElementIndicators>,
    /// Interior edges only, in ascending edge order.
    pub edges: Vec<EdgeIndicator>,
    pub eta: f64,
    pub osc: f64,
}

impl EstimatorReport {
    pub fn element_etas(&self) -> Vec<f64> {
        self.elements.iter().map(ElementIndicators::eta).collect()
    }

    pub fn write_elements_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "element,p,eta_b,eta_e,osc")?;
        for e in &self.elements {
            writeln!(
                w,
                "{},{},{:.16e},{:.16e},{:.16e}",
                e.element, e.p, e.eta_b, e.eta_e, e.osc
            )?;
        }
        Ok(())
    }

    pub fn write_edges_csv(&self, mut w: impl Write) -> std::io::Result<()> {
        writeln!(w, "edge,p,eta_l")?;
        for e in &self.edges {
            writeln!(w, "{},{},{:.16e}", e.edge, e.p, e.eta_l)?;
        }
        Ok(())
    }
}

/// `f_{p}`: the Jacobi projection of `f ∘ F_K` at degree `p`.
pub fn project_load(
    sol: &DiscreteSolution,
    f: PhysicalFn,
    k: usize,
    beta: f64,
) -> Result<TensorCoeffs> {
    let p = sol.degrees().get(k);
    let map = sol.map(k);
    let g = |x: f64, y: f64| {
        let [px, py] = map.map(x, y);
        f(px, py)
    };
    expand(&g, WeightExponent::new(beta)?, p, p + 10)
}

fn sym_rule(n: usize, b: f64) -> Result<Arc<QuadRule>> {
    cached_rule(n, JacobiParams::new(b, b)?)
}

/// Normal-derivative jump on an interior edge at global parameter `t`.
fn jump(sol: &DiscreteSolution, edge: &MeshEdge, t: f64, flip: bool) -> f64 {
    let outer = edge.outer.expect("interior edge");
    let grad = |side: crate::mesh::EdgeSide| {
        let tl = if side.aligned { t } else { -t };
        let [x, y] = local_edge_point(side.local, tl);
        sol.physical_jet(side.element, x, y).1
    };
    let (gi, go) = (grad(edge.inner), grad(outer));
    let n = if flip {
        [-edge.normal[0], -edge.normal[1]]
    } else {
        edge.normal
    };
    (go[0] - gi[0]) * n[0] + (go[1] - gi[1]) * n[1]
}

/// The jump `R_ℓ` as a series in the global edge parameter, exact for the
/// polynomial jump.
pub fn edge_jump_series(sol: &DiscreteSolution, e: usize, beta: f64) -> Result<JacobiSeries> {
    let mesh = sol.mesh();
    let edge = mesh.edge(e);
    let Some(outer) = edge.outer else {
        return param(format!("edge {e} lies on the boundary"));
    };
    let p = sol
        .degrees()
        .get(edge.inner.element)
        .max(sol.degrees().get(outer.element));
    JacobiSeries::expand(
        |t| jump(sol, edge, t, false),
        WeightExponent::new(beta)?,
        p,
        p + 1,
    )
}

/// Evaluates all indicators for a discrete solution of `-Δu = f`.
pub fn compute_indicators(
    sol: &DiscreteSolution,
    f: PhysicalFn,
    params: &EstimatorParams,
) -> Result<EstimatorReport> {
    let beta = params.exponent()?.get();
    let mesh = sol.mesh();
    let degrees = sol.degrees();

    let volume: Vec<(f64, f64)> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|k| {
            let p = degrees.get(k);
            let fp = project_load(sol, f, k, beta)?;
            let local = sol.local(k);
            let map = sol.map(k);
            let rule = sym_rule(p + 2 + params.extra_points, beta)?;
            let r2 = tensor_sum(&rule, &rule, &|x, y| {
                let lap = map.laplacian(local.jet(x, y).hess);
                (fp.eval(x, y) + lap).powi(2)
            });
            // data oscillation by oversampled quadrature
            let q = p + 1 + 4 * params.load_projection_boost;
            let fine = sym_rule(q, beta)?;
            let o2 = tensor_sum(&fine, &fine, &|x, y| {
                let [px, py] = map.map(x, y);
                (f(px, py) - fp.eval(x, y)).powi(2)
            });
            let pk = p as f64;
            Ok((r2 / (pk * pk), o2 / (pk * pk)))
        })
        .collect::<Result<_>>()?;

    let interior_edges: Vec<usize> = (0..mesh.num_edges())
        .filter(|&e| !mesh.edge(e).is_boundary())
        .collect();
    let edges: Vec<EdgeIndicator> = interior_edges
        .par_iter()
        .map(|&e| {
            let edge = mesh.edge(e);
            let outer = edge.outer.unwrap();
            let (pi, po) = (degrees.get(edge.inner.element), degrees.get(outer.element));
            let rule = sym_rule(pi.max(po) + 2 + params.extra_points, beta)?;
            let r2 = rule.integrate(|t| jump(sol, edge, t, params.flip_normals).powi(2));
            let pl = pi.min(po);
            Ok(EdgeIndicator {
                edge: e,
                p: pl,
                eta_l: (r2 / pl as f64).sqrt(),
            })
        })
        .collect::<Result<_>>()?;

    let mut edge_part = vec![0.0; mesh.num_elements()];
    for ind in &edges {
        let edge = mesh.edge(ind.edge);
        for side in edge.sides() {
            edge_part[side.element] += 0.25 * ind.eta_l * ind.eta_l;
        }
    }

    let elements: Vec<ElementIndicators> = volume
        .iter()
        .enumerate()
        .map(|(k, &(b2, o2))| ElementIndicators {
            element: k,
            p: degrees.get(k),
            eta_b: b2.sqrt(),
            eta_e: edge_part[k].sqrt(),
            osc: o2.sqrt(),
        })
        .collect();
    let eta2: f64 = volume
        .iter()
        .zip(&edge_part)
        .map(|((b2, _), e2)| b2 + e2)
        .sum();
    let osc2: f64 = volume.iter().map(|(_, o2)| o2).sum();
    Ok(EstimatorReport {
        elements,
        edges,
        eta: eta2.sqrt(),
        osc: osc2.sqrt(),
    })
}

/// Error of a discrete solution against a known exact solution.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorSurrogate {
    /// `‖u - u_N‖` in the broken tilde-weighted `H^{1,β}` norm.
    pub tilde: f64,
    /// `‖∇(u - u_N)‖_{L²(Ω)}`.
    pub energy: f64,
    pub tilde_elements: Vec<f64>,
    pub energy_elements: Vec<f64>,
}

/// Quadrature points per direction for errors against non-polynomial data.
fn error_points(p: usize) -> usize {
    (p + 20).max(30)
}

pub fn error_surrogate(
    sol: &DiscreteSolution,
    u: PhysicalFn,
    grad: PhysicalGrad,
    params: &EstimatorParams,
) -> Result<ErrorSurrogate> {
    let beta = params.exponent()?.get();
    let mesh = sol.mesh();
    let per: Vec<(f64, f64)> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|k| {
            let q = error_points(sol.degrees().get(k)) + params.extra_points;
            let local = sol.local(k);
            let map = sol.map(k);
            let r0 = sym_rule(q, beta)?;
            let r1 = sym_rule(q, beta - 1.0)?;
            let diff = |x: f64, y: f64| {
                let j = local.jet(x, y);
                let [px, py] = map.map(x, y);
                let g = map.reference_gradient(grad(px, py));
                (u(px, py) - j.value, [g[0] - j.grad[0], g[1] - j.grad[1]])
            };
            let t = tensor_sum(&r0, &r0, &|x, y| diff(x, y).0.powi(2))
                + tensor_sum(&r1, &r0, &|x, y| diff(x, y).1[0].powi(2))
                + tensor_sum(&r0, &r1, &|x, y| diff(x, y).1[1].powi(2));
            let gl = gauss_legendre(q)?;
            let jac = map.det().abs();
            let e = tensor_sum(&gl, &gl, &|x, y| {
                let (_, g, _) = sol.physical_jet(k, x, y);
                let [px, py] = map.map(x, y);
                let ge = grad(px, py);
                jac * ((ge[0] - g[0]).powi(2) + (ge[1] - g[1]).powi(2))
            });
            Ok((t, e))
        })
        .collect::<Result<_>>()?;
    Ok(ErrorSurrogate {
        tilde: per.iter().map(|p| p.0).sum::<f64>().sqrt(),
        energy: per.iter().map(|p| p.1).sum::<f64>().sqrt(),
        tilde_elements: per.iter().map(|p| p.0.sqrt()).collect(),
        energy_elements: per.iter().map(|p| p.1.sqrt()).collect(),
    })
}

/// `η / error`, or why it is not a number.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Effectivity {
    Value(f64),
    /// Both the error and the estimator vanish.
    Degenerate,
    /// The error vanishes but the estimator does not.
    Inconsistent,
}

impl Effectivity {
    pub fn value(self) -> Option<f64> {
        match self {
            Self::Value(v) => Some(v),
            _ => None,
        }
    }
}

pub fn effectivity(eta: f64, error: f64) -> Effectivity {
    if error > ZERO_TOL {
        Effectivity::Value(eta / error)
    } else if eta > ZERO_TOL {
        Effectivity::Inconsistent
    } else {
        Effectivity::Degenerate
    }
}

/// `Σ w_x w_y g(x, y) / ((1-x²)^{ex} (1-y²)^{ey})`: integrates `g` against
/// Lebesgue measure with rules built for the given weight exponents.
fn unweighted_sum(
    rx: &QuadRule,
    ex: f64,
    ry: &QuadRule,
    ey: f64,
    g: &(dyn Fn(f64, f64) -> f64 + Sync),
) -> f64 {
    tensor_sum(rx, ry, &|x, y| {
        g(x, y) / ((1.0 - x * x).powf(ex) * (1.0 - y * y).powf(ey))
    })
}

/// `∫_K (f v - ∇u_N·∇v)` for a test function given by its reference value
/// and reference gradient, with the rules in the two reference directions.
fn residual_on_element(
    sol: &DiscreteSolution,
    f: PhysicalFn,
    k: usize,
    rules: (&QuadRule, f64, &QuadRule, f64),
    v: &(dyn Fn(f64, f64) -> (f64, [f64; 2]) + Sync),
) -> f64 {
    let map = sol.map(k);
    let local = sol.local(k);
    let a = map.laplacian_coeffs;
    let jac = map.det().abs();
    let (rx, ex, ry, ey) = rules;
    unweighted_sum(rx, ex, ry, ey, &|x, y| {
        let (vv, vg) = v(x, y);
        let ug = local.jet(x, y).grad;
        let [px, py] = map.map(x, y);
        // ∇u·∇v = ∇̂uᵀ A ∇̂v
        let dot = ug[0] * (a[0][0] * vg[0] + a[0][1] * vg[1])
            + ug[1] * (a[1][0] * vg[0] + a[1][1] * vg[1]);
        jac * (f(px, py) * vv - dot)
    })
}

/// `a(e, v) / ‖v‖_{H^{1,-β}}` for a discrete `v`, maximized over a family.
fn discrete_member_ratio(
    sol: &DiscreteSolution,
    f: PhysicalFn,
    v: &DiscreteSolution,
    beta: f64,
) -> Result<f64> {
    let mesh = sol.mesh();
    let parts: Vec<(f64, f64)> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|k| {
            let pv = v.degrees().get(k);
            let vl = v.local(k);
            let q = error_points(pv);
            let gl = gauss_legendre(q)?;
            let num = residual_on_element(sol, f, k, (&gl, 0.0, &gl, 0.0), &|x, y| {
                let j = vl.jet(x, y);
                (j.value, j.grad)
            });
            let r0 = sym_rule(pv + 2, -beta)?;
            let r1 = sym_rule(pv + 2, 1.0 - beta)?;
            let n2 = tensor_sum(&r0, &r0, &|x, y| vl.value(x, y).powi(2))
                + tensor_sum(&r1, &r0, &|x, y| vl.jet(x, y).grad[0].powi(2))
                + tensor_sum(&r0, &r1, &|x, y| vl.jet(x, y).grad[1].powi(2));
            Ok((num, n2))
        })
        .collect::<Result<_>>()?;
    let num: f64 = parts.iter().map(|p| p.0).sum();
    let den = parts.iter().map(|p| p.1).sum::<f64>().sqrt();
    Ok(if den > 0.0 { num.abs() / den } else { 0.0 })
}

/// Reference point of `side`'s element at edge parameter `t` and normal
/// coordinate `s` (`s = -1` on the edge).
fn lift_point(side: &crate::mesh::EdgeSide, t: f64, s: f64) -> [f64; 2] {
    let tl = if side.aligned { t } else { -t };
    match side.local {
        0 => [tl, s],
        1 => [-s, tl],
        2 => [tl, -s],
        _ => [s, tl],
    }
}

fn lift_ratio(sol: &DiscreteSolution, f: PhysicalFn, lift: &JumpLift) -> Result<f64> {
    let (_, norm) = lift.norms()?;
    if norm == 0.0 {
        return Ok(0.0);
    }
    let b = lift.beta;
    let mut num = 0.0;
    for side in &lift.sides {
        let k = side.element;
        let p = sol
            .degrees()
            .get(k)
            .max(lift.decay.degree())
            .max(lift.poly.degree());
        let q = error_points(p);
        // the tangential derivative carries (1-t²)^{β-1}
        let rt = sym_rule(q, b - 1.0)?;
        let rs = gauss_legendre(q)?;
        let v = |t: f64, s: f64| {
            let [x, y] = lift_point(side, t, s);
            (lift.value(k, x, y), lift.ref_gradient(k, x, y))
        };
        let map = sol.map(k);
        let local = sol.local(k);
        let a = map.laplacian_coeffs;
        let jac = map.det().abs();
        num += unweighted_sum(&rt, b - 1.0, &rs, 0.0, &|t, s| {
            let (vv, vg) = v(t, s);
            let [x, y] = lift_point(side, t, s);
            let ug = local.jet(x, y).grad;
            let [px, py] = map.map(x, y);
            let dot = ug[0] * (a[0][0] * vg[0] + a[0][1] * vg[1])
                + ug[1] * (a[1][0] * vg[0] + a[1][1] * vg[1]);
            jac * (f(px, py) * vv - dot)
        });
    }
    Ok(num.abs() / norm)
}

/// Lower bound for the dual error norm `sup_v a(e, v) / ‖v‖_{H^{1,-β}}`,
/// taking the best of a finite family of test functions: the correction
/// towards a solution two degrees higher, random functions of that richer
/// space, and weighted lifts of the normal-derivative jumps and of random
/// edge polynomials. `members` bounds the number of random members.
pub fn dual_lower_bound(
    sol: &DiscreteSolution,
    f: PhysicalFn,
    params: &EstimatorParams,
    members: usize,
    seed: u64,
) -> Result<f64> {
    let beta = params.exponent()?.get();
    let mesh = sol.mesh_arc();
    let richer = DegreeMap::from_vec(sol.degrees().as_slice().iter().map(|p| p + 2).collect())?;
    let space = FemSpace::new(mesh.clone(), richer)?;
    let fine = crate::fem::solve(&crate::fem::assemble(&space, f, crate::fem::DEFAULT_BOOST)?)?;

    // u_N' - u_N as a member of the richer space
    let embedded = embed(sol, &space)?;
    let diff: Vec<f64> = fine
        .coeffs
        .iter()
        .zip(&embedded)
        .map(|(a, b)| a - b)
        .collect();
    let mut best = discrete_member_ratio(
        sol,
        f,
        &DiscreteSolution::from_coefficients(space.clone(), diff)?,
        beta,
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_random = members / 2;
    for _ in 0..n_random {
        let free: Vec<f64> = (0..space.num_free())
            .map(|_| rng.random_range(-1.0..1.0))
            .collect();
        let v = DiscreteSolution::from_coefficients(space.clone(), space.expand_free(&free))?;
        best = best.max(discrete_member_ratio(sol, f, &v, beta)?);
    }

    let interior: Vec<usize> = (0..mesh.num_edges())
        .filter(|&e| !mesh.edge(e).is_boundary())
        .collect();
    let b = WeightExponent::new(beta)?;
    for &e in &interior {
        let edge = mesh.edge(e);
        let pl = sol
            .degrees()
            .get(edge.inner.element)
            .min(sol.degrees().get(edge.outer.unwrap().element));
        let r = edge_jump_series(sol, e, beta)?;
        // truncate to the lift degree
        let r = JacobiSeries::new(b, r.coeffs().iter().take(pl + 1).copied().collect());
        best = best.max(lift_ratio(sol, f, &jump_lift(&r, mesh, e, pl, beta)?)?);
    }
    for i in 0..members - n_random.min(members) {
        if interior.is_empty() {
            break;
        }
        let e = interior[i % interior.len()];
        let edge = mesh.edge(e);
        let pl = sol
            .degrees()
            .get(edge.inner.element)
            .min(sol.degrees().get(edge.outer.unwrap().element));
        let c: Vec<f64> = (0..=pl).map(|_| rng.random_range(-1.0..1.0)).collect();
        let lift = jump_lift(&JacobiSeries::new(b, c), mesh, e, pl, beta)?;
        best = best.max(lift_ratio(sol, f, &lift)?);
    }
    Ok(best)
}

/// Coefficients of `sol` in a space of elementwise higher degree on the same
/// mesh. The hierarchical basis is nested, so this is a relabelling.
fn embed(sol: &DiscreteSolution, space: &FemSpace) -> Result<Vec<f64>> {
    let mut out = vec![0.0; space.dofmap.num_dofs()];
    for k in 0..sol.mesh().num_elements() {
        let local = sol.local(k);
        let n = local.p + 1;
        for d in space.dofmap.element_dofs(k) {
            if d.i < n && d.j < n {
                out[d.global] = d.sign * local.a[d.i * n + d.j];
            }
        }
    }
    Ok(out)
}
