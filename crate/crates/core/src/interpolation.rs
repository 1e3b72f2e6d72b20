//! Constructive interpolation toolkit: the boundary-decay polynomial, vertex
//! functions, edge extensions, patchwise and global interpolants built from
//! Jacobi projections, and the weighted lift of an edge polynomial used to
//! test jump residuals.

use rayon::prelude::*;

use crate::error::{param, Error, Result};
use crate::jacobi::{
    cached_rule, jacobi_deriv_unchecked, jacobi_unchecked, JacobiParams, WeightExponent,
};
use crate::mesh::{
    local_edge_point, local_edge_ref, DegreeMap, EdgeSide, ParallelogramMesh, REF_VERTICES,
};
use crate::weighted::{expand, project, trace_to_edge, JacobiSeries, TensorCoeffs};

/// Tolerance for "vanishes at the end points" checks on edge data.
pub const ENDPOINT_TOL: f64 = 1e-10;

/// `g(x) = (1-x) P_{p-1}^{(β+2,β+1)}(x) / (2 P_{p-1}^{(β+2,β+1)}(-1))`, the
/// degree-`p` polynomial of least `H^{0,β}` norm with `g(-1) = 1`, `g(1) = 0`.
/// The norm decays like `(p+1)^{-(1+β)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayPoly {
    p: usize,
    beta: f64,
    scale: f64,
}

/// Builds the boundary-decay polynomial of degree `p ≥ 1`.
pub fn boundary_decay_poly(p: usize, beta: WeightExponent) -> Result<DecayPoly> {
    if p == 0 {
        return param("the boundary-decay polynomial needs degree at least 1");
    }
    let b = beta.get();
    let at_left = jacobi_unchecked(p - 1, b + 2.0, b + 1.0, -1.0);
    Ok(DecayPoly {
        p,
        beta: b,
        scale: 0.5 / at_left,
    })
}

impl DecayPoly {
    pub fn degree(&self) -> usize {
        self.p
    }

    pub fn eval(&self, x: f64) -> f64 {
        if x == -1.0 {
            return 1.0;
        }
        (1.0 - x) * jacobi_unchecked(self.p - 1, self.beta + 2.0, self.beta + 1.0, x) * self.scale
    }

    pub fn deriv(&self, x: f64) -> f64 {
        let (a, b) = (self.beta + 2.0, self.beta + 1.0);
        let q = jacobi_unchecked(self.p - 1, a, b, x);
        let dq = jacobi_deriv_unchecked(self.p - 1, 1, a, b, x);
        self.scale * ((1.0 - x) * dq - q)
    }

    /// `‖g‖_{H^{0,β}(I)}`, exact: `g² (1-x²)^β = q² (1-x)^{β+2} (1+x)^β` with
    /// `q` of degree `p - 1`.
    pub fn norm(&self) -> f64 {
        let rule = JacobiParams::new(self.beta + 2.0, self.beta)
            .and_then(|w| cached_rule(self.p, w))
            .expect("shifted exponents are admissible");
        let (a, b) = (self.beta + 2.0, self.beta + 1.0);
        let s2 = rule.integrate(|x| jacobi_unchecked(self.p - 1, a, b, x).powi(2));
        s2.sqrt() * self.scale.abs()
    }

    /// Coefficients in the `J_i^γ` basis for any exponent `γ`.
    pub fn series(&self, gamma: WeightExponent) -> Result<JacobiSeries> {
        JacobiSeries::expand(|x| self.eval(x), gamma, self.p, self.p + 1)
    }
}

/// Coefficients of `t ↦ s(-t)` for a series `s`.
fn reflect(s: &JacobiSeries) -> JacobiSeries {
    let c = s
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| if i % 2 == 1 { -c } else { *c })
        .collect();
    JacobiSeries::new(s.beta(), c)
}

/// The vertex function of slot `l` (reference coordinates, any element):
/// equal to 1 at that vertex, 0 at the other three.
pub fn vertex_function(l: usize, p: usize, beta: WeightExponent) -> Result<TensorCoeffs> {
    if l > 3 {
        return param(format!("vertex slot {l} does not exist"));
    }
    let g = boundary_decay_poly(p, beta)?.series(beta)?;
    let [vx, vy] = REF_VERTICES[l];
    let gx = if vx > 0.0 { reflect(&g) } else { g.clone() };
    let gy = if vy > 0.0 { reflect(&g) } else { g };
    TensorCoeffs::outer(&gx, &gy)
}

/// Extends `w`, given in the parameter of local edge `local` and vanishing at
/// its end points, to `Q_p` on the reference square. The extension vanishes on
/// the other three edges.
pub fn edge_lift(
    w: &JacobiSeries,
    local: usize,
    p: usize,
    beta: WeightExponent,
) -> Result<TensorCoeffs> {
    if local > 3 {
        return param(format!("local edge {local} does not exist"));
    }
    if w.degree() > p {
        return param(format!("edge data of degree {} exceeds {p}", w.degree()));
    }
    if w.beta() != beta {
        return param("edge data uses a different weight exponent");
    }
    let scale = 1.0 + w.coeffs().iter().fold(0.0f64, |m, c| m.max(c.abs()));
    if w.eval(-1.0).abs() > ENDPOINT_TOL * scale || w.eval(1.0).abs() > ENDPOINT_TOL * scale {
        return Err(Error::Precondition(
            "edge data must vanish at both end points".into(),
        ));
    }
    let g = boundary_decay_poly(p, beta)?.series(beta)?;
    let w = JacobiSeries::new(beta, pad(w.coeffs(), p));
    match local {
        0 => TensorCoeffs::outer(&w, &g),
        1 => TensorCoeffs::outer(&reflect(&g), &w),
        2 => TensorCoeffs::outer(&w, &reflect(&g)),
        _ => TensorCoeffs::outer(&g, &w),
    }
}

fn pad(c: &[f64], p: usize) -> Vec<f64> {
    let mut v = c.to_vec();
    v.resize(p + 1, 0.0);
    v
}

/// Polynomials on a set of elements, in each element's reference coordinates.
#[derive(Debug, Clone)]
pub struct PiecewisePoly {
    pub elements: Vec<usize>,
    pub pieces: Vec<TensorCoeffs>,
    /// Set when traces on shared edges are known to agree.
    pub continuous: bool,
}

impl PiecewisePoly {
    pub fn piece(&self, k: usize) -> Option<&TensorCoeffs> {
        self.elements
            .iter()
            .position(|&e| e == k)
            .map(|i| &self.pieces[i])
    }
}

/// A physical function with its physical gradient.
pub trait PhysicalFunction: Sync {
    fn value(&self, x: f64, y: f64) -> f64;
    fn gradient(&self, x: f64, y: f64) -> [f64; 2];
}

impl<T: crate::benchmarks::Manufactured + ?Sized> PhysicalFunction for T {
    fn value(&self, x: f64, y: f64) -> f64 {
        self.u(x, y)
    }

    fn gradient(&self, x: f64, y: f64) -> [f64; 2] {
        self.grad(x, y)
    }
}

/// Quadrature points used when projecting a smooth function onto `Q_p`.
fn projection_points(p: usize) -> usize {
    p + 10
}

fn check_interpolation_beta(beta: WeightExponent) -> Result<()> {
    let b = beta.get();
    if !(b > -1.0 && b < -0.5) {
        return param(format!(
            "interpolation needs a weight exponent in (-1, -1/2), got {b}"
        ));
    }
    Ok(())
}

/// Trace of `c` on local edge `local`, in the global edge parameter.
fn global_trace(c: &TensorCoeffs, side: &EdgeSide) -> JacobiSeries {
    let t = trace_to_edge(c, local_edge_ref(side.local));
    if side.aligned {
        t
    } else {
        reflect(&t)
    }
}

/// Converts a series in the global edge parameter to the local parameter of
/// `side` (the map is an involution, so the same reflection works both ways).
fn to_local(s: &JacobiSeries, side: &EdgeSide) -> JacobiSeries {
    if side.aligned {
        s.clone()
    } else {
        reflect(s)
    }
}

/// The local interpolant on the vertex patch of `v`, with degree `p` on every
/// element of the patch and weight exponent `β ∈ (-1, -1/2)`.
pub fn local_interpolant(
    u: &dyn PhysicalFunction,
    mesh: &ParallelogramMesh,
    v: usize,
    p: usize,
    beta: WeightExponent,
) -> Result<PiecewisePoly> {
    check_interpolation_beta(beta)?;
    if v >= mesh.num_vertices() {
        return param(format!("vertex {v} does not exist"));
    }
    if p == 0 {
        return param("local interpolant needs degree at least 1");
    }
    let elements = mesh.vertex_elements(v).to_vec();
    let vertex_fns: Vec<TensorCoeffs> = (0..4)
        .map(|l| vertex_function(l, p, beta))
        .collect::<Result<_>>()?;

    let mut pieces: Vec<TensorCoeffs> = elements
        .par_iter()
        .map(|&k| {
            let map = mesh.map(k);
            let f = |x: f64, y: f64| {
                let [px, py] = map.map(x, y);
                u.value(px, py)
            };
            let proj = project(&expand(&f, beta, p, projection_points(p))?, p)?;
            let mut phi = proj.clone();
            for (l, xi) in vertex_fns.iter().enumerate() {
                let [rx, ry] = REF_VERTICES[l];
                let [px, py] = mesh.vertices()[mesh.elements()[k][l]];
                let defect = u.value(px, py) - proj.eval(rx, ry);
                phi = phi.add_scaled(defect, xi)?;
            }
            Ok(phi)
        })
        .collect::<Result<_>>()?;

    let position = |k: usize| elements.iter().position(|&e| e == k);

    // edges shared by two patch elements, ascending global index
    let mut shared: Vec<usize> = Vec::new();
    let mut boundary: Vec<usize> = Vec::new();
    for &k in &elements {
        for e in mesh.element_edges(k) {
            let edge = mesh.edge(e);
            match edge.outer {
                Some(o)
                    if position(o.element).is_some() && position(edge.inner.element).is_some() =>
                {
                    shared.push(e)
                }
                None => boundary.push(e),
                _ => {}
            }
        }
    }
    shared.sort_unstable();
    shared.dedup();
    boundary.sort_unstable();
    boundary.dedup();

    for e in shared {
        let edge = mesh.edge(e);
        let (a, b) = (edge.inner, edge.outer.unwrap());
        // the lower element index is corrected; inner always has the lower index
        let (ia, ib) = (position(a.element).unwrap(), position(b.element).unwrap());
        let target = global_trace(&pieces[ib], &b);
        let current = global_trace(&pieces[ia], &a);
        let diff = JacobiSeries::new(
            beta,
            target
                .coeffs()
                .iter()
                .zip(current.coeffs())
                .map(|(t, c)| t - c)
                .collect(),
        );
        let lift = edge_lift(&to_local(&diff, &a), a.local, p, beta)?;
        pieces[ia] = pieces[ia].add_scaled(1.0, &lift)?;
    }

    for e in boundary {
        let side = mesh.edge(e).inner;
        let Some(i) = position(side.element) else {
            continue;
        };
        let trace = trace_to_edge(&pieces[i], local_edge_ref(side.local));
        let lift = edge_lift(&trace, side.local, p, beta)?;
        pieces[i] = pieces[i].add_scaled(-1.0, &lift)?;
    }

    Ok(PiecewisePoly {
        elements,
        pieces,
        continuous: true,
    })
}

/// The global interpolant `Σ_V φ_V I_V u`, where `φ_V` are the bilinear hats
/// and `I_V` is built with degree `p_V - 1`. Needs `p_V ≥ 2` at every vertex.
pub fn global_interpolant(
    u: &dyn PhysicalFunction,
    mesh: &ParallelogramMesh,
    degrees: &DegreeMap,
    beta: WeightExponent,
) -> Result<PiecewisePoly> {
    check_interpolation_beta(beta)?;
    degrees.check_against(mesh)?;
    let pv: Vec<usize> = (0..mesh.num_vertices())
        .map(|v| {
            mesh.vertex_elements(v)
                .iter()
                .map(|&k| degrees.get(k))
                .min()
                .unwrap_or(0)
        })
        .collect();
    if let Some(v) =
        (0..mesh.num_vertices()).find(|&v| pv[v] < 2 && !mesh.vertex_elements(v).is_empty())
    {
        return Err(Error::Precondition(format!(
            "vertex {v} has minimum adjacent degree {}; the global interpolant needs at least 2",
            pv[v]
        )));
    }
    let locals: Vec<Option<PiecewisePoly>> = (0..mesh.num_vertices())
        .into_par_iter()
        .map(|v| {
            if mesh.vertex_elements(v).is_empty() {
                return Ok(None);
            }
            local_interpolant(u, mesh, v, pv[v] - 1, beta).map(Some)
        })
        .collect::<Result<_>>()?;

    let hats: Vec<TensorCoeffs> = (0..4)
        .map(|l| vertex_function(l, 1, beta))
        .collect::<Result<_>>()?;
    let pieces: Vec<TensorCoeffs> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|k| {
            let pk = degrees.get(k);
            let parts: Vec<(&TensorCoeffs, &TensorCoeffs)> = mesh.elements()[k]
                .iter()
                .enumerate()
                .map(|(l, &v)| (&hats[l], locals[v].as_ref().unwrap().piece(k).unwrap()))
                .collect();
            let f = |x: f64, y: f64| {
                parts
                    .iter()
                    .map(|(h, iv)| h.eval(x, y) * iv.eval(x, y))
                    .sum()
            };
            // the product has degree p_V ≤ p_K per variable, so this is exact
            expand(&f, beta, pk, pk + 2)
        })
        .collect::<Result<_>>()?;
    Ok(PiecewisePoly {
        elements: (0..mesh.num_elements()).collect(),
        pieces,
        continuous: true,
    })
}

/// `P(t) (1-t²)^β g(s)` on both neighbours of an interior edge, where `t` is
/// the edge parameter, `s` the reference coordinate normal to the edge (equal
/// to -1 on it) and `g` the decay polynomial of exponent `-β`.
#[derive(Debug, Clone)]
pub struct JumpLift {
    pub edge: usize,
    pub sides: [EdgeSide; 2],
    /// Edge polynomial in the global edge parameter.
    pub poly: JacobiSeries,
    pub beta: f64,
    pub decay: DecayPoly,
}

/// Builds the lift of an edge polynomial given in the global parameter of
/// interior edge `edge`, with `β ∈ (1/2, 1)` and decay degree `p`.
pub fn jump_lift(
    poly: &JacobiSeries,
    mesh: &ParallelogramMesh,
    edge: usize,
    p: usize,
    beta: f64,
) -> Result<JumpLift> {
    if !(beta > 0.5 && beta < 1.0) {
        return param(format!("jump lift needs β in (1/2, 1), got {beta}"));
    }
    if edge >= mesh.num_edges() {
        return param(format!("edge {edge} does not exist"));
    }
    let e = mesh.edge(edge);
    let Some(outer) = e.outer else {
        return param(format!("edge {edge} lies on the boundary"));
    };
    if poly.degree() > p {
        return param(format!(
            "edge polynomial degree {} exceeds {p}",
            poly.degree()
        ));
    }
    let decay = boundary_decay_poly(p, WeightExponent::new(-beta)?)?;
    Ok(JumpLift {
        edge,
        sides: [e.inner, outer],
        poly: poly.clone(),
        beta,
        decay,
    })
}

/// `(t, s, dt/dξ, dt/dη, ds/dξ, ds/dη)` for a reference point and a side.
fn edge_coords(side: &EdgeSide, xi: f64, eta: f64) -> (f64, f64, [f64; 2], [f64; 2]) {
    let sg = if side.aligned { 1.0 } else { -1.0 };
    // local parameter and normal coordinate (normal coordinate -1 on the edge)
    let (tl, s, dtl, ds) = match side.local {
        0 => (xi, eta, [1.0, 0.0], [0.0, 1.0]),
        1 => (eta, -xi, [0.0, 1.0], [-1.0, 0.0]),
        2 => (xi, -eta, [1.0, 0.0], [0.0, -1.0]),
        _ => (eta, xi, [0.0, 1.0], [1.0, 0.0]),
    };
    (sg * tl, s, [sg * dtl[0], sg * dtl[1]], ds)
}

impl JumpLift {
    pub fn elements(&self) -> [usize; 2] {
        [self.sides[0].element, self.sides[1].element]
    }

    fn side(&self, k: usize) -> Option<&EdgeSide> {
        self.sides.iter().find(|s| s.element == k)
    }

    /// Value on element `k` at a reference point; zero off the patch.
    pub fn value(&self, k: usize, xi: f64, eta: f64) -> f64 {
        let Some(side) = self.side(k) else { return 0.0 };
        let (t, s, _, _) = edge_coords(side, xi, eta);
        let w = (1.0 - t * t).max(0.0).powf(self.beta);
        self.poly.eval(t) * w * self.decay.eval(s)
    }

    /// Reference gradient on element `k`. Unbounded at the edge end points.
    pub fn ref_gradient(&self, k: usize, xi: f64, eta: f64) -> [f64; 2] {
        let Some(side) = self.side(k) else {
            return [0.0; 2];
        };
        let (t, s, dt, ds) = edge_coords(side, xi, eta);
        let b = self.beta;
        let om = 1.0 - t * t;
        let (pv, dp) = (self.poly.eval(t), self.poly.eval_deriv(t));
        // d/dt [P (1-t²)^β] = (1-t²)^{β-1} [P'(1-t²) - 2βtP]
        let d_edge = om.powf(b - 1.0) * (dp * om - 2.0 * b * t * pv);
        let edge_part = pv * om.powf(b);
        let (g, dg) = (self.decay.eval(s), self.decay.deriv(s));
        [
            d_edge * dt[0] * g + edge_part * dg * ds[0],
            d_edge * dt[1] * g + edge_part * dg * ds[1],
        ]
    }

    /// Squared `H^{1,-β}` norm on one element, from the separable structure:
    /// returns `(‖v̂‖², ‖∂_t v̂‖², ‖∂_s v̂‖²)` with the weights of the
    /// `H^{1,-β}(Q)` norm.
    pub fn norm_parts(&self) -> Result<(f64, f64, f64)> {
        let b = self.beta;
        let p = self.poly.degree().max(self.decay.degree());
        let plus = JacobiParams::new(b, b)?;
        let edge_rule = crate::jacobi::cached_rule(p + 2, plus)?;
        let minus = JacobiParams::new(-b, -b)?;
        let normal_rule = crate::jacobi::cached_rule(p + 2, minus)?;
        let one_minus = JacobiParams::new(1.0 - b, 1.0 - b)?;
        let normal_rule_d = crate::jacobi::cached_rule(p + 2, one_minus)?;
        let edge_rule_d = crate::jacobi::cached_rule(p + 2, JacobiParams::new(b - 1.0, b - 1.0)?)?;

        // ∫ P² (1-t²)^{2β} (1-t²)^{-β} = ∫ P² (1-t²)^β
        let e0 = edge_rule.integrate(|t| self.poly.eval(t).powi(2));
        // ∫ [(1-t²)^{β-1}(P'(1-t²) - 2βtP)]² (1-t²)^{1-β} = ∫ (P'(1-t²) - 2βtP)² (1-t²)^{β-1}
        let e1 = edge_rule_d.integrate(|t| {
            let q = self.poly.eval_deriv(t) * (1.0 - t * t) - 2.0 * b * t * self.poly.eval(t);
            q * q
        });
        let g0 = normal_rule.integrate(|s| self.decay.eval(s).powi(2));
        let g1 = normal_rule_d.integrate(|s| self.decay.deriv(s).powi(2));
        Ok((e0 * g0, e1 * g0, e0 * g1))
    }

    /// `‖v_ℓ‖_{H^{0,-β}}` and `‖v_ℓ‖_{H^{1,-β}}` over both elements.
    pub fn norms(&self) -> Result<(f64, f64)> {
        let (n0, nt, ns) = self.norm_parts()?;
        Ok(((2.0 * n0).sqrt(), (2.0 * (n0 + nt + ns)).sqrt()))
    }

    /// Point on element `k` at edge parameter `t` (global), for trace checks.
    pub fn edge_point(&self, k: usize, t: f64) -> Option<[f64; 2]> {
        let side = self.side(k)?;
        let tl = if side.aligned { t } else { -t };
        Some(local_edge_point(side.local, tl))
    }
}
