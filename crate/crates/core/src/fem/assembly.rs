//! Element matrices and global assembly of the Dirichlet Poisson problem.

use std::sync::Arc;

use rayon::prelude::*;

use super::basis::tabulate;
use super::solver::CsrMatrix;
use super::FemSpace;
use crate::error::Result;
use crate::jacobi::gauss_legendre;
use crate::mesh::AffineMap;

/// Default number of extra Gauss points used for load integrals.
pub const DEFAULT_BOOST: usize = 3;

/// Stiffness matrix and load vector restricted to the free unknowns.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub space: Arc<FemSpace>,
    pub matrix: CsrMatrix,
    pub rhs: Vec<f64>,
}

/// 1D Gram-type matrices on `[-1, 1]`: `S = ∫N'N'`, `M = ∫NN`, `C[a][b] = ∫N_a' N_b`.
struct OneDim {
    s: Vec<f64>,
    m: Vec<f64>,
    c: Vec<f64>,
}

fn one_dim(p: usize) -> Result<OneDim> {
    let n = p + 1;
    let rule = gauss_legendre(p + 1)?;
    let tabs = tabulate(p, rule.nodes());
    let mut s = vec![0.0; n * n];
    let mut m = vec![0.0; n * n];
    let mut c = vec![0.0; n * n];
    for (t, w) in tabs.iter().zip(rule.weights()) {
        for a in 0..n {
            for b in 0..n {
                s[a * n + b] += w * t.d1[a] * t.d1[b];
                m[a * n + b] += w * t.value[a] * t.value[b];
                c[a * n + b] += w * t.d1[a] * t.value[b];
            }
        }
    }
    Ok(OneDim { s, m, c })
}

/// Element stiffness over all `(p+1)²` tensor shapes, row-major in `(i, j)`.
pub fn element_stiffness(map: &AffineMap, p: usize) -> Result<Vec<f64>> {
    let n = p + 1;
    let d = one_dim(p)?;
    let a = map.laplacian_coeffs;
    let jac = map.det().abs();
    let nn = n * n;
    let mut k = vec![0.0; nn * nn];
    for i in 0..n {
        for j in 0..n {
            let row = i * n + j;
            for kk in 0..n {
                for l in 0..n {
                    let col = kk * n + l;
                    let v = a[0][0] * d.s[i * n + kk] * d.m[j * n + l]
                        + a[0][1] * d.c[i * n + kk] * d.c[l * n + j]
                        + a[1][0] * d.c[kk * n + i] * d.c[j * n + l]
                        + a[1][1] * d.m[i * n + kk] * d.s[j * n + l];
                    k[row * nn + col] = jac * v;
                }
            }
        }
    }
    Ok(k)
}

/// `∫_K g(x) N_i N_j` for all shapes, with `p + 1 + boost` points per direction.
pub fn element_load(
    map: &AffineMap,
    p: usize,
    g: &(dyn Fn(f64, f64) -> f64 + Sync),
    boost: usize,
) -> Result<Vec<f64>> {
    let n = p + 1;
    let rule = gauss_legendre(p + 1 + boost)?;
    let tabs = tabulate(p, rule.nodes());
    let jac = map.det().abs();
    let nodes = rule.nodes();
    let w = rule.weights();
    let mut out = vec![0.0; n * n];
    for (a, ta) in tabs.iter().enumerate() {
        for (b, tb) in tabs.iter().enumerate() {
            let [x, y] = map.map(nodes[a], nodes[b]);
            let f = w[a] * w[b] * jac * g(x, y);
            for i in 0..n {
                let fi = f * ta.value[i];
                for j in 0..n {
                    out[i * n + j] += fi * tb.value[j];
                }
            }
        }
    }
    Ok(out)
}

/// `∫_K ∇u · ∇N_ij` for a known physical gradient of `u`.
pub fn element_gradient_load(
    map: &AffineMap,
    p: usize,
    grad: &(dyn Fn(f64, f64) -> [f64; 2] + Sync),
    boost: usize,
) -> Result<Vec<f64>> {
    let n = p + 1;
    let rule = gauss_legendre(p + 1 + boost)?;
    let tabs = tabulate(p, rule.nodes());
    let jac = map.det().abs();
    let nodes = rule.nodes();
    let w = rule.weights();
    // ∇u · B⁻ᵀ∇̂N = (B⁻¹∇u) · ∇̂N; rows of B⁻¹ are B⁻ᵀ applied to unit vectors
    let r0 = map.physical_gradient([1.0, 0.0]);
    let r1 = map.physical_gradient([0.0, 1.0]);
    let mut out = vec![0.0; n * n];
    for (a, ta) in tabs.iter().enumerate() {
        for (b, tb) in tabs.iter().enumerate() {
            let [x, y] = map.map(nodes[a], nodes[b]);
            let g = grad(x, y);
            let gx = g[0] * r0[0] + g[1] * r0[1];
            let gy = g[0] * r1[0] + g[1] * r1[1];
            let f = w[a] * w[b] * jac;
            for i in 0..n {
                for j in 0..n {
                    out[i * n + j] +=
                        f * (gx * ta.d1[i] * tb.value[j] + gy * ta.value[i] * tb.d1[j]);
                }
            }
        }
    }
    Ok(out)
}

/// Scatters element vectors (over all tensor shapes) into free-DOF numbering.
pub(crate) fn scatter_vector(space: &FemSpace, locals: &[Vec<f64>]) -> Vec<f64> {
    let mut out = vec![0.0; space.dofmap.num_free()];
    for (k, local) in locals.iter().enumerate() {
        let n = space.degrees.get(k) + 1;
        for d in space.dofmap.element_dofs(k) {
            if let Some(fi) = space.dofmap.free_index(d.global) {
                out[fi] += d.sign * local[d.i * n + d.j];
            }
        }
    }
    out
}

/// Assembles stiffness and load for `-Δu = f`, `u = 0` on the boundary.
pub fn assemble(
    space: &Arc<FemSpace>,
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
    boost: usize,
) -> Result<LinearSystem> {
    let mesh = &space.mesh;
    let per_element: Vec<(Vec<f64>, Vec<f64>)> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|k| {
            let map = mesh.map(k);
            let p = space.degrees.get(k);
            Ok((element_stiffness(map, p)?, element_load(map, p, f, boost)?))
        })
        .collect::<Result<_>>()?;

    let mut triplets = Vec::new();
    for (k, (stiff, _)) in per_element.iter().enumerate() {
        let n = space.degrees.get(k) + 1;
        let nn = n * n;
        let dofs = space.dofmap.element_dofs(k);
        for a in dofs {
            let Some(ra) = space.dofmap.free_index(a.global) else {
                continue;
            };
            for b in dofs {
                let Some(cb) = space.dofmap.free_index(b.global) else {
                    continue;
                };
                let v = a.sign * b.sign * stiff[(a.i * n + a.j) * nn + b.i * n + b.j];
                triplets.push((ra, cb, v));
            }
        }
    }
    let loads: Vec<Vec<f64>> = per_element.into_iter().map(|(_, l)| l).collect();
    Ok(LinearSystem {
        space: Arc::clone(space),
        matrix: CsrMatrix::from_triplets(space.dofmap.num_free(), triplets),
        rhs: scatter_vector(space, &loads),
    })
}

/// `a(u, φ)` for every free basis function `φ`, given the gradient of `u`.
pub fn energy_against_basis(
    space: &FemSpace,
    grad: &(dyn Fn(f64, f64) -> [f64; 2] + Sync),
    boost: usize,
) -> Result<Vec<f64>> {
    let mesh = &space.mesh;
    let locals: Vec<Vec<f64>> = (0..mesh.num_elements())
        .into_par_iter()
        .map(|k| element_gradient_load(mesh.map(k), space.degrees.get(k), grad, boost))
        .collect::<Result<_>>()?;
    Ok(scatter_vector(space, &locals))
}
