//! Conforming `Q_p` finite elements for `-Δu = f` with homogeneous Dirichlet
//! data on parallelogram meshes.

pub mod assembly;
pub mod basis;
pub mod dofmap;
pub mod solver;

use std::sync::Arc;

pub use assembly::{assemble, energy_against_basis, LinearSystem, DEFAULT_BOOST};
pub use dofmap::{DofMap, LocalDof};
pub use solver::{pcg, CsrMatrix, SolveStats};

use crate::error::{param, Result};
use crate::mesh::{patches_and_degrees, AffineMap, DegreeMap, ParallelogramMesh};
use basis::shapes_1d;

/// Relative residual demanded from the linear solver.
pub const SOLVER_TOL: f64 = 1e-12;

/// Mesh, degrees and the resulting numbering.
#[derive(Debug, Clone)]
pub struct FemSpace {
    pub mesh: Arc<ParallelogramMesh>,
    pub degrees: DegreeMap,
    pub dofmap: DofMap,
}

impl FemSpace {
    pub fn new(mesh: Arc<ParallelogramMesh>, degrees: DegreeMap) -> Result<Arc<Self>> {
        patches_and_degrees(&mesh, &degrees)?;
        let dofmap = DofMap::new(&mesh, &degrees);
        Ok(Arc::new(Self {
            mesh,
            degrees,
            dofmap,
        }))
    }

    pub fn num_free(&self) -> usize {
        self.dofmap.num_free()
    }

    /// Global coefficient vector from free values (constrained entries zero).
    pub fn expand_free(&self, free: &[f64]) -> Vec<f64> {
        (0..self.dofmap.num_dofs())
            .map(|g| self.dofmap.free_index(g).map_or(0.0, |i| free[i]))
            .collect()
    }
}

/// Hierarchical coefficients of a discrete function on one element.
#[derive(Debug, Clone)]
pub struct LocalPoly {
    pub p: usize,
    /// `a[i * (p+1) + j]` multiplies `N_i(ξ) N_j(η)`.
    pub a: Vec<f64>,
}

/// Value, reference gradient and reference Hessian `[xx, xy, yy]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: f64,
    pub grad: [f64; 2],
    pub hess: [f64; 3],
}

impl LocalPoly {
    pub fn jet(&self, xi: f64, eta: f64) -> Jet {
        let n = self.p + 1;
        let tx = shapes_1d(self.p, xi);
        let ty = shapes_1d(self.p, eta);
        let mut out = Jet {
            value: 0.0,
            grad: [0.0; 2],
            hess: [0.0; 3],
        };
        for i in 0..n {
            let row = &self.a[i * n..(i + 1) * n];
            let (mut v, mut dy, mut dyy) = (0.0, 0.0, 0.0);
            for (j, &c) in row.iter().enumerate() {
                v += c * ty.value[j];
                dy += c * ty.d1[j];
                dyy += c * ty.d2[j];
            }
            out.value += tx.value[i] * v;
            out.grad[0] += tx.d1[i] * v;
            out.grad[1] += tx.value[i] * dy;
            out.hess[0] += tx.d2[i] * v;
            out.hess[1] += tx.d1[i] * dy;
            out.hess[2] += tx.value[i] * dyy;
        }
        out
    }

    pub fn value(&self, xi: f64, eta: f64) -> f64 {
        self.jet(xi, eta).value
    }
}

/// What [`DiscreteSolution::evaluate`] returns at each point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Value,
    Gradient,
    Laplacian,
}

/// A function of the discrete space, stored by its global coefficients.
#[derive(Debug, Clone)]
pub struct DiscreteSolution {
    pub space: Arc<FemSpace>,
    /// One entry per global DOF; constrained entries are zero.
    pub coeffs: Vec<f64>,
    pub stats: SolveStats,
}

impl DiscreteSolution {
    pub fn from_coefficients(space: Arc<FemSpace>, coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.len() != space.dofmap.num_dofs() {
            return param(format!(
                "expected {} coefficients, got {}",
                space.dofmap.num_dofs(),
                coeffs.len()
            ));
        }
        Ok(Self {
            space,
            coeffs,
            stats: SolveStats {
                iterations: 0,
                relative_residual: 0.0,
            },
        })
    }

    pub fn mesh(&self) -> &ParallelogramMesh {
        &self.space.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<ParallelogramMesh> {
        &self.space.mesh
    }

    pub fn degrees(&self) -> &DegreeMap {
        &self.space.degrees
    }

    pub fn num_free(&self) -> usize {
        self.space.num_free()
    }

    pub fn map(&self, k: usize) -> &AffineMap {
        self.space.mesh.map(k)
    }

    pub fn local(&self, k: usize) -> LocalPoly {
        let p = self.space.degrees.get(k);
        let n = p + 1;
        let mut a = vec![0.0; n * n];
        for d in self.space.dofmap.element_dofs(k) {
            a[d.i * n + d.j] += d.sign * self.coeffs[d.global];
        }
        LocalPoly { p, a }
    }

    /// Physical value, gradient and Laplacian at a reference point of `K`.
    pub fn physical_jet(&self, k: usize, xi: f64, eta: f64) -> (f64, [f64; 2], f64) {
        let j = self.local(k).jet(xi, eta);
        let map = self.map(k);
        (
            j.value,
            map.physical_gradient(j.grad),
            map.laplacian(j.hess),
        )
    }

    /// Evaluates at reference points of element `k`. Gradients are returned
    /// as consecutive `(∂x, ∂y)` pairs.
    pub fn evaluate(&self, k: usize, what: Quantity, points: &[[f64; 2]]) -> Result<Vec<f64>> {
        if k >= self.mesh().num_elements() {
            return param(format!("element {k} does not exist"));
        }
        if points.iter().any(|p| p[0].abs() > 1.0 || p[1].abs() > 1.0) {
            return param("evaluation points must lie in the reference square");
        }
        let local = self.local(k);
        let map = self.map(k);
        let mut out = Vec::with_capacity(points.len() * 2);
        for &[x, y] in points {
            let j = local.jet(x, y);
            match what {
                Quantity::Value => out.push(j.value),
                Quantity::Gradient => out.extend(map.physical_gradient(j.grad)),
                Quantity::Laplacian => out.push(map.laplacian(j.hess)),
            }
        }
        Ok(out)
    }

    /// Free part of the coefficient vector.
    pub fn free_coeffs(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.num_free()];
        for (g, v) in self.coeffs.iter().enumerate() {
            if let Some(i) = self.space.dofmap.free_index(g) {
                out[i] = *v;
            }
        }
        out
    }
}

/// Solves the assembled system to [`SOLVER_TOL`].
pub fn solve(system: &LinearSystem) -> Result<DiscreteSolution> {
    let (x, stats) = pcg(&system.matrix, &system.rhs, SOLVER_TOL)?;
    let coeffs = system.space.expand_free(&x);
    Ok(DiscreteSolution {
        space: Arc::clone(&system.space),
        coeffs,
        stats,
    })
}

/// Assembles and solves `-Δu = f` in one call.
pub fn solve_poisson(
    mesh: Arc<ParallelogramMesh>,
    degrees: DegreeMap,
    f: &(dyn Fn(f64, f64) -> f64 + Sync),
    boost: usize,
) -> Result<DiscreteSolution> {
    let space = FemSpace::new(mesh, degrees)?;
    solve(&assemble(&space, f, boost)?)
}
