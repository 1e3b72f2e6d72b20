//! Global numbering of hierarchical degrees of freedom.
//!
//! Vertex functions come first, then edge functions (minimum rule: an edge
//! carries bubbles `2..=p_e` where `p_e` is the smaller adjacent degree), then
//! interior functions element by element. Boundary vertex and edge functions
//! are constrained to zero.

use crate::mesh::{DegreeMap, ParallelogramMesh};

/// One local shape `N_i(ξ) N_j(η)` and the global function it contributes to.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalDof {
    pub i: usize,
    pub j: usize,
    pub global: usize,
    /// `±1`, accounting for the local edge direction of odd bubbles.
    pub sign: f64,
}

#[derive(Debug, Clone)]
pub struct DofMap {
    element_dofs: Vec<Vec<LocalDof>>,
    dirichlet: Vec<bool>,
    free_index: Vec<Option<usize>>,
    num_free: usize,
}

/// `(i, j)` indices of bubble `k` on local edge `local`.
pub fn edge_shape(local: usize, k: usize) -> (usize, usize) {
    match local {
        0 => (k, 0),
        1 => (1, k),
        2 => (k, 1),
        _ => (0, k),
    }
}

/// `(i, j)` indices of the nodal function at vertex slot `slot`.
pub fn vertex_shape(slot: usize) -> (usize, usize) {
    [(0, 0), (1, 0), (1, 1), (0, 1)][slot]
}

impl DofMap {
    pub fn new(mesh: &ParallelogramMesh, degrees: &DegreeMap) -> Self {
        let nv = mesh.num_vertices();
        let mut next = nv;
        let mut dirichlet: Vec<bool> = (0..nv).map(|v| mesh.is_boundary_vertex(v)).collect();

        let mut edge_start = Vec::with_capacity(mesh.num_edges());
        let mut edge_degree = Vec::with_capacity(mesh.num_edges());
        for e in mesh.edges() {
            let pe = e.sides().map(|s| degrees.get(s.element)).min().unwrap();
            edge_start.push(next);
            edge_degree.push(pe);
            let count = pe.saturating_sub(1);
            next += count;
            dirichlet.extend(std::iter::repeat_n(e.is_boundary(), count));
        }

        let mut element_dofs = Vec::with_capacity(mesh.num_elements());
        for (k, el) in mesh.elements().iter().enumerate() {
            let p = degrees.get(k);
            let mut dofs = Vec::with_capacity((p + 1) * (p + 1));
            for (slot, &v) in el.iter().enumerate() {
                let (i, j) = vertex_shape(slot);
                dofs.push(LocalDof {
                    i,
                    j,
                    global: v,
                    sign: 1.0,
                });
            }
            let edges = mesh.element_edges(k);
            for (local, &e) in edges.iter().enumerate() {
                let aligned = mesh
                    .edge(e)
                    .sides()
                    .find(|s| s.element == k && s.local == local)
                    .map(|s| s.aligned)
                    .unwrap();
                for m in 2..=edge_degree[e] {
                    let (i, j) = edge_shape(local, m);
                    let sign = if !aligned && m % 2 == 1 { -1.0 } else { 1.0 };
                    dofs.push(LocalDof {
                        i,
                        j,
                        global: edge_start[e] + m - 2,
                        sign,
                    });
                }
            }
            for i in 2..=p {
                for j in 2..=p {
                    dofs.push(LocalDof {
                        i,
                        j,
                        global: next,
                        sign: 1.0,
                    });
                    dirichlet.push(false);
                    next += 1;
                }
            }
            element_dofs.push(dofs);
        }

        let mut free_index = vec![None; next];
        let mut num_free = 0;
        for (g, d) in dirichlet.iter().enumerate() {
            if !d {
                free_index[g] = Some(num_free);
                num_free += 1;
            }
        }
        Self {
            element_dofs,
            dirichlet,
            free_index,
            num_free,
        }
    }

    pub fn num_dofs(&self) -> usize {
        self.dirichlet.len()
    }

    pub fn num_free(&self) -> usize {
        self.num_free
    }

    pub fn element_dofs(&self, k: usize) -> &[LocalDof] {
        &self.element_dofs[k]
    }

    pub fn is_dirichlet(&self, g: usize) -> bool {
        self.dirichlet[g]
    }

    pub fn free_index(&self, g: usize) -> Option<usize> {
        self.free_index[g]
    }
}
