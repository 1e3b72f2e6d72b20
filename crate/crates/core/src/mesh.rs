//! Conforming parallelogram meshes, their affine reference maps, element
//! patches and per-element polynomial degrees.
//!
//! Local numbering on the reference square `Q = (-1,1)²`:
//!
//! ```text
//!   v3 ---- e2 ---- v2
//!   |                |
//!   e3               e1        (-1,-1) -> v0, (1,-1) -> v1,
//!   |                |         (1, 1)  -> v2, (-1,1) -> v3
//!   v0 ---- e0 ---- v1
//! ```
//!
//! Each local edge has a reference parameter running from its first to its
//! second listed vertex: `e0` is `η = -1` with parameter `ξ` (v0 → v1), `e1` is
//! `ξ = 1` with parameter `η` (v1 → v2), `e2` is `η = 1` with parameter `ξ`
//! (v3 → v2) and `e3` is `ξ = -1` with parameter `η` (v0 → v3). Globally an edge
//! is parametrized from its lower to its higher vertex index.

use std::collections::HashMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::weighted::RefEdge;

const PARALLELOGRAM_TOL: f64 = 1e-12;
const DEGENERACY_TOL: f64 = 1e-12;

/// On-disk mesh description.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MeshDocument {
    pub vertices: Vec<[f64; 2]>,
    pub elements: Vec<[usize; 4]>,
}

/// `F(ξ, η) = offset + matrix · (ξ, η)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub matrix: [[f64; 2]; 2],
    pub offset: [f64; 2],
    /// `A = B⁻¹ B⁻ᵀ`, so that `Δu ∘ F = Σ A_ij ∂²û/∂x̂_i∂x̂_j`.
    pub laplacian_coeffs: [[f64; 2]; 2],
    inverse: [[f64; 2]; 2],
    det: f64,
}

impl AffineMap {
    fn from_vertices(v0: [f64; 2], v1: [f64; 2], v3: [f64; 2]) -> Self {
        let b = [
            [0.5 * (v1[0] - v0[0]), 0.5 * (v3[0] - v0[0])],
            [0.5 * (v1[1] - v0[1]), 0.5 * (v3[1] - v0[1])],
        ];
        let det = b[0][0] * b[1][1] - b[0][1] * b[1][0];
        let inv = [
            [b[1][1] / det, -b[0][1] / det],
            [-b[1][0] / det, b[0][0] / det],
        ];
        // A = inv · invᵀ
        let mut a = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                a[i][j] = inv[i][0] * inv[j][0] + inv[i][1] * inv[j][1];
            }
        }
        let offset = [v0[0] + b[0][0] + b[0][1], v0[1] + b[1][0] + b[1][1]];
        Self {
            matrix: b,
            offset,
            laplacian_coeffs: a,
            inverse: inv,
            det,
        }
    }

    pub fn det(&self) -> f64 {
        self.det
    }

    pub fn map(&self, xi: f64, eta: f64) -> [f64; 2] {
        let b = &self.matrix;
        [
            self.offset[0] + b[0][0] * xi + b[0][1] * eta,
            self.offset[1] + b[1][0] * xi + b[1][1] * eta,
        ]
    }

    pub fn inverse_map(&self, x: f64, y: f64) -> [f64; 2] {
        let (dx, dy) = (x - self.offset[0], y - self.offset[1]);
        let m = &self.inverse;
        [m[0][0] * dx + m[0][1] * dy, m[1][0] * dx + m[1][1] * dy]
    }

    /// Physical gradient `B⁻ᵀ ∇̂û` from a reference gradient.
    pub fn physical_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        let m = &self.inverse;
        [
            m[0][0] * g[0] + m[1][0] * g[1],
            m[0][1] * g[0] + m[1][1] * g[1],
        ]
    }

    /// Reference gradient `Bᵀ ∇u` from a physical gradient.
    pub fn reference_gradient(&self, g: [f64; 2]) -> [f64; 2] {
        let b = &self.matrix;
        [
            b[0][0] * g[0] + b[1][0] * g[1],
            b[0][1] * g[0] + b[1][1] * g[1],
        ]
    }

    /// Physical Laplacian from reference second derivatives `[ûxx, ûxy, ûyy]`.
    pub fn laplacian(&self, h: [f64; 3]) -> f64 {
        let a = &self.laplacian_coeffs;
        a[0][0] * h[0] + 2.0 * a[0][1] * h[1] + a[1][1] * h[2]
    }
}

/// One side of an edge as seen from an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgeSide {
    pub element: usize,
    pub local: usize,
    /// Whether the local reference parameter runs in the global direction.
    pub aligned: bool,
}

#[derive(Debug, Clone)]
pub struct MeshEdge {
    /// Endpoints, lower global index first.
    pub vertices: [usize; 2],
    /// Element with the lower index; the normal points out of it.
    pub inner: EdgeSide,
    pub outer: Option<EdgeSide>,
    /// Unit normal pointing from `inner` to `outer` (outward on the boundary).
    pub normal: [f64; 2],
    pub length: f64,
}

impl MeshEdge {
    pub fn is_boundary(&self) -> bool {
        self.outer.is_none()
    }

    pub fn sides(&self) -> impl Iterator<Item = EdgeSide> + '_ {
        std::iter::once(self.inner).chain(self.outer)
    }
}

/// Vertex slots of local edge `e`, in the order of its reference parameter.
pub const LOCAL_EDGE_VERTICES: [[usize; 2]; 4] = [[0, 1], [1, 2], [3, 2], [0, 3]];

/// Reference coordinates of the four vertex slots.
pub const REF_VERTICES: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

pub fn local_edge_ref(local: usize) -> RefEdge {
    match local {
        0 => RefEdge::Bottom,
        1 => RefEdge::Right,
        2 => RefEdge::Top,
        _ => RefEdge::Left,
    }
}

/// Reference point on local edge `local` at parameter `t`.
pub fn local_edge_point(local: usize, t: f64) -> [f64; 2] {
    match local {
        0 => [t, -1.0],
        1 => [1.0, t],
        2 => [t, 1.0],
        _ => [-1.0, t],
    }
}

#[derive(Debug, Clone)]
pub struct ParallelogramMesh {
    vertices: Vec<[f64; 2]>,
    elements: Vec<[usize; 4]>,
    maps: Vec<AffineMap>,
    edges: Vec<MeshEdge>,
    element_edges: Vec<[usize; 4]>,
    vertex_elements: Vec<Vec<usize>>,
    boundary_vertex: Vec<bool>,
}

impl ParallelogramMesh {
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: MeshDocument = serde_json::from_str(text)?;
        Self::new(doc.vertices, doc.elements)
    }

    pub fn from_path(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_document(&self) -> MeshDocument {
        MeshDocument {
            vertices: self.vertices.clone(),
            elements: self.elements.clone(),
        }
    }

    /// Validates the elements and derives edges, adjacency and boundary flags.
    pub fn new(vertices: Vec<[f64; 2]>, elements: Vec<[usize; 4]>) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::Conformity("mesh has no elements".into()));
        }
        if vertices.iter().flatten().any(|c| !c.is_finite()) {
            return Err(Error::Conformity(
                "vertex coordinates must be finite".into(),
            ));
        }
        let mut maps = Vec::with_capacity(elements.len());
        for (k, el) in elements.iter().enumerate() {
            maps.push(validate_element(k, el, &vertices)?);
        }

        let mut edges: Vec<MeshEdge> = Vec::new();
        let mut element_edges = vec![[0usize; 4]; elements.len()];
        let mut lookup: HashMap<[usize; 2], usize> = HashMap::new();
        let mut directed: HashMap<(usize, usize), usize> = HashMap::new();
        for (k, el) in elements.iter().enumerate() {
            for slot in 0..4 {
                let (a, b) = (el[slot], el[(slot + 1) % 4]);
                if let Some(other) = directed.insert((a, b), k) {
                    return Err(Error::Orientation(format!(
                        "elements {other} and {k} traverse edge ({a}, {b}) in the same direction"
                    )));
                }
            }
            for local in 0..4 {
                let [s, e] = LOCAL_EDGE_VERTICES[local].map(|i| el[i]);
                let key = [s.min(e), s.max(e)];
                let side = EdgeSide {
                    element: k,
                    local,
                    aligned: s < e,
                };
                match lookup.get(&key) {
                    None => {
                        lookup.insert(key, edges.len());
                        element_edges[k][local] = edges.len();
                        let (normal, length) = outward_normal(&vertices, el, local);
                        edges.push(MeshEdge {
                            vertices: key,
                            inner: side,
                            outer: None,
                            normal,
                            length,
                        });
                    }
                    Some(&id) => {
                        let edge = &mut edges[id];
                        if edge.outer.is_some() {
                            return Err(Error::Conformity(format!(
                                "edge ({}, {}) is shared by more than two elements",
                                key[0], key[1]
                            )));
                        }
                        edge.outer = Some(side);
                        element_edges[k][local] = id;
                    }
                }
            }
        }

        check_hanging_nodes(&vertices, &edges)?;

        let mut vertex_elements = vec![Vec::new(); vertices.len()];
        for (k, el) in elements.iter().enumerate() {
            for &v in el {
                vertex_elements[v].push(k);
            }
        }
        let mut boundary_vertex = vec![false; vertices.len()];
        for e in edges.iter().filter(|e| e.is_boundary()) {
            boundary_vertex[e.vertices[0]] = true;
            boundary_vertex[e.vertices[1]] = true;
        }

        Ok(Self {
            vertices,
            elements,
            maps,
            edges,
            element_edges,
            vertex_elements,
            boundary_vertex,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_elements(&self) -> usize {
        self.elements.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn num_interior_edges(&self) -> usize {
        self.edges.iter().filter(|e| !e.is_boundary()).count()
    }

    pub fn vertices(&self) -> &[[f64; 2]] {
        &self.vertices
    }

    pub fn elements(&self) -> &[[usize; 4]] {
        &self.elements
    }

    pub fn edges(&self) -> &[MeshEdge] {
        &self.edges
    }

    pub fn edge(&self, id: usize) -> &MeshEdge {
        &self.edges[id]
    }

    /// Global edge ids of the four local edges of `k`.
    pub fn element_edges(&self, k: usize) -> [usize; 4] {
        self.element_edges[k]
    }

    /// The reference map `F_K`.
    pub fn geometry(&self, k: usize) -> Result<&AffineMap> {
        self.maps
            .get(k)
            .ok_or_else(|| Error::Parameter(format!("element {k} does not exist")))
    }

    pub fn map(&self, k: usize) -> &AffineMap {
        &self.maps[k]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    /// Elements containing vertex `v`, ascending.
    pub fn vertex_elements(&self, v: usize) -> &[usize] {
        &self.vertex_elements[v]
    }

    /// Elements sharing at least one vertex with `k`, including `k`.
    pub fn element_patch(&self, k: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.elements[k]
            .iter()
            .flat_map(|&v| self.vertex_elements[v].iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Elements whose closure meets edge `e`.
    pub fn edge_patch(&self, e: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self.edges[e]
            .vertices
            .iter()
            .flat_map(|&v| self.vertex_elements[v].iter().copied())
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Slot (0..4) of vertex `v` in element `k`.
    pub fn vertex_slot(&self, k: usize, v: usize) -> Option<usize> {
        self.elements[k].iter().position(|&w| w == v)
    }

    pub fn diameter(&self) -> f64 {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for v in &self.vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(v[d]);
                hi[d] = hi[d].max(v[d]);
            }
        }
        ((hi[0] - lo[0]).powi(2) + (hi[1] - lo[1]).powi(2)).sqrt()
    }

    /// Axis-aligned bounding box `[xmin, xmax, ymin, ymax]`.
    pub fn bounding_box(&self) -> [f64; 4] {
        let mut b = [
            f64::INFINITY,
            f64::NEG_INFINITY,
            f64::INFINITY,
            f64::NEG_INFINITY,
        ];
        for v in &self.vertices {
            b[0] = b[0].min(v[0]);
            b[1] = b[1].max(v[0]);
            b[2] = b[2].min(v[1]);
            b[3] = b[3].max(v[1]);
        }
        b
    }
}

fn validate_element(k: usize, el: &[usize; 4], vertices: &[[f64; 2]]) -> Result<AffineMap> {
    let geom = |reason: String| Error::Geometry { element: k, reason };
    for &v in el {
        if v >= vertices.len() {
            return Err(geom(format!("vertex index {v} out of range")));
        }
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if el[i] == el[j] {
                return Err(geom(format!("vertex {} listed twice", el[i])));
            }
        }
    }
    let p = el.map(|v| vertices[v]);
    let d1 = ((p[2][0] - p[0][0]).powi(2) + (p[2][1] - p[0][1]).powi(2)).sqrt();
    let d2 = ((p[3][0] - p[1][0]).powi(2) + (p[3][1] - p[1][1]).powi(2)).sqrt();
    let diam = d1.max(d2);
    let gap = ((p[0][0] + p[2][0] - p[1][0] - p[3][0]).powi(2)
        + (p[0][1] + p[2][1] - p[1][1] - p[3][1]).powi(2))
    .sqrt();
    if gap > PARALLELOGRAM_TOL * diam {
        return Err(geom(format!(
            "not a parallelogram (v0+v2-v1-v3 has length {gap:e})"
        )));
    }
    let map = AffineMap::from_vertices(p[0], p[1], p[3]);
    // det B is a quarter of the area
    if map.det().abs() < DEGENERACY_TOL * diam * diam {
        return Err(geom("degenerate element".into()));
    }
    if map.det() < 0.0 {
        return Err(Error::Orientation(format!(
            "element {k} is listed clockwise"
        )));
    }
    Ok(map)
}

fn outward_normal(vertices: &[[f64; 2]], el: &[usize; 4], local: usize) -> ([f64; 2], f64) {
    // traversal direction in the counter-clockwise boundary loop
    let (a, b) = match local {
        0 => (el[0], el[1]),
        1 => (el[1], el[2]),
        2 => (el[2], el[3]),
        _ => (el[3], el[0]),
    };
    let d = [
        vertices[b][0] - vertices[a][0],
        vertices[b][1] - vertices[a][1],
    ];
    let len = (d[0] * d[0] + d[1] * d[1]).sqrt();
    ([d[1] / len, -d[0] / len], len)
}

fn check_hanging_nodes(vertices: &[[f64; 2]], edges: &[MeshEdge]) -> Result<()> {
    for edge in edges {
        let [a, b] = edge.vertices.map(|v| vertices[v]);
        let d = [b[0] - a[0], b[1] - a[1]];
        let len2 = d[0] * d[0] + d[1] * d[1];
        let tol = 1e-10 * len2.sqrt();
        for (v, p) in vertices.iter().enumerate() {
            if edge.vertices.contains(&v) {
                continue;
            }
            let r = [p[0] - a[0], p[1] - a[1]];
            let t = (r[0] * d[0] + r[1] * d[1]) / len2;
            if t <= 1e-10 || t >= 1.0 - 1e-10 {
                continue;
            }
            let dist = (r[0] * d[1] - r[1] * d[0]).abs() / len2.sqrt();
            if dist <= tol {
                return Err(Error::Conformity(format!(
                    "vertex {v} hangs on edge ({}, {})",
                    edge.vertices[0], edge.vertices[1]
                )));
            }
        }
    }
    Ok(())
}

/// Polynomial degree per element.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeMap(Vec<usize>);

impl DegreeMap {
    pub fn uniform(num_elements: usize, p: usize) -> Self {
        Self(vec![p; num_elements])
    }

    pub fn from_vec(p: Vec<usize>) -> Result<Self> {
        if p.contains(&0) {
            return param("element degrees must be at least 1");
        }
        Ok(Self(p))
    }

    pub fn get(&self, k: usize) -> usize {
        self.0[k]
    }

    pub fn set(&mut self, k: usize, p: usize) {
        self.0[k] = p;
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn max(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    pub fn min(&self) -> usize {
        self.0.iter().copied().min().unwrap_or(0)
    }

    pub fn check_against(&self, mesh: &ParallelogramMesh) -> Result<()> {
        if self.0.len() != mesh.num_elements() {
            return param(format!(
                "degree map has {} entries for {} elements",
                self.0.len(),
                mesh.num_elements()
            ));
        }
        if self.0.contains(&0) {
            return param("element degrees must be at least 1");
        }
        Ok(())
    }

    /// Raises degrees until vertex neighbours differ by at most one.
    pub fn smooth(&mut self, mesh: &ParallelogramMesh) {
        loop {
            let mut changed = false;
            for k in 0..mesh.num_elements() {
                for n in mesh.element_patch(k) {
                    if self.0[n] + 1 < self.0[k] {
                        self.0[n] = self.0[k] - 1;
                        changed = true;
                    }
                }
            }
            if !changed {
                break;
            }
        }
    }
}

/// Ratio allowed between degrees of vertex neighbours.
pub const COMPARABILITY: usize = 2;

/// Patches and the derived minimum degrees.
#[derive(Debug, Clone)]
pub struct PatchTables {
    pub vertex_patches: Vec<Vec<usize>>,
    pub element_patches: Vec<Vec<usize>>,
    pub edge_patches: Vec<Vec<usize>>,
    /// `p_V`: minimum degree over elements containing the vertex.
    pub vertex_degrees: Vec<usize>,
    /// `p_e`: minimum degree over elements having the edge.
    pub edge_degrees: Vec<usize>,
    /// Neighbour pairs `(K, K')` with `p_K > 2 p_K'`.
    pub violations: Vec<(usize, usize)>,
}

pub fn patches_and_degrees(mesh: &ParallelogramMesh, degrees: &DegreeMap) -> Result<PatchTables> {
    degrees.check_against(mesh)?;
    let vertex_patches: Vec<Vec<usize>> = (0..mesh.num_vertices())
        .map(|v| mesh.vertex_elements(v).to_vec())
        .collect();
    let element_patches: Vec<Vec<usize>> = (0..mesh.num_elements())
        .map(|k| mesh.element_patch(k))
        .collect();
    let edge_patches: Vec<Vec<usize>> = (0..mesh.num_edges()).map(|e| mesh.edge_patch(e)).collect();
    let vertex_degrees = vertex_patches
        .iter()
        .map(|els| els.iter().map(|&k| degrees.get(k)).min().unwrap_or(0))
        .collect();
    let edge_degrees = mesh
        .edges()
        .iter()
        .map(|e| e.sides().map(|s| degrees.get(s.element)).min().unwrap())
        .collect();
    let mut violations = Vec::new();
    for (k, patch) in element_patches.iter().enumerate() {
        for &n in patch {
            if degrees.get(k) > COMPARABILITY * degrees.get(n) {
                violations.push((k, n));
            }
        }
    }
    Ok(PatchTables {
        vertex_patches,
        element_patches,
        edge_patches,
        vertex_degrees,
        edge_degrees,
        violations,
    })
}

/// Structured `nx × ny` mesh of the rectangle `[x0,x1] × [y0,y1]`.
pub fn rectangle(
    x0: f64,
    x1: f64,
    y0: f64,
    y1: f64,
    nx: usize,
    ny: usize,
) -> Result<ParallelogramMesh> {
    if nx == 0 || ny == 0 {
        return param("rectangle needs at least one cell per direction");
    }
    let mut vertices = Vec::with_capacity((nx + 1) * (ny + 1));
    for j in 0..=ny {
        for i in 0..=nx {
            vertices.push([
                x0 + (x1 - x0) * i as f64 / nx as f64,
                y0 + (y1 - y0) * j as f64 / ny as f64,
            ]);
        }
    }
    let id = |i: usize, j: usize| j * (nx + 1) + i;
    let mut elements = Vec::with_capacity(nx * ny);
    for j in 0..ny {
        for i in 0..nx {
            elements.push([id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1)]);
        }
    }
    ParallelogramMesh::new(vertices, elements)
}

/// The L-shaped domain `(-1,1)² \ [0,1)×(-1,0]` with `n × n` squares per
/// unit square (`3n²` elements). The reentrant corner is at the origin.
pub fn lshape(n: usize) -> Result<ParallelogramMesh> {
    let full = rectangle(-1.0, 1.0, -1.0, 1.0, 2 * n, 2 * n)?;
    let kept: Vec<[usize; 4]> = full
        .elements()
        .iter()
        .copied()
        .filter(|el| {
            let c = full.vertices()[el[0]];
            !(c[0] >= -1e-12 && c[1] < -1e-12)
        })
        .collect();
    let mut renumber = vec![usize::MAX; full.num_vertices()];
    let mut vertices = Vec::new();
    for el in &kept {
        for &v in el {
            if renumber[v] == usize::MAX {
                renumber[v] = vertices.len();
                vertices.push(full.vertices()[v]);
            }
        }
    }
    let elements = kept.iter().map(|el| el.map(|v| renumber[v])).collect();
    ParallelogramMesh::new(vertices, elements)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_square_map_is_identity() {
        let m = rectangle(-1.0, 1.0, -1.0, 1.0, 1, 1).unwrap();
        let f = m.geometry(0).unwrap();
        assert_eq!(f.matrix, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(f.offset, [0.0, 0.0]);
        assert_eq!(f.laplacian_coeffs, [[1.0, 0.0], [0.0, 1.0]]);
        assert_eq!(m.num_interior_edges(), 0);
        assert!(m.edges().iter().all(|e| e.is_boundary()));
    }

    #[test]
    fn two_by_two_counts() {
        let m = rectangle(0.0, 1.0, 0.0, 1.0, 2, 2).unwrap();
        assert_eq!(m.num_vertices(), 9);
        assert_eq!(m.num_elements(), 4);
        assert_eq!(m.num_edges(), 12);
        assert_eq!(m.num_interior_edges(), 4);
        assert_eq!(m.vertex_elements(4).len(), 4);
    }

    #[test]
    fn scaled_square_coefficients() {
        let h = 0.5;
        let m = rectangle(0.0, h, 0.0, h, 1, 1).unwrap();
        let f = m.map(0);
        assert!((f.matrix[0][0] - h / 2.0).abs() < 1e-15);
        assert!((f.laplacian_coeffs[0][0] - 4.0 / (h * h)).abs() < 1e-12);
    }

    #[test]
    fn sheared_element_rejected() {
        let err = ParallelogramMesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.2, 1.0], [0.0, 1.0]],
            vec![[0, 1, 2, 3]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Geometry { element: 0, .. }));
    }

    #[test]
    fn clockwise_rejected() {
        let err = ParallelogramMesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]],
            vec![[0, 3, 2, 1]],
        )
        .unwrap_err();
        assert!(matches!(err, Error::Orientation(_)));
    }

    #[test]
    fn hanging_node_rejected() {
        // one big element next to two small ones
        let vertices = vec![
            [0.0, 0.0],
            [1.0, 0.0],
            [1.0, 1.0],
            [0.0, 1.0],
            [2.0, 0.0],
            [2.0, 0.5],
            [1.0, 0.5],
            [2.0, 1.0],
        ];
        let elements = vec![[0, 1, 2, 3], [1, 4, 5, 6], [6, 5, 7, 2]];
        let err = ParallelogramMesh::new(vertices, elements).unwrap_err();
        assert!(matches!(err, Error::Conformity(_)));
    }

    #[test]
    fn normals_point_from_lower_element() {
        let m = rectangle(0.0, 2.0, 0.0, 1.0, 2, 1).unwrap();
        let e = m.edges().iter().find(|e| !e.is_boundary()).unwrap();
        assert_eq!(e.inner.element, 0);
        assert_eq!(e.outer.unwrap().element, 1);
        assert!((e.normal[0] - 1.0).abs() < 1e-15 && e.normal[1].abs() < 1e-15);
    }

    #[test]
    fn comparability_and_smoothing() {
        let m = rectangle(0.0, 2.0, 0.0, 1.0, 2, 1).unwrap();
        let d = DegreeMap::from_vec(vec![1, 5]).unwrap();
        let t = patches_and_degrees(&m, &d).unwrap();
        assert_eq!(t.violations, vec![(1, 0)]);
        let mut d = d;
        d.smooth(&m);
        assert_eq!(d.as_slice(), &[4, 5]);
        assert!(patches_and_degrees(&m, &DegreeMap::uniform(3, 2)).is_err());
    }
}
