//! Conforming simplicial meshes.
//!
//! Cells are stored as flat index tuples of length `d + 1` with positive
//! orientation. Boundary facets carry a marker; the generators mark every
//! boundary facet [`DIRICHLET`].

mod generate;
mod io;
mod quality;
mod refine;
mod topology;

use std::collections::HashMap;

pub use generate::{unit_cube_mesh, unit_square_mesh};
pub use io::{quality_csv, read_ascii, write_ascii, QUALITY_CSV_HEADER};
pub use quality::{cell_diameter, cell_inradius_diameter, MeshQuality};
pub use refine::refine_uniform;
pub use topology::{Edges, Facet, Topology};

/// Marker for homogeneous Dirichlet boundary facets.
pub const DIRICHLET: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MeshError {
    #[error("cell {cell} has non-positive volume {volume:e}")]
    DegenerateCell { cell: usize, volume: f64 },
    #[error("mesh is not conforming: {0}")]
    NonConforming(String),
    #[error("mesh file line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("invalid mesh: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    dim: usize,
    coords: Vec<f64>,
    cells: Vec<usize>,
    boundary_facets: Vec<usize>,
    boundary_markers: Vec<u32>,
    level: usize,
}

impl Mesh {
    /// Builds a mesh from raw arrays. Negatively oriented cells are flipped;
    /// zero-volume cells are rejected. If `boundary` is `None` the boundary
    /// facets are derived from the topology and marked [`DIRICHLET`].
    pub fn new(
        dim: usize,
        coords: Vec<f64>,
        cells: Vec<usize>,
        boundary: Option<(Vec<usize>, Vec<u32>)>,
    ) -> Result<Self, MeshError> {
        if dim != 2 && dim != 3 {
            return Err(MeshError::Invalid(format!("dimension must be 2 or 3, got {dim}")));
        }
        if coords.len() % dim != 0 || cells.len() % (dim + 1) != 0 {
            return Err(MeshError::Invalid("array lengths do not match the dimension".into()));
        }
        let nv = coords.len() / dim;
        if let Some(&bad) = cells.iter().find(|&&v| v >= nv) {
            return Err(MeshError::Invalid(format!("cell references vertex {bad} but only {nv} exist")));
        }
        let mut mesh = Mesh {
            dim,
            coords,
            cells,
            boundary_facets: Vec::new(),
            boundary_markers: Vec::new(),
            level: 0,
        };
        for k in 0..mesh.n_cells() {
            let vol = mesh.signed_volume(k);
            if vol == 0.0 || !vol.is_finite() {
                return Err(MeshError::DegenerateCell { cell: k, volume: vol });
            }
            if vol < 0.0 {
                let base = k * (dim + 1);
                mesh.cells.swap(base, base + 1);
            }
        }
        match boundary {
            Some((facets, markers)) => {
                if facets.len() != markers.len() * dim {
                    return Err(MeshError::Invalid("boundary facet/marker length mismatch".into()));
                }
                mesh.boundary_facets = facets;
                mesh.boundary_markers = markers;
            }
            None => {
                let topo = Topology::build(&mesh);
                for f in topo.facets.iter().filter(|f| f.cells[1].is_none()) {
                    mesh.boundary_facets.extend_from_slice(&f.vertices);
                    mesh.boundary_markers.push(DIRICHLET);
                }
            }
        }
        Ok(mesh)
    }

    pub(crate) fn with_level(mut self, level: usize) -> Self {
        self.level = level;
        self
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn n_vertices(&self) -> usize {
        self.coords.len() / self.dim
    }

    #[inline]
    pub fn n_cells(&self) -> usize {
        self.cells.len() / (self.dim + 1)
    }

    pub fn n_boundary_facets(&self) -> usize {
        self.boundary_markers.len()
    }

    /// Refinement generation (0 for generated or imported meshes).
    pub fn level(&self) -> usize {
        self.level
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn cell(&self, k: usize) -> &[usize] {
        let n = self.dim + 1;
        &self.cells[k * n..(k + 1) * n]
    }

    pub fn cells(&self) -> impl Iterator<Item = &[usize]> + '_ {
        self.cells.chunks_exact(self.dim + 1)
    }

    pub fn boundary_facet(&self, i: usize) -> (&[usize], u32) {
        (&self.boundary_facets[i * self.dim..(i + 1) * self.dim], self.boundary_markers[i])
    }

    pub fn boundary_facets(&self) -> impl Iterator<Item = (&[usize], u32)> + '_ {
        self.boundary_facets.chunks_exact(self.dim).zip(self.boundary_markers.iter().copied())
    }

    /// Vertices lying on a facet with the given marker.
    pub fn marked_vertices(&self, marker: u32) -> Vec<bool> {
        let mut on = vec![false; self.n_vertices()];
        for (f, m) in self.boundary_facets() {
            if m == marker {
                for &v in f {
                    on[v] = true;
                }
            }
        }
        on
    }

    /// Vertex coordinates of cell `k` as fixed-size points (missing coordinates are 0).
    pub fn cell_points(&self, k: usize) -> Vec<[f64; 3]> {
        self.cell(k)
            .iter()
            .map(|&v| {
                let mut x = [0.0; 3];
                x[..self.dim].copy_from_slice(self.vertex(v));
                x
            })
            .collect()
    }

    /// Signed volume of cell `k`.
    pub fn signed_volume(&self, k: usize) -> f64 {
        let x = self.cell_points(k);
        match self.dim {
            2 => 0.5 * ((x[1][0] - x[0][0]) * (x[2][1] - x[0][1]) - (x[2][0] - x[0][0]) * (x[1][1] - x[0][1])),
            _ => {
                let a = sub3(&x[1], &x[0]);
                let b = sub3(&x[2], &x[0]);
                let c = sub3(&x[3], &x[0]);
                dot3(&a, &cross3(&b, &c)) / 6.0
            }
        }
    }

    pub fn cell_volume(&self, k: usize) -> f64 {
        self.signed_volume(k).abs()
    }

    /// Sum of all cell volumes.
    pub fn total_volume(&self) -> f64 {
        (0..self.n_cells()).map(|k| self.cell_volume(k)).sum()
    }

    pub fn quality(&self) -> Result<MeshQuality, MeshError> {
        quality::quality(self)
    }

    pub fn topology(&self) -> Topology {
        Topology::build(self)
    }

    /// Checks facet bookkeeping and the absence of hanging vertices.
    pub fn check_conformity(&self) -> Result<(), MeshError> {
        let topo = self.topology();
        if let Some(f) = topo.facets.iter().find(|f| f.over_shared) {
            return Err(MeshError::NonConforming(format!("facet {:?} shared by more than two cells", f.vertices)));
        }
        // Every marked boundary facet must be a facet of exactly one cell.
        let mut marked: HashMap<Vec<usize>, usize> = HashMap::new();
        for (f, _) in self.boundary_facets() {
            let mut key = f.to_vec();
            key.sort_unstable();
            *marked.entry(key).or_default() += 1;
        }
        for f in &topo.facets {
            let is_boundary = f.cells[1].is_none();
            match (is_boundary, marked.get(&f.vertices)) {
                (true, Some(1)) | (false, None) => {}
                (true, None) => {
                    // A one-sided facet that is not on the boundary list may be a
                    // genuine unmarked boundary piece; hanging vertices are caught below.
                }
                _ => {
                    return Err(MeshError::NonConforming(format!(
                        "facet {:?} has inconsistent boundary bookkeeping",
                        f.vertices
                    )))
                }
            }
        }
        if marked.len() != self.n_boundary_facets() {
            return Err(MeshError::NonConforming("duplicate boundary facets".into()));
        }
        for key in marked.keys() {
            if topo.facet_index(key).is_none() {
                return Err(MeshError::NonConforming(format!("boundary facet {key:?} is not a cell facet")));
            }
        }
        // A hanging vertex shows up inside a one-sided facet.
        let scale = self.quality().map(|q| q.h_min).unwrap_or(1.0);
        for f in topo.facets.iter().filter(|f| f.cells[1].is_none()) {
            let pts: Vec<&[f64]> = f.vertices.iter().map(|&v| self.vertex(v)).collect();
            for v in 0..self.n_vertices() {
                if f.vertices.contains(&v) {
                    continue;
                }
                if point_in_facet(self.vertex(v), &pts, 1e-10 * scale) {
                    return Err(MeshError::NonConforming(format!("vertex {v} hangs on facet {:?}", f.vertices)));
                }
            }
        }
        Ok(())
    }
}

fn point_in_facet(x: &[f64], pts: &[&[f64]], tol: f64) -> bool {
    let d = x.len();
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in pts {
        for i in 0..d {
            lo[i] = lo[i].min(p[i]);
            hi[i] = hi[i].max(p[i]);
        }
    }
    if (0..d).any(|i| x[i] < lo[i] - tol || x[i] > hi[i] + tol) {
        return false;
    }
    if d == 2 {
        let (a, b) = (pts[0], pts[1]);
        let ab = [b[0] - a[0], b[1] - a[1]];
        let ax = [x[0] - a[0], x[1] - a[1]];
        let cross = ab[0] * ax[1] - ab[1] * ax[0];
        let len = (ab[0] * ab[0] + ab[1] * ab[1]).sqrt();
        (cross / len).abs() <= tol
    } else {
        let a = [pts[0][0], pts[0][1], pts[0][2]];
        let b = sub3(&[pts[1][0], pts[1][1], pts[1][2]], &a);
        let c = sub3(&[pts[2][0], pts[2][1], pts[2][2]], &a);
        let n = cross3(&b, &c);
        let nn = dot3(&n, &n).sqrt();
        let ax = sub3(&[x[0], x[1], x[2]], &a);
        if (dot3(&ax, &n) / nn).abs() > tol {
            return false;
        }
        // barycentric test in the facet plane
        let area = |u: &[f64; 3], v: &[f64; 3]| dot3(&cross3(u, v), &n) / nn;
        let total = area(&b, &c);
        let l1 = area(&ax, &c) / total;
        let l2 = area(&b, &ax) / total;
        let t = tol / nn.sqrt();
        l1 >= -t && l2 >= -t && l1 + l2 <= 1.0 + t
    }
}

#[inline]
pub(crate) fn sub3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

#[inline]
pub(crate) fn dot3(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub(crate) fn cross3(a: &[f64; 3], b: &[f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}
