use std::collections::HashMap;
use std::sync::Arc;

use super::element::{CellGeometry, ElementKind};
use super::quadrature::QuadratureRule;
use super::FeError;
use crate::mesh::{Edges, Mesh, DIRICHLET};

/// A continuous (or, for `P0`, piecewise constant) finite element space with
/// `components` copies of one scalar element.
///
/// Global dofs are component-major: dof `c * n_scalar + s` is scalar dof `s`
/// of component `c`.
#[derive(Debug, Clone)]
pub struct FESpace {
    mesh: Arc<Mesh>,
    kind: ElementKind,
    components: usize,
    n_scalar: usize,
    cell_dofs: Vec<usize>,
    boundary: Vec<usize>,
    nodes: Vec<[f64; 2]>,
    geometry: Vec<CellGeometry>,
}

impl FESpace {
    pub fn new(mesh: Arc<Mesh>, kind: ElementKind, components: usize) -> Result<Self, FeError> {
        if mesh.dim() != 2 {
            return Err(FeError::UnsupportedElement { kind, dim: mesh.dim() });
        }
        assert!(components == 1 || components == 2);
        let nv = mesh.n_vertices();
        let nc = mesh.n_cells();
        let nl = kind.n_local();
        let geometry: Vec<CellGeometry> = (0..nc)
            .map(|k| {
                let c = mesh.cell(k);
                let v = |i: usize| [mesh.vertex(c[i])[0], mesh.vertex(c[i])[1]];
                CellGeometry::new([v(0), v(1), v(2)])
            })
            .collect();
        let centroid = |k: usize| geometry[k].point(&[1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0]);
        let mut nodes: Vec<[f64; 2]> = Vec::new();
        let mut cell_dofs = Vec::with_capacity(nc * nl);
        let mut boundary = Vec::new();
        let on_dirichlet = mesh.marked_vertices(DIRICHLET);
        let vertex_nodes = || (0..nv).map(|v| [mesh.vertex(v)[0], mesh.vertex(v)[1]]);
        match kind {
            ElementKind::P0 => {
                nodes.extend((0..nc).map(centroid));
                cell_dofs.extend(0..nc);
            }
            ElementKind::P1 | ElementKind::P1Bubble => {
                nodes.extend(vertex_nodes());
                for (k, c) in mesh.cells().enumerate() {
                    cell_dofs.extend_from_slice(c);
                    if kind == ElementKind::P1Bubble {
                        cell_dofs.push(nv + k);
                    }
                }
                if kind == ElementKind::P1Bubble {
                    nodes.extend((0..nc).map(centroid));
                }
                boundary.extend((0..nv).filter(|&v| on_dirichlet[v]));
            }
            ElementKind::P2 => {
                let edges = Edges::build(&mesh);
                nodes.extend(vertex_nodes());
                for [a, b] in &edges.edges {
                    let (pa, pb) = (mesh.vertex(*a), mesh.vertex(*b));
                    nodes.push([0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]);
                }
                for (k, c) in mesh.cells().enumerate() {
                    cell_dofs.extend_from_slice(c);
                    cell_dofs.extend(edges.cell_edges[k].iter().map(|e| nv + e));
                }
                let index: HashMap<[usize; 2], usize> =
                    edges.edges.iter().enumerate().map(|(i, e)| (*e, i)).collect();
                boundary.extend((0..nv).filter(|&v| on_dirichlet[v]));
                for (f, marker) in mesh.boundary_facets() {
                    if marker == DIRICHLET {
                        boundary.push(nv + index[&[f[0].min(f[1]), f[0].max(f[1])]]);
                    }
                }
                boundary.sort_unstable();
                boundary.dedup();
            }
        }
        Ok(FESpace { n_scalar: nodes.len(), mesh, kind, components, cell_dofs, boundary, nodes, geometry })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn kind(&self) -> ElementKind {
        self.kind
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Dofs of one scalar component.
    pub fn n_scalar(&self) -> usize {
        self.n_scalar
    }

    pub fn n_dofs(&self) -> usize {
        self.components * self.n_scalar
    }

    pub fn n_cells(&self) -> usize {
        self.geometry.len()
    }

    pub fn n_local(&self) -> usize {
        self.kind.n_local()
    }

    /// Scalar dofs of cell `k` in local order.
    pub fn cell_dofs(&self, k: usize) -> &[usize] {
        let n = self.kind.n_local();
        &self.cell_dofs[k * n..(k + 1) * n]
    }

    pub fn geometry(&self, k: usize) -> &CellGeometry {
        &self.geometry[k]
    }

    /// Nodal point of scalar dof `s` (cell centroid for bubbles and `P0`).
    pub fn node(&self, s: usize) -> [f64; 2] {
        self.nodes[s]
    }

    /// Scalar dofs on Dirichlet facets.
    pub fn scalar_boundary_dofs(&self) -> &[usize] {
        &self.boundary
    }

    /// Global boundary dofs of every component, sorted.
    pub fn boundary_dofs(&self) -> Vec<usize> {
        (0..self.components).flat_map(|c| self.boundary.iter().map(move |s| c * self.n_scalar + s)).collect()
    }

    pub fn boundary_mask(&self) -> Vec<bool> {
        let mut m = vec![false; self.n_dofs()];
        for d in self.boundary_dofs() {
            m[d] = true;
        }
        m
    }

    pub fn tabulate(&self, rule: &QuadratureRule) -> Tabulation {
        let n = self.kind.n_local();
        let mut values = vec![0.0; rule.len() * n];
        let mut bary = vec![[0.0; 3]; rule.len() * n];
        for (q, l) in rule.points.iter().enumerate() {
            self.kind.values(l, &mut values[q * n..(q + 1) * n]);
            self.kind.bary_gradients(l, &mut bary[q * n..(q + 1) * n]);
        }
        Tabulation { n_local: n, values, bary, weights: rule.weights.clone(), points: rule.points.clone() }
    }
}

/// Shape function values and barycentric derivatives at the points of one rule.
#[derive(Debug, Clone)]
pub struct Tabulation {
    pub n_local: usize,
    values: Vec<f64>,
    bary: Vec<[f64; 3]>,
    pub weights: Vec<f64>,
    pub points: Vec<[f64; 4]>,
}

impl Tabulation {
    pub fn n_points(&self) -> usize {
        self.weights.len()
    }

    #[inline]
    pub fn values(&self, q: usize) -> &[f64] {
        &self.values[q * self.n_local..(q + 1) * self.n_local]
    }

    /// Cartesian gradients at point `q` on the given cell.
    pub fn gradients(&self, q: usize, geo: &CellGeometry, out: &mut [[f64; 2]]) {
        for (i, db) in self.bary[q * self.n_local..(q + 1) * self.n_local].iter().enumerate() {
            out[i] = geo.cartesian(db);
        }
    }

    /// Physical weight at point `q` on a cell of the given area.
    #[inline]
    pub fn weight(&self, q: usize, area: f64) -> f64 {
        2.0 * area * self.weights[q]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::unit_square_mesh;

    fn space(n: usize, kind: ElementKind) -> FESpace {
        FESpace::new(Arc::new(unit_square_mesh(n)), kind, 1).unwrap()
    }

    #[test]
    fn dof_counts_on_single_square() {
        assert_eq!(space(1, ElementKind::P1).n_dofs(), 5);
        assert_eq!(space(1, ElementKind::P1Bubble).n_dofs(), 9);
        assert_eq!(space(1, ElementKind::P2).n_dofs(), 13);
        assert_eq!(space(1, ElementKind::P0).n_dofs(), 4);
        let v = FESpace::new(Arc::new(unit_square_mesh(1)), ElementKind::P1Bubble, 2).unwrap();
        assert_eq!(v.n_dofs(), 18);
    }

    #[test]
    fn boundary_dofs_lie_on_boundary() {
        for kind in [ElementKind::P1, ElementKind::P1Bubble, ElementKind::P2] {
            let s = space(3, kind);
            let on_bdry = |x: [f64; 2]| x.iter().any(|c| c.abs() < 1e-14 || (c - 1.0).abs() < 1e-14);
            let expected: Vec<usize> = (0..s.n_scalar()).filter(|&d| on_bdry(s.node(d))).collect();
            let expected: Vec<usize> = match kind {
                // Bubble nodes sit at centroids and are never on the boundary.
                ElementKind::P1Bubble => expected.into_iter().filter(|&d| d < s.mesh().n_vertices()).collect(),
                _ => expected,
            };
            assert_eq!(s.scalar_boundary_dofs(), &expected[..], "{kind:?}");
        }
    }

    #[test]
    fn shared_edges_get_same_dof() {
        let s = space(2, ElementKind::P2);
        let mesh = s.mesh().clone();
        let mut seen: HashMap<[u64; 2], usize> = HashMap::new();
        for k in 0..mesh.n_cells() {
            let c = mesh.cell(k);
            for (loc, &(a, b)) in [(0usize, 1usize), (0, 2), (1, 2)].iter().enumerate() {
                let (pa, pb) = (mesh.vertex(c[a]), mesh.vertex(c[b]));
                let key = [((pa[0] + pb[0]) * 1e6).round() as u64, ((pa[1] + pb[1]) * 1e6).round() as u64];
                let dof = s.cell_dofs(k)[3 + loc];
                assert_eq!(*seen.entry(key).or_insert(dof), dof);
            }
        }
    }

    #[test]
    fn rejects_three_dimensional_mesh() {
        let m = Arc::new(crate::mesh::unit_cube_mesh(1));
        assert!(matches!(FESpace::new(m, ElementKind::P1, 1), Err(FeError::UnsupportedElement { dim: 3, .. })));
    }
}
