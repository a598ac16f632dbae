use std::collections::HashMap;

use super::Mesh;

/// A facet (edge in 2D, triangle in 3D) with its sorted vertices and the
/// cells containing it.
#[derive(Debug, Clone, PartialEq)]
pub struct Facet {
    pub vertices: Vec<usize>,
    pub cells: [Option<usize>; 2],
    /// Set when more than two cells claim the facet.
    pub over_shared: bool,
}

#[derive(Debug, Clone)]
pub struct Topology {
    pub facets: Vec<Facet>,
    /// `cell_facets[k][i]` is the facet of cell `k` opposite local vertex `i`.
    pub cell_facets: Vec<Vec<usize>>,
    index: HashMap<Vec<usize>, usize>,
}

impl Topology {
    pub fn build(mesh: &Mesh) -> Self {
        let d = mesh.dim();
        let mut facets: Vec<Facet> = Vec::new();
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut cell_facets = Vec::with_capacity(mesh.n_cells());
        for (k, cell) in mesh.cells().enumerate() {
            let mut local = Vec::with_capacity(d + 1);
            for skip in 0..=d {
                let mut key: Vec<usize> = (0..=d).filter(|&i| i != skip).map(|i| cell[i]).collect();
                key.sort_unstable();
                let id = match index.get(&key) {
                    Some(&id) => {
                        let f = &mut facets[id];
                        if f.cells[1].is_none() {
                            f.cells[1] = Some(k);
                        } else {
                            f.over_shared = true;
                        }
                        id
                    }
                    None => {
                        let id = facets.len();
                        facets.push(Facet { vertices: key.clone(), cells: [Some(k), None], over_shared: false });
                        index.insert(key, id);
                        id
                    }
                };
                local.push(id);
            }
            cell_facets.push(local);
        }
        Topology { facets, cell_facets, index }
    }

    pub fn facet_index(&self, sorted_vertices: &[usize]) -> Option<usize> {
        self.index.get(sorted_vertices).copied()
    }

    pub fn n_interior_facets(&self) -> usize {
        self.facets.iter().filter(|f| f.cells[1].is_some()).count()
    }

    pub fn n_boundary_facets(&self) -> usize {
        self.facets.iter().filter(|f| f.cells[1].is_none()).count()
    }
}

/// Mesh edges with a per-cell lookup.
///
/// Local edges of a cell are the vertex pairs `(i, j)`, `i < j`, in
/// lexicographic order: `(0,1), (0,2), (1,2)` for triangles and
/// `(0,1), (0,2), (0,3), (1,2), (1,3), (2,3)` for tetrahedra.
#[derive(Debug, Clone)]
pub struct Edges {
    pub edges: Vec<[usize; 2]>,
    pub cell_edges: Vec<Vec<usize>>,
}

impl Edges {
    pub fn local_pairs(dim: usize) -> &'static [(usize, usize)] {
        match dim {
            2 => &[(0, 1), (0, 2), (1, 2)],
            _ => &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)],
        }
    }

    pub fn build(mesh: &Mesh) -> Self {
        let mut edges = Vec::new();
        let mut index: HashMap<[usize; 2], usize> = HashMap::new();
        let pairs = Self::local_pairs(mesh.dim());
        let cell_edges = mesh
            .cells()
            .map(|cell| {
                pairs
                    .iter()
                    .map(|&(i, j)| {
                        let (a, b) = (cell[i].min(cell[j]), cell[i].max(cell[j]));
                        *index.entry([a, b]).or_insert_with(|| {
                            edges.push([a, b]);
                            edges.len() - 1
                        })
                    })
                    .collect()
            })
            .collect();
        Edges { edges, cell_edges }
    }
}

#[cfg(test)]
mod tests {
    use super::super::unit_square_mesh;
    use super::*;

    #[test]
    fn facet_incidence_bookkeeping() {
        for n in 1..5 {
            let m = unit_square_mesh(n);
            let t = m.topology();
            let interior_incidences: usize = t.facets.iter().filter(|f| f.cells[1].is_some()).count() * 2;
            let total_incidences = 3 * m.n_cells();
            assert_eq!(total_incidences - t.n_boundary_facets(), interior_incidences);
            assert_eq!(t.n_boundary_facets(), 4 * n);
            assert_eq!(m.n_boundary_facets(), 4 * n);
        }
    }

    #[test]
    fn edge_count_of_single_square() {
        let m = unit_square_mesh(1);
        assert_eq!(Edges::build(&m).edges.len(), 8);
    }
}
