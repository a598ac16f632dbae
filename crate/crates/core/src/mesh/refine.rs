use std::collections::HashMap;

use super::Mesh;

struct Midpoints<'a> {
    coords: Vec<f64>,
    dim: usize,
    map: HashMap<(usize, usize), usize>,
    mesh: &'a Mesh,
}

impl Midpoints<'_> {
    fn get(&mut self, a: usize, b: usize) -> usize {
        let key = (a.min(b), a.max(b));
        if let Some(&v) = self.map.get(&key) {
            return v;
        }
        let id = self.coords.len() / self.dim;
        for i in 0..self.dim {
            self.coords.push(0.5 * (self.mesh.vertex(a)[i] + self.mesh.vertex(b)[i]));
        }
        self.map.insert(key, id);
        id
    }
}

/// Uniform red refinement: every triangle splits into four similar children
/// and every tetrahedron into eight (Bey's scheme). Boundary facets are
/// split consistently and keep their markers.
pub fn refine_uniform(mesh: &Mesh) -> Mesh {
    let dim = mesh.dim();
    let mut mids = Midpoints { coords: mesh.coords.clone(), dim, map: HashMap::new(), mesh };
    let mut cells = Vec::with_capacity(mesh.cells.len() * if dim == 2 { 4 } else { 8 });
    for cell in mesh.cells() {
        if dim == 2 {
            let (a, b, c) = (cell[0], cell[1], cell[2]);
            let ab = mids.get(a, b);
            let bc = mids.get(b, c);
            let ca = mids.get(c, a);
            cells.extend_from_slice(&[a, ab, ca, ab, b, bc, ca, bc, c, ab, bc, ca]);
        } else {
            let x = [cell[0], cell[1], cell[2], cell[3]];
            let m = |i: usize, j: usize, mids: &mut Midpoints| mids.get(x[i], x[j]);
            let x01 = m(0, 1, &mut mids);
            let x02 = m(0, 2, &mut mids);
            let x03 = m(0, 3, &mut mids);
            let x12 = m(1, 2, &mut mids);
            let x13 = m(1, 3, &mut mids);
            let x23 = m(2, 3, &mut mids);
            cells.extend_from_slice(&[
                x[0], x01, x02, x03, //
                x01, x[1], x12, x13, //
                x02, x12, x[2], x23, //
                x03, x13, x23, x[3], //
                x01, x02, x03, x13, //
                x01, x02, x12, x13, //
                x02, x03, x13, x23, //
                x02, x12, x13, x23,
            ]);
        }
    }
    let mut facets = Vec::new();
    let mut markers = Vec::new();
    for (f, marker) in mesh.boundary_facets() {
        if dim == 2 {
            let m = mids.get(f[0], f[1]);
            facets.extend_from_slice(&[f[0], m, m, f[1]]);
            markers.extend_from_slice(&[marker, marker]);
        } else {
            let (a, b, c) = (f[0], f[1], f[2]);
            let ab = mids.get(a, b);
            let bc = mids.get(b, c);
            let ca = mids.get(c, a);
            facets.extend_from_slice(&[a, ab, ca, ab, b, bc, ca, bc, c, ab, bc, ca]);
            markers.extend_from_slice(&[marker; 4]);
        }
    }
    let coords = mids.coords;
    Mesh::new(dim, coords, cells, Some((facets, markers)))
        .expect("red refinement of a valid mesh is valid")
        .with_level(mesh.level() + 1)
}

#[cfg(test)]
mod tests {
    use super::super::{unit_cube_mesh, unit_square_mesh};
    use super::*;

    #[test]
    fn refine_square_counts_and_similarity() {
        let m0 = unit_square_mesh(1);
        let m1 = refine_uniform(&m0);
        assert_eq!(m1.n_cells(), 16);
        assert_eq!(m1.level(), 1);
        let q0 = m0.quality().unwrap();
        let q1 = m1.quality().unwrap();
        assert_eq!(q1.h_max, q0.h_max / 2.0);
        assert!((q1.gamma - q0.gamma).abs() < 1e-12);
    }

    #[test]
    fn volume_and_conformity_preserved() {
        let mut m = unit_square_mesh(2);
        for _ in 0..3 {
            m = refine_uniform(&m);
            assert!((m.total_volume() - 1.0).abs() < 1e-12);
            m.check_conformity().unwrap();
            let t = m.topology();
            let interior = t.n_interior_facets();
            let incid: usize = t.facets.iter().map(|f| f.cells.iter().flatten().count()).sum();
            assert_eq!(incid - t.n_boundary_facets(), 2 * interior);
        }
    }

    #[test]
    fn refine_tetrahedra() {
        let m0 = unit_cube_mesh(1);
        let m1 = refine_uniform(&m0);
        assert_eq!(m1.n_cells(), 8 * m0.n_cells());
        assert!((m1.total_volume() - 1.0).abs() < 1e-14);
        assert_eq!(m1.n_boundary_facets(), 4 * m0.n_boundary_facets());
        m1.check_conformity().unwrap();
        assert_eq!(m1.quality().unwrap().h_max, m0.quality().unwrap().h_max / 2.0);
    }
}
