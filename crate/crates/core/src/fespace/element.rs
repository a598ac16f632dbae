use serde::{Deserialize, Serialize};

/// Local shape function families on triangles.
///
/// Local dof order: vertices, then edges `(0,1), (0,2), (1,2)` for `P2`, then
/// the cell bubble for `P1Bubble`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementKind {
    P0,
    P1,
    P1Bubble,
    P2,
}

const EDGES: [(usize, usize); 3] = [(0, 1), (0, 2), (1, 2)];

impl ElementKind {
    pub fn n_local(self) -> usize {
        match self {
            ElementKind::P0 => 1,
            ElementKind::P1 => 3,
            ElementKind::P1Bubble => 4,
            ElementKind::P2 => 6,
        }
    }

    /// Polynomial degree of the local space.
    pub fn degree(self) -> usize {
        match self {
            ElementKind::P0 => 0,
            ElementKind::P1 => 1,
            ElementKind::P1Bubble => 3,
            ElementKind::P2 => 2,
        }
    }

    /// Degree up to which nodal interpolation reproduces polynomials.
    pub fn reproduction_degree(self) -> usize {
        match self {
            ElementKind::P0 => 0,
            ElementKind::P1 | ElementKind::P1Bubble => 1,
            ElementKind::P2 => 2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ElementKind::P0 => "P0",
            ElementKind::P1 => "P1",
            ElementKind::P1Bubble => "P1+bubble",
            ElementKind::P2 => "P2",
        }
    }

    /// Shape function values at barycentric point `l`.
    pub fn values(self, l: &[f64; 4], out: &mut [f64]) {
        match self {
            ElementKind::P0 => out[0] = 1.0,
            ElementKind::P1 => out[..3].copy_from_slice(&l[..3]),
            ElementKind::P1Bubble => {
                out[..3].copy_from_slice(&l[..3]);
                out[3] = 27.0 * l[0] * l[1] * l[2];
            }
            ElementKind::P2 => {
                for i in 0..3 {
                    out[i] = l[i] * (2.0 * l[i] - 1.0);
                }
                for (e, &(a, b)) in EDGES.iter().enumerate() {
                    out[3 + e] = 4.0 * l[a] * l[b];
                }
            }
        }
    }

    /// Derivatives of each shape function with respect to the three
    /// barycentric coordinates.
    pub fn bary_gradients(self, l: &[f64; 4], out: &mut [[f64; 3]]) {
        match self {
            ElementKind::P0 => out[0] = [0.0; 3],
            ElementKind::P1 | ElementKind::P1Bubble => {
                out[0] = [1.0, 0.0, 0.0];
                out[1] = [0.0, 1.0, 0.0];
                out[2] = [0.0, 0.0, 1.0];
                if self == ElementKind::P1Bubble {
                    out[3] = [27.0 * l[1] * l[2], 27.0 * l[0] * l[2], 27.0 * l[0] * l[1]];
                }
            }
            ElementKind::P2 => {
                for i in 0..3 {
                    out[i] = [0.0; 3];
                    out[i][i] = 4.0 * l[i] - 1.0;
                }
                for (e, &(a, b)) in EDGES.iter().enumerate() {
                    let mut g = [0.0; 3];
                    g[a] = 4.0 * l[b];
                    g[b] = 4.0 * l[a];
                    out[3 + e] = g;
                }
            }
        }
    }
}

/// Affine geometry of one triangle.
#[derive(Debug, Clone, Copy)]
pub struct CellGeometry {
    pub vertices: [[f64; 2]; 3],
    pub area: f64,
    /// Cartesian gradients of the barycentric coordinates.
    pub grad_lambda: [[f64; 2]; 3],
}

impl CellGeometry {
    pub fn new(vertices: [[f64; 2]; 3]) -> Self {
        let [a, b, c] = vertices;
        let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
        let g1 = [(c[1] - a[1]) / det, -(c[0] - a[0]) / det];
        let g2 = [-(b[1] - a[1]) / det, (b[0] - a[0]) / det];
        let g0 = [-g1[0] - g2[0], -g1[1] - g2[1]];
        CellGeometry { vertices, area: 0.5 * det.abs(), grad_lambda: [g0, g1, g2] }
    }

    pub fn point(&self, l: &[f64; 4]) -> [f64; 2] {
        let v = &self.vertices;
        [
            l[0] * v[0][0] + l[1] * v[1][0] + l[2] * v[2][0],
            l[0] * v[0][1] + l[1] * v[1][1] + l[2] * v[2][1],
        ]
    }

    pub fn barycentric(&self, x: &[f64; 2]) -> [f64; 4] {
        let a = self.vertices[0];
        let d = [x[0] - a[0], x[1] - a[1]];
        let g = &self.grad_lambda;
        let l1 = g[1][0] * d[0] + g[1][1] * d[1];
        let l2 = g[2][0] * d[0] + g[2][1] * d[1];
        [1.0 - l1 - l2, l1, l2, 0.0]
    }

    /// Cartesian gradient from barycentric derivatives.
    #[inline]
    pub fn cartesian(&self, db: &[f64; 3]) -> [f64; 2] {
        let g = &self.grad_lambda;
        [
            db[0] * g[0][0] + db[1] * g[1][0] + db[2] * g[2][0],
            db[0] * g[0][1] + db[1] * g[1][1] + db[2] * g[2][1],
        ]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const KINDS: [ElementKind; 4] = [ElementKind::P0, ElementKind::P1, ElementKind::P1Bubble, ElementKind::P2];

    #[test]
    fn nodal_partition_of_unity() {
        let l = [0.2, 0.5, 0.3, 0.0];
        for kind in [ElementKind::P0, ElementKind::P1, ElementKind::P2] {
            let mut v = vec![0.0; kind.n_local()];
            kind.values(&l, &mut v);
            assert!((v.iter().sum::<f64>() - 1.0).abs() < 1e-15, "{kind:?}");
        }
    }

    #[test]
    fn bubble_vanishes_on_boundary_and_peaks_at_centroid() {
        let mut v = [0.0; 4];
        ElementKind::P1Bubble.values(&[0.0, 0.4, 0.6, 0.0], &mut v);
        assert_eq!(v[3], 0.0);
        let t = 1.0 / 3.0;
        ElementKind::P1Bubble.values(&[t, t, t, 0.0], &mut v);
        assert!((v[3] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn p2_nodal_property() {
        let nodes = [
            [1.0, 0.0, 0.0, 0.0],
            [0.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 0.0],
            [0.5, 0.5, 0.0, 0.0],
            [0.5, 0.0, 0.5, 0.0],
            [0.0, 0.5, 0.5, 0.0],
        ];
        let mut v = [0.0; 6];
        for (i, n) in nodes.iter().enumerate() {
            ElementKind::P2.values(n, &mut v);
            for (j, &vj) in v.iter().enumerate() {
                assert_eq!(vj, if i == j { 1.0 } else { 0.0 });
            }
        }
    }

    #[test]
    fn gradients_match_differences() {
        let l = [0.25, 0.35, 0.4, 0.0];
        let eps = 1e-7;
        for kind in KINDS {
            let n = kind.n_local();
            let mut g = vec![[0.0; 3]; n];
            kind.bary_gradients(&l, &mut g);
            for k in 0..3 {
                let (mut lp, mut lm) = (l, l);
                lp[k] += eps;
                lm[k] -= eps;
                let (mut vp, mut vm) = (vec![0.0; n], vec![0.0; n]);
                kind.values(&lp, &mut vp);
                kind.values(&lm, &mut vm);
                for i in 0..n {
                    assert!(((vp[i] - vm[i]) / (2.0 * eps) - g[i][k]).abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn geometry_roundtrip() {
        let c = CellGeometry::new([[0.1, 0.2], [1.0, 0.3], [0.4, 1.1]]);
        let l = [0.2, 0.3, 0.5, 0.0];
        let back = c.barycentric(&c.point(&l));
        for i in 0..3 {
            assert!((back[i] - l[i]).abs() < 1e-14);
        }
        let s: [f64; 2] = (0..3).fold([0.0, 0.0], |acc, i| [acc[0] + c.grad_lambda[i][0], acc[1] + c.grad_lambda[i][1]]);
        assert!(s[0].abs() < 1e-14 && s[1].abs() < 1e-14);
    }
}
