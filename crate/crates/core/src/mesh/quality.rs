use serde::Serialize;

use super::{cross3, sub3, Mesh, MeshError};

/// Mesh size and shape regularity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeshQuality {
    /// `max_K h_K`, the global mesh size `h`.
    pub h_max: f64,
    pub h_min: f64,
    /// `max_K h_K / rho_K` with `rho_K` the inscribed ball diameter.
    pub gamma: f64,
}

/// Largest edge length of a simplex given by its vertices.
pub fn cell_diameter(pts: &[[f64; 3]]) -> f64 {
    let mut h: f64 = 0.0;
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let e = sub3(&pts[i], &pts[j]);
            h = h.max((e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt());
        }
    }
    h
}

/// Diameter of the inscribed ball: `2 d |K| / sum of facet measures`.
pub fn cell_inradius_diameter(pts: &[[f64; 3]], volume: f64) -> f64 {
    let d = pts.len() - 1;
    let mut surface = 0.0;
    for skip in 0..=d {
        let f: Vec<&[f64; 3]> = (0..=d).filter(|&i| i != skip).map(|i| &pts[i]).collect();
        surface += if d == 2 {
            let e = sub3(f[1], f[0]);
            (e[0] * e[0] + e[1] * e[1] + e[2] * e[2]).sqrt()
        } else {
            let c = cross3(&sub3(f[1], f[0]), &sub3(f[2], f[0]));
            0.5 * (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt()
        };
    }
    2.0 * d as f64 * volume / surface
}

pub(super) fn quality(mesh: &Mesh) -> Result<MeshQuality, MeshError> {
    let mut q = MeshQuality { h_max: 0.0, h_min: f64::INFINITY, gamma: 0.0 };
    for k in 0..mesh.n_cells() {
        let vol = mesh.signed_volume(k);
        if !(vol > 0.0) {
            return Err(MeshError::DegenerateCell { cell: k, volume: vol });
        }
        let pts = mesh.cell_points(k);
        let h = cell_diameter(&pts);
        let rho = cell_inradius_diameter(&pts, vol);
        q.h_max = q.h_max.max(h);
        q.h_min = q.h_min.min(h);
        q.gamma = q.gamma.max(h / rho);
    }
    Ok(q)
}
