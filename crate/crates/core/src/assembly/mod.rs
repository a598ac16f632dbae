//! Weak forms of the time step assembled into sparse blocks.
//!
//! Element matrices are computed per cell in parallel and scattered into a
//! triplet list; duplicates are summed when the CSR matrix is built.

mod saddle;

pub use saddle::{apply_dirichlet, SaddleSolution, SaddleSystem};

use rayon::prelude::*;

use crate::fespace::{quadrature_for, FESpace, Tabulation};
use crate::linalg::SparseMatrix;
use crate::pstructure::{StressModel, SymTensor};

/// Quadrature degree for the nonlinear stress, convection and load terms.
pub const NONLINEAR_DEGREE: usize = 5;
/// Quadrature degree for polynomial forms (mass, divergence) and error norms.
pub const EXACT_DEGREE: usize = 7;
/// Floor for the shift used in Newton and Picard matrices when `delta = 0`.
pub const JACOBIAN_SHIFT_FLOOR: f64 = 1e-8;

type Triplets = Vec<(usize, usize, f64)>;

fn tabulate(space: &FESpace, degree: usize) -> Tabulation {
    space.tabulate(&quadrature_for(2, degree).expect("supported degree"))
}

fn par_cells<F>(n_cells: usize, f: F) -> Triplets
where
    F: Fn(usize, &mut Triplets) + Sync,
{
    (0..n_cells)
        .into_par_iter()
        .fold(Vec::new, |mut acc, k| {
            f(k, &mut acc);
            acc
        })
        .reduce(Vec::new, |mut a, mut b| {
            a.append(&mut b);
            a
        })
}

fn par_vector<F>(n: usize, n_cells: usize, f: F) -> Vec<f64>
where
    F: Fn(usize, &mut Vec<(usize, f64)>) + Sync,
{
    let parts: Vec<Vec<(usize, f64)>> = (0..n_cells)
        .into_par_iter()
        .fold(Vec::new, |mut acc, k| {
            f(k, &mut acc);
            acc
        })
        .collect();
    let mut out = vec![0.0; n];
    for part in parts {
        for (i, v) in part {
            out[i] += v;
        }
    }
    out
}

/// Scalar mass matrix copied onto every component block.
pub fn assemble_mass(space: &FESpace) -> SparseMatrix {
    let tab = tabulate(space, EXACT_DEGREE);
    let n = space.n_local();
    let ns = space.n_scalar();
    let trip = par_cells(space.n_cells(), |k, out| {
        let dofs = space.cell_dofs(k);
        let area = space.geometry(k).area;
        let mut local = [[0.0; 6]; 6];
        for q in 0..tab.n_points() {
            let w = tab.weight(q, area);
            let v = tab.values(q);
            for i in 0..n {
                for j in 0..n {
                    local[i][j] += w * (v[i] * v[j]);
                }
            }
        }
        for c in 0..space.components() {
            for i in 0..n {
                for j in 0..n {
                    out.push((c * ns + dofs[i], c * ns + dofs[j], local[i][j]));
                }
            }
        }
    });
    SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), trip)
}

/// `int grad u : grad v` on every component.
pub fn assemble_laplacian(space: &FESpace) -> SparseMatrix {
    let tab = tabulate(space, EXACT_DEGREE);
    let n = space.n_local();
    let ns = space.n_scalar();
    let trip = par_cells(space.n_cells(), |k, out| {
        let dofs = space.cell_dofs(k);
        let geo = space.geometry(k);
        let mut g = [[0.0; 2]; 6];
        let mut local = [[0.0; 6]; 6];
        for q in 0..tab.n_points() {
            let w = tab.weight(q, geo.area);
            tab.gradients(q, geo, &mut g);
            for i in 0..n {
                for j in 0..n {
                    local[i][j] += w * (g[i][0] * g[j][0] + g[i][1] * g[j][1]);
                }
            }
        }
        for c in 0..space.components() {
            for i in 0..n {
                for j in 0..n {
                    out.push((c * ns + dofs[i], c * ns + dofs[j], local[i][j]));
                }
            }
        }
    });
    SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), trip)
}

/// Which matrix accompanies the stress residual.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StressMatrix {
    None,
    /// Derivative of the residual, with the given shift in place of `delta`.
    Newton { shift: f64 },
    /// Frozen secant viscosity `(shift + |Du|)^(p-2)` times `(Du, Dv)`.
    Picard { shift: f64 },
}

impl StressMatrix {
    pub fn newton(model: &StressModel) -> Self {
        StressMatrix::Newton { shift: model.delta().max(JACOBIAN_SHIFT_FLOOR) }
    }

    pub fn picard(model: &StressModel) -> Self {
        StressMatrix::Picard { shift: model.delta().max(JACOBIAN_SHIFT_FLOOR) }
    }
}

/// Symmetric gradient of a vector field from local coefficients and basis gradients.
#[inline]
fn sym_grad(loc: &[[f64; 6]; 2], g: &[[f64; 2]], n: usize) -> SymTensor {
    let mut grad = [[0.0; 2]; 2];
    for i in 0..n {
        for c in 0..2 {
            grad[c][0] += loc[c][i] * g[i][0];
            grad[c][1] += loc[c][i] * g[i][1];
        }
    }
    SymTensor::sym_part2(&grad)
}

fn local_coeffs(space: &FESpace, u: &[f64], k: usize) -> [[f64; 6]; 2] {
    let ns = space.n_scalar();
    let mut loc = [[0.0; 6]; 2];
    for (i, &d) in space.cell_dofs(k).iter().enumerate() {
        loc[0][i] = u[d];
        loc[1][i] = u[ns + d];
    }
    loc
}

/// Stress residual `r_i = int S(Du) : D phi_i` and, optionally, a matrix.
pub fn assemble_stress(
    space: &FESpace,
    u: &[f64],
    model: &StressModel,
    matrix: StressMatrix,
) -> (Vec<f64>, Option<SparseMatrix>) {
    assert_eq!(space.components(), 2);
    let tab = tabulate(space, NONLINEAR_DEGREE);
    let n = space.n_local();
    let ns = space.n_scalar();
    let nd = space.n_dofs();
    let parts: Vec<(Vec<(usize, f64)>, Triplets)> = (0..space.n_cells())
        .into_par_iter()
        .fold(
            || (Vec::new(), Vec::new()),
            |(mut rv, mut tv), k| {
                let dofs = space.cell_dofs(k);
                let geo = space.geometry(k);
                let loc = local_coeffs(space, u, k);
                let mut g = [[0.0; 2]; 6];
                let mut res = [[0.0; 6]; 2];
                let mut mat = [[[[0.0; 6]; 2]; 6]; 2];
                for q in 0..tab.n_points() {
                    let w = tab.weight(q, geo.area);
                    tab.gradients(q, geo, &mut g);
                    let du = sym_grad(&loc, &g, n);
                    let s = model.stress(&du);
                    for i in 0..n {
                        for c in 0..2 {
                            res[c][i] += w * (s.get(c, 0) * g[i][0] + s.get(c, 1) * g[i][1]);
                        }
                    }
                    let (scale, rank_one) = match matrix {
                        StressMatrix::None => continue,
                        StressMatrix::Newton { shift } => {
                            let j = model.jacobian_with_shift(&du, shift);
                            (j.scale, j.rank_one)
                        }
                        StressMatrix::Picard { shift } => (model.secant_viscosity(&du, shift), 0.0),
                    };
                    // Row c of P applied to a gradient.
                    let pg = |c: usize, gi: &[f64; 2]| du.get(c, 0) * gi[0] + du.get(c, 1) * gi[1];
                    for i in 0..n {
                        for j in 0..n {
                            let gij = g[i][0] * g[j][0] + g[i][1] * g[j][1];
                            for c in 0..2 {
                                for d in 0..2 {
                                    let mut v = 0.5 * scale * (g[j][c] * g[i][d]);
                                    if c == d {
                                        v += 0.5 * scale * gij;
                                    }
                                    if rank_one != 0.0 {
                                        v += rank_one * (pg(d, &g[j]) * pg(c, &g[i]));
                                    }
                                    mat[c][i][d][j] += w * v;
                                }
                            }
                        }
                    }
                }
                for c in 0..2 {
                    for i in 0..n {
                        rv.push((c * ns + dofs[i], res[c][i]));
                        if matrix != StressMatrix::None {
                            for d in 0..2 {
                                for j in 0..n {
                                    tv.push((c * ns + dofs[i], d * ns + dofs[j], mat[c][i][d][j]));
                                }
                            }
                        }
                    }
                }
                (rv, tv)
            },
        )
        .collect();
    let mut residual = vec![0.0; nd];
    let mut trip = Vec::new();
    for (rv, mut tv) in parts {
        for (i, v) in rv {
            residual[i] += v;
        }
        trip.append(&mut tv);
    }
    let mat = (matrix != StressMatrix::None).then(|| SparseMatrix::from_triplets(nd, nd, trip));
    (residual, mat)
}

/// Skew convection `N_ij = 1/2 [([grad phi_j] w, phi_i) - ([grad phi_i] w, phi_j)]`
/// with frozen advection field `w`.
pub fn assemble_convection(space: &FESpace, w: &[f64]) -> SparseMatrix {
    assert_eq!(space.components(), 2);
    let tab = tabulate(space, NONLINEAR_DEGREE);
    let n = space.n_local();
    let ns = space.n_scalar();
    let trip = par_cells(space.n_cells(), |k, out| {
        let dofs = space.cell_dofs(k);
        let geo = space.geometry(k);
        let loc = local_coeffs(space, w, k);
        let mut g = [[0.0; 2]; 6];
        let mut l = [[0.0; 6]; 6];
        for q in 0..tab.n_points() {
            let wq = tab.weight(q, geo.area);
            let v = tab.values(q);
            tab.gradients(q, geo, &mut g);
            let wx: f64 = (0..n).map(|i| loc[0][i] * v[i]).sum();
            let wy: f64 = (0..n).map(|i| loc[1][i] * v[i]).sum();
            for i in 0..n {
                for j in 0..n {
                    l[i][j] += wq * (wx * g[j][0] + wy * g[j][1]) * v[i];
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                let s = 0.5 * (l[i][j] - l[j][i]);
                if s != 0.0 {
                    for c in 0..2 {
                        out.push((c * ns + dofs[i], c * ns + dofs[j], s));
                    }
                }
            }
        }
    });
    SparseMatrix::from_triplets(space.n_dofs(), space.n_dofs(), trip)
}

/// `B_{k, j} = int eta_k div phi_j`, pressure rows by velocity columns.
pub fn assemble_divergence(v_space: &FESpace, q_space: &FESpace) -> SparseMatrix {
    assert_eq!(v_space.components(), 2);
    assert!(std::sync::Arc::ptr_eq(v_space.mesh(), q_space.mesh()) || v_space.n_cells() == q_space.n_cells());
    let rule = quadrature_for(2, EXACT_DEGREE).expect("supported degree");
    let vt = v_space.tabulate(&rule);
    let qt = q_space.tabulate(&rule);
    let (nv, nq) = (v_space.n_local(), q_space.n_local());
    let ns = v_space.n_scalar();
    let trip = par_cells(v_space.n_cells(), |k, out| {
        let vd = v_space.cell_dofs(k);
        let qd = q_space.cell_dofs(k);
        let geo = v_space.geometry(k);
        let mut g = [[0.0; 2]; 6];
        let mut local = [[[0.0; 6]; 2]; 6];
        for q in 0..rule.len() {
            let w = vt.weight(q, geo.area);
            vt.gradients(q, geo, &mut g);
            let eta = qt.values(q);
            for a in 0..nq {
                for j in 0..nv {
                    for c in 0..2 {
                        local[a][c][j] += w * eta[a] * g[j][c];
                    }
                }
            }
        }
        for a in 0..nq {
            for c in 0..2 {
                for j in 0..nv {
                    out.push((qd[a], c * ns + vd[j], local[a][c][j]));
                }
            }
        }
    });
    SparseMatrix::from_triplets(q_space.n_dofs(), v_space.n_dofs(), trip)
}

/// `m_k = int eta_k`.
pub fn assemble_mean(q_space: &FESpace) -> Vec<f64> {
    let tab = tabulate(q_space, EXACT_DEGREE);
    par_vector(q_space.n_dofs(), q_space.n_cells(), |k, out| {
        let area = q_space.geometry(k).area;
        for (i, &d) in q_space.cell_dofs(k).iter().enumerate() {
            let s: f64 = (0..tab.n_points()).map(|q| tab.weight(q, area) * tab.values(q)[i]).sum();
            out.push((d, s));
        }
    })
}

/// Load vector `(f, phi_i)` with the given quadrature degree.
pub fn assemble_rhs_with(space: &FESpace, degree: usize, f: impl Fn(&[f64; 2]) -> [f64; 2] + Sync) -> Vec<f64> {
    let tab = tabulate(space, degree);
    let ns = space.n_scalar();
    let nc = space.components();
    par_vector(space.n_dofs(), space.n_cells(), |k, out| {
        let geo = space.geometry(k);
        let dofs = space.cell_dofs(k);
        for q in 0..tab.n_points() {
            let w = tab.weight(q, geo.area);
            let fx = f(&geo.point(&tab.points[q]));
            for (i, &phi) in tab.values(q).iter().enumerate() {
                for c in 0..nc {
                    out.push((c * ns + dofs[i], w * fx[c] * phi));
                }
            }
        }
    })
}

/// Load vector `(f, phi_i)` with the degree-5 rule.
pub fn assemble_rhs(space: &FESpace, f: impl Fn(&[f64; 2]) -> [f64; 2] + Sync) -> Vec<f64> {
    assemble_rhs_with(space, NONLINEAR_DEGREE, f)
}

#[cfg(test)]
mod tests;
