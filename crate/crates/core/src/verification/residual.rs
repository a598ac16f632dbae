use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::fespace::{FESpace, QuadratureRule};
use crate::pstructure::{StressModel, SymTensor};

use super::{forcing_from, ManufacturedSolution};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakResidualReport {
    pub t: f64,
    pub samples: usize,
    /// `max_v |R(v)|` over the random test fields.
    pub max_abs: f64,
    /// Largest entry of the residual vector against single basis functions.
    pub max_basis: f64,
}

/// Residual vector `r_i = R(psi_i)` of the weak momentum equation with the
/// exact `(u, q, f)` inserted, integrated with `rule` on every cell.
pub(crate) fn residual_vector(
    space: &FESpace,
    ms: &ManufacturedSolution,
    model: &StressModel,
    t: f64,
    rule: &QuadratureRule,
) -> Vec<f64> {
    let forcing = forcing_from(ms, model);
    let tab = space.tabulate(rule);
    let nl = space.n_local();
    let ns = space.n_scalar();
    let mut r = vec![0.0; space.n_dofs()];
    let mut grads = vec![[0.0; 2]; nl];
    for k in 0..space.n_cells() {
        let geo = space.geometry(k);
        let dofs = space.cell_dofs(k);
        for q in 0..tab.n_points() {
            let l = &tab.points[q];
            let x = geo.point(l);
            let w = tab.weight(q, geo.area);
            let vals = tab.values(q);
            tab.gradients(q, geo, &mut grads);
            let dt = ms.velocity_dt(t, &x);
            let u = ms.velocity(t, &x);
            let gu = ms.velocity_gradient(t, &x);
            let s = model.stress(&SymTensor::sym_part2(&gu));
            let p = ms.pressure(t, &x);
            let f = forcing.eval(t, &x);
            for i in 0..nl {
                for c in 0..2 {
                    let conv = gu[c][0] * u[0] + gu[c][1] * u[1];
                    // S : D(psi e_c) = sum_j S_cj d_j psi since S is symmetric.
                    let sd = s.get(c, 0) * grads[i][0] + s.get(c, 1) * grads[i][1];
                    let val = (dt[c] + conv - f[c]) * vals[i] + sd - p * grads[i][c];
                    r[c * ns + dofs[i]] += w * val;
                }
            }
        }
    }
    for d in space.boundary_dofs() {
        r[d] = 0.0;
    }
    r
}

/// Evaluates the weak residual of the manufactured triple against `samples`
/// random discrete test fields with coefficients uniform in `[-1, 1]`.
pub fn weak_residual_gate(
    space: &FESpace,
    ms: &ManufacturedSolution,
    model: &StressModel,
    t: f64,
    rule: &QuadratureRule,
    samples: usize,
    seed: u64,
) -> WeakResidualReport {
    let r = residual_vector(space, ms, model, t, rule);
    let mask = space.boundary_mask();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_abs: f64 = 0.0;
    for _ in 0..samples {
        let mut s = 0.0;
        for (i, ri) in r.iter().enumerate() {
            let v: f64 = rng.gen_range(-1.0..=1.0);
            if !mask[i] {
                s += ri * v;
            }
        }
        max_abs = max_abs.max(s.abs());
    }
    let max_basis = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    WeakResidualReport { t, samples, max_abs, max_basis }
}

/// Subdivision levels of the composite rule used by the gate.
pub const GATE_SUBDIVISIONS: usize = 2;

/// The degree-7 rule copied onto `4^GATE_SUBDIVISIONS` sub-triangles. The
/// stress is not polynomial, so the plain rule leaves a residual near `1e-9`
/// on a 16 x 16 mesh.
pub fn gate_rule() -> QuadratureRule {
    crate::fespace::quadrature_for(2, 7).expect("supported degree").composite(GATE_SUBDIVISIONS)
}
