use std::sync::Arc;

use faer::{Mat, Side};

use super::{DiscreteField, FESpace, FeError};
use crate::assembly::{
    apply_dirichlet, assemble_divergence, assemble_laplacian, assemble_mass, assemble_mean, assemble_rhs_with,
    SaddleSystem, EXACT_DEGREE,
};
use crate::linalg::SparseLu;

/// A vector field with a known gradient.
pub trait VectorFunction: Sync {
    fn value(&self, x: &[f64; 2]) -> [f64; 2];

    /// `g[c][j] = d u_c / d x_j`.
    fn gradient(&self, x: &[f64; 2]) -> [[f64; 2]; 2];

    fn divergence(&self, x: &[f64; 2]) -> f64 {
        let g = self.gradient(x);
        g[0][0] + g[1][1]
    }
}

/// Adapter for a pair of closures.
pub struct FnVector<F, G> {
    pub value: F,
    pub gradient: G,
}

impl<F, G> VectorFunction for FnVector<F, G>
where
    F: Fn(&[f64; 2]) -> [f64; 2] + Sync,
    G: Fn(&[f64; 2]) -> [[f64; 2]; 2] + Sync,
{
    fn value(&self, x: &[f64; 2]) -> [f64; 2] {
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64; 2]) -> [[f64; 2]; 2] {
        (self.gradient)(x)
    }
}

/// `L^2` projection onto the velocity space with zero boundary values,
/// constrained to reproduce the divergence moments of `u0` against every
/// pressure basis function.
pub fn div_preserving_projection(
    v_space: &Arc<FESpace>,
    q_space: &Arc<FESpace>,
    u0: &dyn VectorFunction,
) -> Result<DiscreteField, FeError> {
    let mass = assemble_mass(v_space);
    let b = assemble_divergence(v_space, q_space);
    let g = assemble_rhs_with(v_space, EXACT_DEGREE, |x| u0.value(x));
    let mut system = SaddleSystem::new(mass, b, g, assemble_mean(q_space));
    system.h = assemble_rhs_with(q_space, EXACT_DEGREE, |x| [u0.divergence(x), 0.0]);
    let system = apply_dirichlet(system, &v_space.boundary_dofs());
    let sol = system.solve()?;
    DiscreteField::new(v_space.clone(), sol.u)
}

/// Discrete inf-sup constant
/// `min_q max_v (div v, q) / (|v|_1 ||q||_2)` over mean-free pressures,
/// computed from the dense generalized eigenproblem `B A^-1 B^T x = beta^2 M x`.
/// Intended for small meshes.
pub fn inf_sup_constant(v_space: &Arc<FESpace>, q_space: &Arc<FESpace>) -> Result<f64, FeError> {
    let mask = v_space.boundary_mask();
    let interior: Vec<usize> = (0..v_space.n_dofs()).filter(|&d| !mask[d]).collect();
    let mut pos = vec![usize::MAX; v_space.n_dofs()];
    for (i, &d) in interior.iter().enumerate() {
        pos[d] = i;
    }
    let ni = interior.len();
    let lap = assemble_laplacian(v_space);
    let a = crate::linalg::SparseMatrix::from_triplets(
        ni,
        ni,
        lap.iter().filter(|&(i, j, _)| !mask[i] && !mask[j]).map(|(i, j, v)| (pos[i], pos[j], v)).collect(),
    );
    let b = assemble_divergence(v_space, q_space);
    let nq = q_space.n_dofs();
    let lu = SparseLu::factor(&a)?;
    // Columns of B^T restricted to interior velocity dofs.
    let mut bt = vec![vec![0.0; ni]; nq];
    for (k, j, v) in b.iter() {
        if !mask[j] {
            bt[k][pos[j]] = v;
        }
    }
    let mut s = Mat::<f64>::zeros(nq, nq);
    for k in 0..nq {
        let y = lu.solve(&bt[k])?;
        for l in 0..nq {
            s[(l, k)] = bt[l].iter().zip(&y).map(|(a, b)| a * b).sum();
        }
    }
    let mq = {
        let m = assemble_mass(q_space);
        Mat::<f64>::from_fn(nq, nq, |i, j| m.get(i, j))
    };
    let evd = mq.self_adjoint_eigen(Side::Lower).map_err(|e| FeError::Dimension(format!("{e:?}")))?;
    let u = evd.U();
    let d = evd.S().column_vector();
    let inv_sqrt = Mat::<f64>::from_fn(nq, nq, |i, j| (0..nq).map(|k| u[(i, k)] * u[(j, k)] / d[k].sqrt()).sum());
    let c = &inv_sqrt * &s * &inv_sqrt;
    let c = Mat::<f64>::from_fn(nq, nq, |i, j| 0.5 * (c[(i, j)] + c[(j, i)]));
    let eig = c.self_adjoint_eigenvalues(Side::Lower).map_err(|e| FeError::Dimension(format!("{e:?}")))?;
    // The constant pressure is in the kernel; the next eigenvalue is beta^2.
    Ok(eig[1].max(0.0).sqrt())
}
