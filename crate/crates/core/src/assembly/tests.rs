use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::fespace::{interpolate, ElementKind, ElementPair, FESpace, Spaces};
use crate::mesh::unit_square_mesh;

fn spaces(n: usize) -> Spaces {
    Spaces::new(Arc::new(unit_square_mesh(n)), ElementPair::Mini).unwrap()
}

fn random_vec(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[test]
fn mass_of_constant_field_is_area() {
    let s = spaces(3);
    let m = assemble_mass(&s.velocity);
    let c = interpolate(&s.velocity, |_| [2.0, -1.5]);
    assert!((m.bilinear(c.coeffs(), c.coeffs()) - 6.25).abs() < 1e-12);
    assert_eq!(m.max_asymmetry(), 0.0);
}

#[test]
fn p1_mass_entries() {
    // Reference-triangle integration: int l_i l_j = |K|/12 (i != j), |K|/6 (i == j).
    let mesh = Arc::new(unit_square_mesh(1));
    let p1 = FESpace::new(mesh, ElementKind::P1, 1).unwrap();
    let m = assemble_mass(&p1);
    // Vertices 0 = (0,0) and 1 = (1,0) share one cell of area 1/4.
    assert!((m.get(0, 1) - 0.25 / 12.0).abs() < 1e-15);
    // The centre vertex 4 belongs to all four cells.
    assert!((m.get(4, 4) - 4.0 * 0.25 / 6.0).abs() < 1e-15);
    // Opposite corners are not joined by an edge.
    assert_eq!(m.get(0, 3), 0.0);
}

#[test]
fn stress_residual_vanishes_at_zero() {
    let s = spaces(2);
    let model = StressModel::new(1.6, 0.1, 2).unwrap();
    let (r, _) = assemble_stress(&s.velocity, &vec![0.0; s.velocity.n_dofs()], &model, StressMatrix::None);
    assert!(r.iter().all(|&v| v == 0.0));
}

#[test]
fn linear_jacobian_is_constant_symmetric_gradient_form() {
    let s = spaces(2);
    let model = StressModel::new(2.0, 0.7, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let u = random_vec(&mut rng, s.velocity.n_dofs());
    let (_, j1) = assemble_stress(&s.velocity, &u, &model, StressMatrix::newton(&model));
    let (_, j0) = assemble_stress(&s.velocity, &vec![0.0; u.len()], &model, StressMatrix::newton(&model));
    let (j0, j1) = (j0.unwrap(), j1.unwrap());
    assert!(j1.add_scaled(-1.0, &j0).max_abs() < 1e-13);
    // (Du, Du) = 1/2 |grad u|^2 + 1/2 (div u)^2 for u vanishing on the boundary is not needed here;
    // compare with half Laplacian plus half the transpose-gradient form on a divergence-free field.
    let w = interpolate(&s.velocity, |x| [x[1], x[0]]);
    let du = w.coeffs();
    // Du = [[0,1],[1,0]], |Du|^2 = 2, area 1.
    assert!((j0.bilinear(du, du) - 2.0).abs() < 1e-12);
}

#[test]
fn stress_jacobian_symmetric_and_matches_differences() {
    let s = spaces(3);
    let model = StressModel::new(1.7, 0.05, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let u = random_vec(&mut rng, s.velocity.n_dofs());
    let w = random_vec(&mut rng, s.velocity.n_dofs());
    let (r0, jac) = assemble_stress(&s.velocity, &u, &model, StressMatrix::newton(&model));
    let jac = jac.unwrap();
    assert!(jac.max_asymmetry() <= 1e-12 * jac.max_abs().max(1.0));
    let jw = jac.mul_vec(&w);
    let mut errs = Vec::new();
    let eps_list = [1e-2, 5e-3, 2.5e-3];
    for eps in eps_list {
        let up: Vec<f64> = u.iter().zip(&w).map(|(a, b)| a + eps * b).collect();
        let (rp, _) = assemble_stress(&s.velocity, &up, &model, StressMatrix::None);
        let e: f64 = rp.iter().zip(&r0).zip(&jw).map(|((a, b), c)| ((a - b) / eps - c).powi(2)).sum::<f64>().sqrt();
        errs.push(e);
    }
    for k in 0..2 {
        let slope = (errs[k] / errs[k + 1]).ln() / 2f64.ln();
        assert!((0.9..=1.1).contains(&slope), "slope {slope}");
    }
}

#[test]
fn picard_matrix_reproduces_residual() {
    let s = spaces(2);
    let model = StressModel::new(1.5, 0.2, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let u = random_vec(&mut rng, s.velocity.n_dofs());
    let (r, a) = assemble_stress(&s.velocity, &u, &model, StressMatrix::Picard { shift: model.delta() });
    let au = a.unwrap().mul_vec(&u);
    for (x, y) in r.iter().zip(&au) {
        assert!((x - y).abs() < 1e-12);
    }
}

#[test]
fn convection_is_skew() {
    let s = spaces(3);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let w = random_vec(&mut rng, s.velocity.n_dofs());
    let n = assemble_convection(&s.velocity, &w);
    for _ in 0..100 {
        let v = random_vec(&mut rng, s.velocity.n_dofs());
        assert!(n.bilinear(&v, &v).abs() < 1e-12);
    }
    let zero = assemble_convection(&s.velocity, &vec![0.0; s.velocity.n_dofs()]);
    assert_eq!(zero.nnz(), 0);
}

#[test]
fn convection_matches_direct_quadrature_for_solenoidal_field() {
    // u = (x, -y) is solenoidal; v vanishes on the boundary so the skew form
    // equals ([grad v] u, w).
    let s = spaces(2);
    let u = interpolate(&s.velocity, |x| [x[0], -x[1]]);
    let bub = |x: &[f64; 2]| x[0] * (1.0 - x[0]) * x[1] * (1.0 - x[1]);
    let mut v = interpolate(&s.velocity, |x| [bub(x), 0.0]);
    for d in s.velocity.boundary_dofs() {
        v.coeffs_mut()[d] = 0.0;
    }
    let w = interpolate(&s.velocity, |x| [1.0 + x[1], x[0]]);
    let n = assemble_convection(&s.velocity, u.coeffs());
    let got = n.bilinear(w.coeffs(), v.coeffs());
    let rule = crate::fespace::quadrature_for(2, 12).unwrap();
    let mut want = 0.0;
    for k in 0..s.velocity.n_cells() {
        let geo = s.velocity.geometry(k);
        for (l, wq) in rule.points.iter().zip(&rule.weights) {
            let uu = u.value_in_cell(k, l);
            let gv = v.gradient_in_cell(k, l);
            let ww = w.value_in_cell(k, l);
            let conv = [gv[0][0] * uu[0] + gv[0][1] * uu[1], gv[1][0] * uu[0] + gv[1][1] * uu[1]];
            want += 2.0 * geo.area * wq * (conv[0] * ww[0] + conv[1] * ww[1]);
        }
    }
    assert!((got - want).abs() < 1e-12, "{got} vs {want}");
}

#[test]
fn divergence_examples() {
    let s = spaces(3);
    let b = assemble_divergence(&s.velocity, &s.pressure);
    let c = interpolate(&s.velocity, |_| [1.0, 2.0]);
    assert!(b.mul_vec(c.coeffs()).iter().all(|v| v.abs() < 1e-13));
    let sol = interpolate(&s.velocity, |x| [x[0], -x[1]]);
    assert!(b.mul_vec(sol.coeffs()).iter().all(|v| v.abs() < 1e-12));
    let ex = interpolate(&s.velocity, |x| [x[0], 0.0]);
    let total: f64 = b.mul_vec(ex.coeffs()).iter().sum();
    assert!((total - 1.0).abs() < 1e-13);
    assert!((assemble_mean(&s.pressure).iter().sum::<f64>() - 1.0).abs() < 1e-14);
}

#[test]
fn rhs_examples() {
    let s = spaces(3);
    let zero = assemble_rhs(&s.velocity, |_| [0.0, 0.0]);
    assert!(zero.iter().all(|&v| v == 0.0));
    let c = assemble_rhs(&s.velocity, |_| [3.0, -2.0]);
    let ns = s.velocity.n_scalar();
    let ones = interpolate(&s.velocity, |_| [1.0, 0.0]);
    assert!((dot(&c, ones.coeffs()) - 3.0).abs() < 1e-12);
    let ones_y = interpolate(&s.velocity, |_| [0.0, 1.0]);
    assert!((dot(&c, ones_y.coeffs()) + 2.0).abs() < 1e-12);
    // f = (y, x) against every basis function, oracle by a degree-7 rule.
    let f = assemble_rhs(&s.velocity, |x| [x[1], x[0]]);
    let rule = crate::fespace::quadrature_for(2, 7).unwrap();
    let mut want = vec![0.0; s.velocity.n_dofs()];
    for k in 0..s.velocity.n_cells() {
        let geo = s.velocity.geometry(k);
        for (l, wq) in rule.points.iter().zip(&rule.weights) {
            let mut phi = [0.0; 4];
            ElementKind::P1Bubble.values(l, &mut phi);
            let x = geo.point(l);
            for (i, &d) in s.velocity.cell_dofs(k).iter().enumerate() {
                want[d] += 2.0 * geo.area * wq * x[1] * phi[i];
                want[ns + d] += 2.0 * geo.area * wq * x[0] * phi[i];
            }
        }
    }
    for (a, b) in f.iter().zip(&want) {
        assert!((a - b).abs() < 1e-12);
    }
}

#[test]
fn dirichlet_elimination() {
    let s = spaces(4);
    let a = assemble_laplacian(&s.velocity);
    let b = assemble_divergence(&s.velocity, &s.pressure);
    let g = assemble_rhs(&s.velocity, |x| [x[1] - 0.5, 0.3 * x[0]]);
    let system = SaddleSystem::new(a, b, g.clone(), assemble_mean(&s.pressure));
    let bdry = s.velocity.boundary_dofs();
    let reduced = apply_dirichlet(system, &bdry);
    assert_eq!(reduced.a.max_asymmetry(), 0.0);
    let mask = s.velocity.boundary_mask();
    for (i, (&x, &y)) in reduced.g.iter().zip(&g).enumerate() {
        assert_eq!(x, if mask[i] { 0.0 } else { y });
    }
    let sol = reduced.solve().unwrap();
    for &d in &bdry {
        assert!(sol.u[d].abs() <= 1e-13);
    }
    let mean: f64 = dot(&assemble_mean(&s.pressure), &sol.q);
    assert!(mean.abs() < 1e-12);
    assert!(sol.multiplier.abs() < 1e-12);
}

