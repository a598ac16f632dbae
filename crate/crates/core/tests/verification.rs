use std::sync::Arc;

use pfluid::fespace::{interpolate, quadrature_for, ElementKind, ElementPair, FESpace};
use pfluid::mesh::unit_square_mesh;
use pfluid::stepper::{SolverOptions, TimeGrid, Trajectory};
use pfluid::verification::{
    error_record, gate_rule, gronwall_check, harvest_gronwall, quasi_norm_suite, run_manufactured, weak_residual_gate,
    ManufacturedSolution, TimeProfile,
};
use pfluid::StressModel;

fn mini(n: usize) -> Arc<FESpace> {
    Arc::new(FESpace::new(Arc::new(unit_square_mesh(n)), ElementKind::P1Bubble, 2).unwrap())
}

fn fake_trajectory(grid: TimeGrid, velocities: Vec<Vec<f64>>) -> Trajectory {
    let n = velocities.len();
    Trajectory {
        grid,
        pressures: vec![Vec::new(); n],
        diagnostics: Vec::new(),
        kinetic: vec![0.0; n],
        dissipation: vec![0.0; n],
        divergence: vec![0.0; n],
        velocities,
    }
}

#[test]
fn weak_residual_vanishes_for_linear_model_with_plain_rule() {
    let model = StressModel::new(2.0, 0.5, 2).unwrap();
    let rule = quadrature_for(2, 7).unwrap();
    let r = weak_residual_gate(&mini(8), &ManufacturedSolution::smooth_periodic(), &model, 0.6, &rule, 100, 3);
    assert!(r.max_abs < 1e-13, "{}", r.max_abs);
}

#[test]
fn weak_residual_gate_nonlinear() {
    let model = StressModel::new(1.8, 0.1, 2).unwrap();
    let r = weak_residual_gate(&mini(16), &ManufacturedSolution::smooth_periodic(), &model, 0.3, &gate_rule(), 100, 3);
    assert!(r.max_abs <= 1e-10, "{}", r.max_abs);
}

#[test]
fn interpolant_errors_are_small_but_nonzero() {
    let ms = ManufacturedSolution::smooth_periodic();
    let model = StressModel::new(1.8, 0.1, 2).unwrap();
    let grid = TimeGrid::new(1.0, 4).unwrap();
    let mut errs = Vec::new();
    for n in [4, 8] {
        let vs = mini(n);
        let velocities = (0..=4).map(|m| interpolate(&vs, |x| ms.velocity(grid.node(m), x)).into_coeffs()).collect();
        let rec = error_record(&fake_trajectory(grid, velocities), &vs, &ms, &model);
        assert!(rec.l2.iter().all(|a| *a > 0.0 && *a < 1e-2));
        let direct = rec.kappa * rec.f_distance[1..].iter().map(|f| f * f).sum::<f64>();
        assert!((rec.f_agg_sq - direct).abs() <= 1e-15 * direct.max(1.0));
        let max_sq = rec.l2.iter().map(|a| a * a).fold(0.0, f64::max);
        assert!((rec.l2_max_sq - max_sq).abs() <= 1e-14 * max_sq);
        errs.push(rec.l2_max());
    }
    assert!(errs[1] < errs[0] / 3.0);
}

#[test]
fn zero_solution_zero_trajectory_gives_zero_record() {
    let ms = ManufacturedSolution::new(TimeProfile::Zero);
    let model = StressModel::new(1.5, 0.0, 2).unwrap();
    let vs = mini(4);
    let grid = TimeGrid::new(1.0, 3).unwrap();
    let rec = error_record(&fake_trajectory(grid, vec![vec![0.0; vs.n_dofs()]; 4]), &vs, &ms, &model);
    assert_eq!(rec.total_sq(), 0.0);
    assert!(rec.sym_grad_p.iter().chain(&rec.f_distance).all(|v| *v == 0.0));
}

#[test]
fn linear_case_f_aggregate_decreases_and_gronwall_holds() {
    let model = StressModel::new(2.0, 1.0, 2).unwrap();
    let mut aggs = Vec::new();
    for n in [4, 8] {
        let (_, rec, h) =
            run_manufactured(&model, ElementPair::Mini, TimeProfile::SmoothPeriodic, &SolverOptions::default(), n, 0.5, n)
                .unwrap();
        let report = gronwall_check(&harvest_gronwall(&rec, 2.0, 1.0, h));
        assert!(report.hypotheses_ok && report.conclusion_ok && report.mu4.is_finite());
        aggs.push(rec.f_agg());
    }
    assert!(aggs[1] < aggs[0]);
}

#[test]
fn quasi_norm_ratio_is_positive() {
    for (p, delta) in [(1.5, 0.0), (1.8, 0.1)] {
        let model = StressModel::new(p, delta, 2).unwrap();
        let r = quasi_norm_suite(&Arc::new(unit_square_mesh(4)), &model, 100, 11).unwrap();
        assert_eq!(r.samples, 100);
        assert!(r.min_ratio > 0.0 && r.min_ratio <= r.max_ratio);
    }
}
