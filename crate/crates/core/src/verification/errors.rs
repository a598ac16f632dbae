use serde::Serialize;

use crate::assembly::EXACT_DEGREE;
use crate::fespace::{quadrature_for, DiscreteField, FESpace};
use crate::pstructure::{StressModel, SymTensor};
use crate::stepper::Trajectory;

use super::ManufacturedSolution;
use std::sync::Arc;

/// Per-node errors of a trajectory against the exact solution.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ErrorRecord {
    pub kappa: f64,
    /// `a_m = ||u_h^m - u(t_m)||_2`, `m = 0..=M`.
    pub l2: Vec<f64>,
    /// `||F(Du_h^m) - F(Du(t_m))||_2`.
    pub f_distance: Vec<f64>,
    /// `b_m = ||Du_h^m - Du(t_m)||_p`.
    pub sym_grad_p: Vec<f64>,
    /// `max_m a_m^2`.
    pub l2_max_sq: f64,
    /// `kappa sum_{m=1}^M ||F(Du_h^m) - F(Du(t_m))||_2^2`.
    pub f_agg_sq: f64,
}

impl ErrorRecord {
    pub fn l2_max(&self) -> f64 {
        self.l2_max_sq.sqrt()
    }

    pub fn f_agg(&self) -> f64 {
        self.f_agg_sq.sqrt()
    }

    /// `max_m a_m^2 + kappa sum ||F-distance||^2`.
    pub fn total_sq(&self) -> f64 {
        self.l2_max_sq + self.f_agg_sq
    }
}

pub(crate) struct NodeErrors {
    pub l2_sq: f64,
    pub f_sq: f64,
    pub grad_p: f64,
}

pub(crate) fn node_errors(space: &Arc<FESpace>, u: &[f64], ms: &ManufacturedSolution, t: f64, model: &StressModel) -> NodeErrors {
    let rule = quadrature_for(2, EXACT_DEGREE).expect("supported degree");
    let field = DiscreteField::new(space.clone(), u.to_vec()).expect("coefficient length");
    let p = model.p();
    let (mut l2, mut fd, mut gp) = (0.0, 0.0, 0.0);
    for k in 0..space.n_cells() {
        let geo = space.geometry(k);
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let x = geo.point(l);
            let wt = 2.0 * geo.area * w;
            let uh = field.value_in_cell(k, l);
            let ue = ms.velocity(t, &x);
            l2 += wt * ((uh[0] - ue[0]).powi(2) + (uh[1] - ue[1]).powi(2));
            let dh = SymTensor::sym_part2(&field.gradient_in_cell(k, l));
            let de = ms.sym_gradient(t, &x);
            let df = model.f_map(&dh) - model.f_map(&de);
            fd += wt * df.dot(&df);
            gp += wt * (dh - de).norm().powf(p);
        }
    }
    NodeErrors { l2_sq: l2, f_sq: fd, grad_p: gp.powf(1.0 / p) }
}

/// Errors of `traj` at every time node, with all norms by the degree-7 rule.
pub fn error_record(traj: &Trajectory, space: &Arc<FESpace>, ms: &ManufacturedSolution, model: &StressModel) -> ErrorRecord {
    let kappa = traj.grid.kappa();
    let nodes: Vec<NodeErrors> = traj
        .velocities
        .iter()
        .enumerate()
        .map(|(m, u)| node_errors(space, u, ms, traj.grid.node(m), model))
        .collect();
    let l2: Vec<f64> = nodes.iter().map(|e| e.l2_sq.sqrt()).collect();
    let f_distance: Vec<f64> = nodes.iter().map(|e| e.f_sq.sqrt()).collect();
    let sym_grad_p = nodes.iter().map(|e| e.grad_p).collect();
    let l2_max_sq = nodes.iter().map(|e| e.l2_sq).fold(0.0, f64::max);
    let f_agg_sq = kappa * nodes[1..].iter().map(|e| e.f_sq).sum::<f64>();
    ErrorRecord { kappa, l2, f_distance, sym_grad_p, l2_max_sq, f_agg_sq }
}
