//! Semi-implicit backward Euler time stepping.
//!
//! Each step solves
//!
//! ```text
//! (u - u_prev) / kappa + S(Du) + b(u_prev, u, .) - grad q = f(t_m),   div u = 0
//! ```
//!
//! in weak form with the convection frozen at the previous step.

mod solve;

pub use solve::{InitialGuess, SolverOptions, StepDiagnostics, StepOutput, StepProblem, Stepper, Strategy};

use std::sync::Arc;

use log::info;
use serde::Serialize;

use crate::assembly::{assemble_divergence, assemble_mass, EXACT_DEGREE};
use crate::fespace::{div_preserving_projection, quadrature_for, DiscreteField, FESpace, FeError, Spaces, VectorFunction};
use crate::linalg::LinearSolveError;
use crate::pstructure::{StressModel, SymTensor};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StepError {
    #[error("step {step}: no convergence (relative residual {residual:e} after {newton} Newton and {picard} Picard iterations)")]
    NonConvergence { step: usize, residual: f64, newton: usize, picard: usize },
    #[error("step {step}: linear solve failed: {source}")]
    LinearSolve { step: usize, source: LinearSolveError },
    #[error("invalid time grid: {0}")]
    InvalidGrid(String),
    #[error(transparent)]
    Fe(#[from] FeError),
}

impl StepError {
    fn at_step(self, m: usize) -> Self {
        match self {
            StepError::NonConvergence { residual, newton, picard, .. } => {
                StepError::NonConvergence { step: m, residual, newton, picard }
            }
            StepError::LinearSolve { source, .. } => StepError::LinearSolve { step: m, source },
            e => e,
        }
    }
}

/// Uniform time grid `t_m = m T / M`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimeGrid {
    t_final: f64,
    steps: usize,
}

impl TimeGrid {
    pub fn new(t_final: f64, steps: usize) -> Result<Self, StepError> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(StepError::InvalidGrid(format!("T must be positive, got {t_final}")));
        }
        if steps == 0 {
            return Err(StepError::InvalidGrid("M must be at least 1".into()));
        }
        Ok(TimeGrid { t_final, steps })
    }

    pub fn t_final(&self) -> f64 {
        self.t_final
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn kappa(&self) -> f64 {
        self.t_final / self.steps as f64
    }

    pub fn node(&self, m: usize) -> f64 {
        if m == self.steps {
            self.t_final
        } else {
            m as f64 * self.kappa()
        }
    }
}

/// Initial velocity and forcing.
pub trait ProblemData: Sync {
    fn initial_velocity(&self) -> &dyn VectorFunction;
    fn forcing(&self, t: f64, x: &[f64; 2]) -> [f64; 2];
}

/// Zero initial data and zero forcing, or a given initial field with zero forcing.
pub struct Unforced<'a>(pub &'a dyn VectorFunction);

impl ProblemData for Unforced<'_> {
    fn initial_velocity(&self) -> &dyn VectorFunction {
        self.0
    }

    fn forcing(&self, _t: f64, _x: &[f64; 2]) -> [f64; 2] {
        [0.0, 0.0]
    }
}

/// Discrete solution at every time node with per-step diagnostics.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub grid: TimeGrid,
    pub velocities: Vec<Vec<f64>>,
    /// `q^0` is zero; the scheme defines pressures for `m >= 1`.
    pub pressures: Vec<Vec<f64>>,
    pub diagnostics: Vec<StepDiagnostics>,
    /// `||u^m||_2^2`.
    pub kinetic: Vec<f64>,
    /// `||F(Du^m)||_2^2`.
    pub dissipation: Vec<f64>,
    pub divergence: Vec<f64>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.velocities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.velocities.is_empty()
    }

    /// `max_m ||u^m||^2 + kappa sum_{m>=1} ||F(Du^m)||^2`.
    pub fn energy(&self) -> f64 {
        let kmax = self.kinetic.iter().copied().fold(0.0, f64::max);
        kmax + self.grid.kappa() * self.dissipation[1..].iter().sum::<f64>()
    }

    /// CSV with one row per node: `m,t_m,energy,divergence,newton_iterations`,
    /// where `energy` is the running energy quantity up to `m`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,t_m,energy,divergence,newton_iterations\n");
        let mut kmax: f64 = 0.0;
        let mut diss = 0.0;
        for m in 0..self.len() {
            kmax = kmax.max(self.kinetic[m]);
            let iters = if m == 0 { 0 } else { self.diagnostics[m - 1].newton_iterations };
            if m > 0 {
                diss += self.grid.kappa() * self.dissipation[m];
            }
            out.push_str(&format!(
                "{m},{:.12e},{:.12e},{:.6e},{iters}\n",
                self.grid.node(m),
                kmax + diss,
                self.divergence[m]
            ));
        }
        out
    }
}

/// `||F(Du)||_2^2` by the degree-7 rule.
pub fn f_norm_squared(space: &Arc<FESpace>, u: &[f64], model: &StressModel) -> f64 {
    let rule = quadrature_for(2, EXACT_DEGREE).expect("supported degree");
    let field = DiscreteField::new(space.clone(), u.to_vec()).expect("length");
    let mut s = 0.0;
    for k in 0..space.n_cells() {
        let area = space.geometry(k).area;
        for (l, w) in rule.points.iter().zip(&rule.weights) {
            let du = SymTensor::sym_part2(&field.gradient_in_cell(k, l));
            let f = model.f_map(&du);
            s += 2.0 * area * w * f.dot(&f);
        }
    }
    s
}

/// `max_k |(div u, eta_k)| / ||eta_k||_2` over the pressure basis.
pub fn discrete_divergence_check(v_space: &FESpace, q_space: &FESpace, u: &[f64]) -> f64 {
    let b = assemble_divergence(v_space, q_space);
    let mq = assemble_mass(q_space);
    b.mul_vec(u).iter().enumerate().map(|(k, v)| v.abs() / mq.get(k, k).sqrt()).fold(0.0, f64::max)
}

/// Runs the scheme from the divergence-preserving projection of the initial velocity.
pub fn run_simulation(stepper: &Stepper, grid: TimeGrid, data: &dyn ProblemData) -> Result<Trajectory, StepError> {
    let spaces: &Spaces = stepper.spaces();
    let vs = &spaces.velocity;
    let qs = &spaces.pressure;
    let u0 = div_preserving_projection(vs, qs, data.initial_velocity())?.into_coeffs();
    let mq = assemble_mass(qs);
    let div_check = |u: &[f64]| {
        stepper.divergence().mul_vec(u).iter().enumerate().map(|(k, v)| v.abs() / mq.get(k, k).sqrt()).fold(0.0, f64::max)
    };
    let kinetic = |u: &[f64]| stepper.mass().bilinear(u, u);
    let mut traj = Trajectory {
        grid,
        kinetic: vec![kinetic(&u0)],
        dissipation: vec![f_norm_squared(vs, &u0, stepper.model())],
        divergence: vec![div_check(&u0)],
        velocities: vec![u0],
        pressures: vec![vec![0.0; qs.n_dofs()]],
        diagnostics: Vec::new(),
    };
    for m in 1..=grid.steps() {
        let t = grid.node(m);
        let forcing = |x: &[f64; 2]| data.forcing(t, x);
        let problem = StepProblem { u_prev: &traj.velocities[m - 1], t, kappa: grid.kappa(), forcing: &forcing };
        let out = stepper.solve_step(&problem).map_err(|e| e.at_step(m))?;
        info!(
            "step {m}/{}: t = {t:.4}, {} Newton + {} Picard iterations, residual {:.2e}",
            grid.steps(),
            out.diagnostics.newton_iterations,
            out.diagnostics.picard_iterations,
            out.diagnostics.final_residual()
        );
        traj.kinetic.push(kinetic(&out.u));
        traj.dissipation.push(f_norm_squared(vs, &out.u, stepper.model()));
        traj.divergence.push(div_check(&out.u));
        traj.velocities.push(out.u);
        traj.pressures.push(out.q);
        traj.diagnostics.push(out.diagnostics);
    }
    Ok(traj)
}
