use std::sync::Arc;

use log::{debug, trace};
use serde::{Deserialize, Serialize};

use super::StepError;
use crate::assembly::{
    apply_dirichlet, assemble_convection, assemble_divergence, assemble_mass, assemble_mean, assemble_rhs,
    assemble_stress, SaddleSystem, StressMatrix,
};
use crate::fespace::Spaces;
use crate::linalg::SparseMatrix;
use crate::pstructure::StressModel;

/// Nonlinear iteration used for a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Damped Newton, falling back to Picard after repeated rejected steps.
    #[default]
    Newton,
    Picard,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialGuess {
    #[default]
    Previous,
    Zero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverOptions {
    pub rtol: f64,
    pub max_newton: usize,
    pub max_picard: usize,
    /// Consecutive rejected line-search trials before switching to Picard.
    pub max_rejections: usize,
    pub strategy: Strategy,
    pub initial_guess: InitialGuess,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            rtol: 1e-10,
            max_newton: 50,
            max_picard: 200,
            max_rejections: 3,
            strategy: Strategy::Newton,
            initial_guess: InitialGuess::Previous,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct StepDiagnostics {
    pub newton_iterations: usize,
    pub picard_iterations: usize,
    pub rejected_trials: usize,
    pub switched_to_picard: bool,
    /// Relative residual after every accepted iterate, starting with the guess.
    pub residuals: Vec<f64>,
}

impl StepDiagnostics {
    pub fn final_residual(&self) -> f64 {
        self.residuals.last().copied().unwrap_or(0.0)
    }
}

/// One time step: find `u` given `u_prev`, the forcing at `t` and the step `kappa`.
pub struct StepProblem<'a> {
    pub u_prev: &'a [f64],
    pub t: f64,
    pub kappa: f64,
    pub forcing: &'a (dyn Fn(&[f64; 2]) -> [f64; 2] + Sync),
}

#[derive(Debug, Clone)]
pub struct StepOutput {
    pub u: Vec<f64>,
    pub q: Vec<f64>,
    pub diagnostics: StepDiagnostics,
}

/// Step-independent operators of the scheme on fixed spaces.
#[derive(Debug, Clone)]
pub struct Stepper {
    spaces: Spaces,
    model: StressModel,
    mass: SparseMatrix,
    divergence: SparseMatrix,
    mean: Vec<f64>,
    boundary: Vec<usize>,
    options: SolverOptions,
}

struct State {
    u: Vec<f64>,
    q: Vec<f64>,
    l: f64,
}

impl Stepper {
    pub fn new(spaces: Spaces, model: StressModel, options: SolverOptions) -> Self {
        let mass = assemble_mass(&spaces.velocity);
        let divergence = assemble_divergence(&spaces.velocity, &spaces.pressure);
        let mean = assemble_mean(&spaces.pressure);
        let boundary = spaces.velocity.boundary_dofs();
        Stepper { spaces, model, mass, divergence, mean, boundary, options }
    }

    pub fn spaces(&self) -> &Spaces {
        &self.spaces
    }

    pub fn model(&self) -> &StressModel {
        &self.model
    }

    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn with_options(mut self, options: SolverOptions) -> Self {
        self.options = options;
        self
    }

    pub fn mass(&self) -> &SparseMatrix {
        &self.mass
    }

    pub fn divergence(&self) -> &SparseMatrix {
        &self.divergence
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn velocity_space(&self) -> &Arc<crate::fespace::FESpace> {
        &self.spaces.velocity
    }

    /// Full residual of the step equations and the norm of the data it is
    /// measured against. Boundary rows are zero because `u` vanishes there.
    fn residual(&self, s: &State, conv: &SparseMatrix, load: &[f64], kappa: f64) -> (Vec<f64>, Vec<f64>) {
        let (stress, _) = assemble_stress(&self.spaces.velocity, &s.u, &self.model, StressMatrix::None);
        let mu = self.mass.mul_vec(&s.u);
        let nu = conv.mul_vec(&s.u);
        let btq = self.divergence.transpose().mul_vec(&s.q);
        let mut ru: Vec<f64> = (0..s.u.len()).map(|i| mu[i] / kappa + stress[i] + nu[i] - btq[i] - load[i]).collect();
        for &d in &self.boundary {
            ru[d] = 0.0;
        }
        let bu = self.divergence.mul_vec(&s.u);
        let mut rq: Vec<f64> = bu.iter().zip(&self.mean).map(|(b, m)| -b + m * s.l).collect();
        rq.push(self.mean.iter().zip(&s.q).map(|(m, q)| m * q).sum());
        (ru, rq)
    }

    fn norm(ru: &[f64], rq: &[f64]) -> f64 {
        ru.iter().chain(rq).map(|v| v * v).sum::<f64>().sqrt()
    }

    fn system(&self, a: SparseMatrix, g: Vec<f64>) -> SaddleSystem {
        apply_dirichlet(SaddleSystem::new(a, self.divergence.clone(), g, self.mean.clone()), &self.boundary)
    }

    pub fn solve_step(&self, sp: &StepProblem) -> Result<StepOutput, StepError> {
        let vs = &self.spaces.velocity;
        let kappa = sp.kappa;
        let conv = assemble_convection(vs, sp.u_prev);
        let f = assemble_rhs(vs, sp.forcing);
        let mprev = self.mass.mul_vec(sp.u_prev);
        let mut load: Vec<f64> = mprev.iter().zip(&f).map(|(m, f)| m / kappa + f).collect();
        for &d in &self.boundary {
            load[d] = 0.0;
        }
        let reference = {
            let r = load.iter().map(|v| v * v).sum::<f64>().sqrt();
            if r > 0.0 { r } else { 1.0 }
        };
        let mut state = State {
            u: match self.options.initial_guess {
                InitialGuess::Previous => sp.u_prev.to_vec(),
                InitialGuess::Zero => vec![0.0; vs.n_dofs()],
            },
            q: vec![0.0; self.spaces.pressure.n_dofs()],
            l: 0.0,
        };
        for &d in &self.boundary {
            state.u[d] = 0.0;
        }
        let mass_k = self.mass.scaled(1.0 / kappa);
        let base = mass_k.add_scaled(1.0, &conv);
        let mut diag = StepDiagnostics::default();
        let (mut ru, mut rq) = self.residual(&state, &conv, &load, kappa);
        let mut rnorm = Self::norm(&ru, &rq);
        diag.residuals.push(rnorm / reference);
        let mut picard = self.options.strategy == Strategy::Picard;
        let tol = self.options.rtol * reference;
        while rnorm > tol {
            if !picard {
                if diag.newton_iterations >= self.options.max_newton {
                    picard = true;
                    diag.switched_to_picard = true;
                    continue;
                }
                diag.newton_iterations += 1;
                let (_, jac) = assemble_stress(vs, &state.u, &self.model, StressMatrix::newton(&self.model));
                let mut sys = self.system(base.add_scaled(1.0, &jac.expect("matrix requested")), ru.iter().map(|v| -v).collect());
                sys.h = rq[..rq.len() - 1].to_vec();
                sys.c = -rq[rq.len() - 1];
                let d = sys.solve().map_err(|e| StepError::LinearSolve { step: 0, source: e })?;
                let mut alpha = 1.0;
                let mut rejected = 0;
                loop {
                    let trial = State {
                        u: state.u.iter().zip(&d.u).map(|(a, b)| a + alpha * b).collect(),
                        q: state.q.iter().zip(&d.q).map(|(a, b)| a + alpha * b).collect(),
                        l: state.l + alpha * d.multiplier,
                    };
                    let (tu, tq) = self.residual(&trial, &conv, &load, kappa);
                    let tn = Self::norm(&tu, &tq);
                    if tn < rnorm {
                        state = trial;
                        ru = tu;
                        rq = tq;
                        rnorm = tn;
                        break;
                    }
                    rejected += 1;
                    diag.rejected_trials += 1;
                    trace!("line search rejected alpha {alpha}: {tn:e} >= {rnorm:e}");
                    if rejected >= self.options.max_rejections {
                        picard = true;
                        diag.switched_to_picard = true;
                        debug!("switching to Picard after {rejected} rejected trials");
                        break;
                    }
                    alpha *= 0.5;
                }
            } else {
                if diag.picard_iterations >= self.options.max_picard {
                    return Err(StepError::NonConvergence {
                        step: 0,
                        residual: rnorm / reference,
                        newton: diag.newton_iterations,
                        picard: diag.picard_iterations,
                    });
                }
                diag.picard_iterations += 1;
                let (_, a) = assemble_stress(vs, &state.u, &self.model, StressMatrix::picard(&self.model));
                let sys = self.system(base.add_scaled(1.0, &a.expect("matrix requested")), load.clone());
                let sol = sys.solve().map_err(|e| StepError::LinearSolve { step: 0, source: e })?;
                state = State { u: sol.u, q: sol.q, l: sol.multiplier };
                let (tu, tq) = self.residual(&state, &conv, &load, kappa);
                ru = tu;
                rq = tq;
                rnorm = Self::norm(&ru, &rq);
            }
            diag.residuals.push(rnorm / reference);
        }
        Ok(StepOutput { u: state.u, q: state.q, diagnostics: diag })
    }
}
