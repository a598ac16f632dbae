use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::fespace::VectorFunction;
use crate::pstructure::{PStructureError, StressModel, SymTensor};
use crate::stepper::ProblemData;

/// Time amplitude of the manufactured velocity and pressure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeProfile {
    /// `alpha = 1 + sin(2 pi t) / 2`, `beta = cos(2 pi t)`.
    #[default]
    SmoothPeriodic,
    /// `alpha = exp(3 t)`, `beta = 0`. The time derivatives are large
    /// relative to the amplitude, so backward Euler errors dominate the
    /// spatial error on moderate meshes.
    TimeDominant,
    /// Zero velocity and pressure.
    Zero,
}

// G(s) = s^2 (1 - s)^2 and its derivatives.
fn g(s: f64) -> [f64; 5] {
    [
        s * s - 2.0 * s.powi(3) + s.powi(4),
        2.0 * s - 6.0 * s * s + 4.0 * s.powi(3),
        2.0 - 12.0 * s + 12.0 * s * s,
        -12.0 + 24.0 * s,
        24.0,
    ]
}

/// `u = alpha(t) curl psi`, `psi = (x (1 - x) y (1 - y))^2`, and
/// `q = beta(t) (x^3 + y^3 - 1/2)` on the unit square.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManufacturedSolution {
    pub profile: TimeProfile,
}

impl ManufacturedSolution {
    pub fn new(profile: TimeProfile) -> Self {
        ManufacturedSolution { profile }
    }

    pub fn smooth_periodic() -> Self {
        Self::new(TimeProfile::SmoothPeriodic)
    }

    pub fn alpha(&self, t: f64) -> f64 {
        match self.profile {
            TimeProfile::SmoothPeriodic => 1.0 + 0.5 * (2.0 * PI * t).sin(),
            TimeProfile::TimeDominant => (TD_RATE * t).exp(),
            TimeProfile::Zero => 0.0,
        }
    }

    pub fn alpha_dot(&self, t: f64) -> f64 {
        match self.profile {
            TimeProfile::SmoothPeriodic => PI * (2.0 * PI * t).cos(),
            TimeProfile::TimeDominant => TD_RATE * (TD_RATE * t).exp(),
            TimeProfile::Zero => 0.0,
        }
    }

    pub fn beta(&self, t: f64) -> f64 {
        match self.profile {
            TimeProfile::SmoothPeriodic => (2.0 * PI * t).cos(),
            TimeProfile::TimeDominant | TimeProfile::Zero => 0.0,
        }
    }

    pub fn velocity(&self, t: f64, x: &[f64; 2]) -> [f64; 2] {
        let (gx, gy) = (g(x[0]), g(x[1]));
        let a = self.alpha(t);
        [a * gx[0] * gy[1], -a * gx[1] * gy[0]]
    }

    pub fn velocity_dt(&self, t: f64, x: &[f64; 2]) -> [f64; 2] {
        let (gx, gy) = (g(x[0]), g(x[1]));
        let a = self.alpha_dot(t);
        [a * gx[0] * gy[1], -a * gx[1] * gy[0]]
    }

    /// `grad[c][j] = d u_c / d x_j`.
    pub fn velocity_gradient(&self, t: f64, x: &[f64; 2]) -> [[f64; 2]; 2] {
        let (gx, gy) = (g(x[0]), g(x[1]));
        let a = self.alpha(t);
        [[a * gx[1] * gy[1], a * gx[0] * gy[2]], [-a * gx[2] * gy[0], -a * gx[1] * gy[1]]]
    }

    /// `hess[c][j][k] = d^2 u_c / dx_j dx_k`.
    pub fn velocity_hessian(&self, t: f64, x: &[f64; 2]) -> [[[f64; 2]; 2]; 2] {
        let (gx, gy) = (g(x[0]), g(x[1]));
        let a = self.alpha(t);
        let u1 = [[a * gx[2] * gy[1], a * gx[1] * gy[2]], [a * gx[1] * gy[2], a * gx[0] * gy[3]]];
        let u2 = [[-a * gx[3] * gy[0], -a * gx[2] * gy[1]], [-a * gx[2] * gy[1], -a * gx[1] * gy[2]]];
        [u1, u2]
    }

    pub fn pressure(&self, t: f64, x: &[f64; 2]) -> f64 {
        self.beta(t) * (x[0].powi(3) + x[1].powi(3) - 0.5)
    }

    pub fn pressure_gradient(&self, t: f64, x: &[f64; 2]) -> [f64; 2] {
        let b = self.beta(t);
        [3.0 * b * x[0] * x[0], 3.0 * b * x[1] * x[1]]
    }

    /// `D u(t, x)`.
    pub fn sym_gradient(&self, t: f64, x: &[f64; 2]) -> SymTensor {
        SymTensor::sym_part2(&self.velocity_gradient(t, x))
    }

    /// The velocity at a fixed time as a [`VectorFunction`].
    pub fn at(&self, t: f64) -> Snapshot<'_> {
        Snapshot { ms: self, t }
    }
}

const TD_RATE: f64 = 3.0;

pub struct Snapshot<'a> {
    ms: &'a ManufacturedSolution,
    t: f64,
}

impl VectorFunction for Snapshot<'_> {
    fn value(&self, x: &[f64; 2]) -> [f64; 2] {
        self.ms.velocity(self.t, x)
    }

    fn gradient(&self, x: &[f64; 2]) -> [[f64; 2]; 2] {
        self.ms.velocity_gradient(self.t, x)
    }
}

/// `f = d_t u - div S(Du) + [grad u] u + grad q` for a manufactured solution.
#[derive(Debug, Clone, Copy)]
pub struct Forcing {
    pub ms: ManufacturedSolution,
    pub model: StressModel,
}

/// Builds the right-hand side that makes `ms` an exact solution for `model`.
pub fn forcing_from(ms: &ManufacturedSolution, model: &StressModel) -> Forcing {
    Forcing { ms: *ms, model: *model }
}

impl Forcing {
    /// `div S(Du)` by the chain rule: `sum_j dS[d_j Du]_{ij}`.
    pub fn stress_divergence(&self, t: f64, x: &[f64; 2]) -> Result<[f64; 2], PStructureError> {
        let du = self.ms.sym_gradient(t, x);
        let jac = self.model.stress_jacobian(&du)?;
        let h = self.ms.velocity_hessian(t, x);
        let mut out = [0.0; 2];
        for j in 0..2 {
            // (d_j grad u)[c][k] = h[c][k][j]
            let dj = [[h[0][0][j], h[0][1][j]], [h[1][0][j], h[1][1][j]]];
            let ds = jac.apply_sym(&SymTensor::sym_part2(&dj));
            out[0] += ds.get(0, j);
            out[1] += ds.get(1, j);
        }
        Ok(out)
    }

    pub fn try_eval(&self, t: f64, x: &[f64; 2]) -> Result<[f64; 2], PStructureError> {
        let dt = self.ms.velocity_dt(t, x);
        let divs = self.stress_divergence(t, x)?;
        let u = self.ms.velocity(t, x);
        let gu = self.ms.velocity_gradient(t, x);
        let gq = self.ms.pressure_gradient(t, x);
        let mut f = [0.0; 2];
        for c in 0..2 {
            f[c] = dt[c] - divs[c] + gu[c][0] * u[0] + gu[c][1] * u[1] + gq[c];
        }
        Ok(f)
    }

    /// Like [`try_eval`](Self::try_eval); at a degenerate point (`delta = 0`,
    /// `Du = 0`) the zero-gradient limit of the stress divergence is used.
    pub fn eval(&self, t: f64, x: &[f64; 2]) -> [f64; 2] {
        self.try_eval(t, x).unwrap_or_else(|_| {
            let dt = self.ms.velocity_dt(t, x);
            let gq = self.ms.pressure_gradient(t, x);
            [dt[0] + gq[0], dt[1] + gq[1]]
        })
    }
}

/// Initial data and forcing of the manufactured problem.
pub struct ManufacturedProblem {
    pub forcing: Forcing,
    initial: ManufacturedSolution,
}

impl ManufacturedProblem {
    pub fn new(ms: ManufacturedSolution, model: StressModel) -> Self {
        ManufacturedProblem { forcing: forcing_from(&ms, &model), initial: ms }
    }
}

impl ProblemData for ManufacturedProblem {
    fn initial_velocity(&self) -> &dyn VectorFunction {
        &self.initial
    }

    fn forcing(&self, t: f64, x: &[f64; 2]) -> [f64; 2] {
        self.forcing.eval(t, x)
    }
}

impl VectorFunction for ManufacturedSolution {
    /// Velocity at `t = 0`.
    fn value(&self, x: &[f64; 2]) -> [f64; 2] {
        self.velocity(0.0, x)
    }

    fn gradient(&self, x: &[f64; 2]) -> [[f64; 2]; 2] {
        self.velocity_gradient(0.0, x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const POINTS: [[f64; 2]; 4] = [[0.3, 0.7], [0.5, 0.5], [0.12, 0.91], [0.66, 0.2]];

    fn fd<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
        (f(x - 2.0 * h) - 8.0 * f(x - h) + 8.0 * f(x + h) - f(x + 2.0 * h)) / (12.0 * h)
    }

    #[test]
    fn divergence_free_and_boundary_values() {
        let ms = ManufacturedSolution::smooth_periodic();
        for t in [0.0, 0.3, 0.77] {
            for x in POINTS {
                let gr = ms.velocity_gradient(t, &x);
                assert!((gr[0][0] + gr[1][1]).abs() < 1e-15);
            }
            for s in [0.0, 0.25, 0.6, 1.0] {
                for x in [[s, 0.0], [s, 1.0], [0.0, s], [1.0, s]] {
                    let u = ms.velocity(t, &x);
                    assert!(u[0].abs() < 1e-16 && u[1].abs() < 1e-16);
                }
            }
        }
    }

    #[test]
    fn pressure_has_zero_mean() {
        let ms = ManufacturedSolution::smooth_periodic();
        let rule = crate::fespace::quadrature_for(2, 7).unwrap();
        // The unit square as two reference triangles.
        for t in [0.0, 0.4] {
            let mut s = 0.0;
            for (l, w) in rule.points.iter().zip(&rule.weights) {
                let (a, b) = (l[1], l[2]);
                s += w * (ms.pressure(t, &[a, b]) + ms.pressure(t, &[1.0 - a, 1.0 - b]));
            }
            assert!(s.abs() < 1e-15);
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let ms = ManufacturedSolution::smooth_periodic();
        let t = 0.37;
        let h = 1e-3;
        for x in POINTS {
            let gr = ms.velocity_gradient(t, &x);
            let he = ms.velocity_hessian(t, &x);
            for c in 0..2 {
                for j in 0..2 {
                    let shift = |s: f64| {
                        let mut y = x;
                        y[j] += s;
                        y
                    };
                    assert!((fd(|s| ms.velocity(t, &shift(s))[c], 0.0, h) - gr[c][j]).abs() < 1e-10);
                    for k in 0..2 {
                        assert!((fd(|s| ms.velocity_gradient(t, &shift(s))[c][k], 0.0, h) - he[c][k][j]).abs() < 1e-10);
                    }
                }
                assert!((fd(|s| ms.velocity(s, &x)[c], t, h) - ms.velocity_dt(t, &x)[c]).abs() < 1e-9);
            }
            let gq = ms.pressure_gradient(t, &x);
            assert!((fd(|s| ms.pressure(t, &[x[0] + s, x[1]]), 0.0, h) - gq[0]).abs() < 1e-10);
        }
    }

    #[test]
    fn linear_case_stress_divergence_is_half_laplacian() {
        let ms = ManufacturedSolution::smooth_periodic();
        let model = StressModel::new(2.0, 0.4, 2).unwrap();
        let f = forcing_from(&ms, &model);
        for x in POINTS {
            let h = ms.velocity_hessian(0.2, &x);
            let d = f.stress_divergence(0.2, &x).unwrap();
            for c in 0..2 {
                let lap = h[c][0][0] + h[c][1][1];
                assert!((d[c] - 0.5 * lap).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn forcing_matches_finite_difference_operator() {
        let ms = ManufacturedSolution::smooth_periodic();
        let model = StressModel::new(1.7, 0.05, 2).unwrap();
        let forcing = forcing_from(&ms, &model);
        let x = [0.5, 0.5];
        let f = forcing.try_eval(0.0, &x).unwrap();
        assert!(f.iter().all(|v| v.is_finite()));
        let h = 1e-3;
        let s_at = |y: [f64; 2]| model.stress(&ms.sym_gradient(0.0, &y));
        let mut divs = [0.0; 2];
        for c in 0..2 {
            divs[c] = fd(|s| s_at([x[0] + s, x[1]]).get(c, 0), 0.0, h) + fd(|s| s_at([x[0], x[1] + s]).get(c, 1), 0.0, h);
        }
        let u = ms.velocity(0.0, &x);
        let gu = ms.velocity_gradient(0.0, &x);
        let gq = ms.pressure_gradient(0.0, &x);
        let dt = ms.velocity_dt(0.0, &x);
        for c in 0..2 {
            let strong = dt[c] - divs[c] + gu[c][0] * u[0] + gu[c][1] * u[1] + gq[c];
            assert!((strong - f[c]).abs() < 1e-6, "{strong} vs {}", f[c]);
        }
    }
}
