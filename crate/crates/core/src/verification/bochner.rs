use serde::{Deserialize, Serialize};

use crate::fespace::gauss_legendre_unit;
use crate::stepper::TimeGrid;

/// Point `tau_m` of `I_m = [t_{m-1}, t_m]` at which `f` is frozen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TauChoice {
    #[default]
    Right,
    Left,
    Mid,
}

/// A curve `t -> f(t)` in a finite-dimensional space with its time derivative.
pub trait TimeFunction {
    fn value(&self, t: f64) -> Vec<f64>;
    fn time_derivative(&self, t: f64) -> Vec<f64>;
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BochnerReport {
    pub steps: usize,
    pub kappa: f64,
    /// `sum_m int_{I_m} ||f(s) - f(tau_m)||^2 ds`.
    pub lhs: f64,
    /// `kappa^2 int_0^T ||d_t f||^2 ds`.
    pub rhs: f64,
    pub holds: bool,
}

impl BochnerReport {
    pub fn ratio(&self) -> f64 {
        if self.rhs == 0.0 {
            if self.lhs == 0.0 {
                0.0
            } else {
                f64::INFINITY
            }
        } else {
            self.lhs / self.rhs
        }
    }
}

pub const POINTS_PER_INTERVAL: usize = 64;

/// Evaluates both sides of the piecewise-constant-in-time approximation
/// estimate with a 64-point Gauss rule on every interval.
pub fn bochner_check(f: &dyn TimeFunction, grid: &TimeGrid, tau: TauChoice, norm: &dyn Fn(&[f64]) -> f64) -> BochnerReport {
    let (nodes, weights) = gauss_legendre_unit(POINTS_PER_INTERVAL);
    let k = grid.kappa();
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for m in 1..=grid.steps() {
        let (a, b) = (grid.node(m - 1), grid.node(m));
        let tm = match tau {
            TauChoice::Right => b,
            TauChoice::Left => a,
            TauChoice::Mid => 0.5 * (a + b),
        };
        let frozen = f.value(tm);
        for (x, w) in nodes.iter().zip(&weights) {
            let s = a + (b - a) * x;
            let diff: Vec<f64> = f.value(s).iter().zip(&frozen).map(|(u, v)| u - v).collect();
            lhs += (b - a) * w * norm(&diff).powi(2);
            rhs += (b - a) * w * norm(&f.time_derivative(s)).powi(2);
        }
    }
    rhs *= k * k;
    BochnerReport { steps: grid.steps(), kappa: k, lhs, rhs, holds: lhs <= rhs + 1e-8 }
}

/// `f(t) = c(t) g` for a scalar profile `c`.
pub struct Separable<C: Fn(f64) -> (f64, f64)> {
    pub profile: C,
    pub g: Vec<f64>,
}

impl<C: Fn(f64) -> (f64, f64)> TimeFunction for Separable<C> {
    fn value(&self, t: f64) -> Vec<f64> {
        let c = (self.profile)(t).0;
        self.g.iter().map(|v| c * v).collect()
    }

    fn time_derivative(&self, t: f64) -> Vec<f64> {
        let c = (self.profile)(t).1;
        self.g.iter().map(|v| c * v).collect()
    }
}

/// Euclidean norm.
pub fn euclidean(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_in_time_gives_zero() {
        let f = Separable { profile: |_t: f64| (1.0, 0.0), g: vec![1.0, -2.0] };
        let r = bochner_check(&f, &TimeGrid::new(1.0, 4).unwrap(), TauChoice::Right, &euclidean);
        assert_eq!((r.lhs, r.rhs), (0.0, 0.0));
        assert!(r.holds);
    }

    #[test]
    fn linear_in_time_closed_form() {
        // int_{I_m} (s - t_m)^2 ds = kappa^3 / 3 on each of M intervals.
        let g = vec![3.0, 4.0];
        let f = Separable { profile: |t: f64| (t, 1.0), g };
        for steps in [4, 8, 16] {
            let grid = TimeGrid::new(1.0, steps).unwrap();
            let k = grid.kappa();
            for tau in [TauChoice::Right, TauChoice::Left] {
                let r = bochner_check(&f, &grid, tau, &euclidean);
                assert!((r.lhs - 25.0 * k * k / 3.0).abs() < 1e-13);
                assert!((r.rhs - 25.0 * k * k).abs() < 1e-13);
            }
            let r = bochner_check(&f, &grid, TauChoice::Mid, &euclidean);
            assert!((r.lhs - 25.0 * k * k / 12.0).abs() < 1e-13);
        }
    }

    #[test]
    fn sine_profile_holds() {
        let f = Separable { profile: |t: f64| ((2.0 * PI * t).sin(), 2.0 * PI * (2.0 * PI * t).cos()), g: vec![1.0] };
        for steps in [4, 8, 16] {
            let r = bochner_check(&f, &TimeGrid::new(1.0, steps).unwrap(), TauChoice::Right, &euclidean);
            assert!(r.holds && r.ratio() <= 1.0);
        }
    }
}
