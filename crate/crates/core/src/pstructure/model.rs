use serde::{Deserialize, Serialize};

use super::tensor::{StressJacobian, SymTensor};
use super::PStructureError;

/// Below this norm a symmetric gradient counts as zero for derivative purposes.
pub const DEGENERATE_THRESHOLD: f64 = 1e-150;

/// Measured surrogates for the structure constants of the stress.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Characteristics {
    /// Smallest observed `dS(P)[Q].Q / ((delta+|P|)^(p-2) |Q|^2)`.
    pub c0: f64,
    /// Largest observed `|dS_ijkl(P)| / (delta+|P|)^(p-2)`.
    pub c1: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Power-law stress `S(P) = (delta + |P^sym|)^(p-2) P^sym` with `1 < p <= 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressModel {
    p: f64,
    delta: f64,
    dim: usize,
    characteristics: Option<Characteristics>,
}

impl StressModel {
    pub fn new(p: f64, delta: f64, dim: usize) -> Result<Self, PStructureError> {
        if !(p > 1.0 && p <= 2.0) {
            return Err(PStructureError::InvalidModel(format!("p must lie in (1,2], got {p}")));
        }
        if !(delta >= 0.0) || !delta.is_finite() {
            return Err(PStructureError::InvalidModel(format!("delta must be >= 0, got {delta}")));
        }
        if dim != 2 && dim != 3 {
            return Err(PStructureError::InvalidModel(format!("dimension must be 2 or 3, got {dim}")));
        }
        Ok(StressModel { p, delta, dim, characteristics: None })
    }

    #[inline]
    pub fn p(&self) -> f64 {
        self.p
    }

    #[inline]
    pub fn delta(&self) -> f64 {
        self.delta
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Conjugate exponent `p' = p / (p - 1)`.
    pub fn conjugate_exponent(&self) -> f64 {
        self.p / (self.p - 1.0)
    }

    pub fn characteristics(&self) -> Option<Characteristics> {
        self.characteristics
    }

    /// Returns a copy with `c0`/`c1` measured over random tensor pairs.
    pub fn with_measured_characteristics(mut self, samples: usize, seed: u64) -> Self {
        self.characteristics = Some(super::equivalence::measure_characteristics(&self, samples, seed));
        self
    }

    /// Same exponent with a different shift.
    pub fn with_delta(&self, delta: f64) -> Result<Self, PStructureError> {
        StressModel::new(self.p, delta, self.dim)
    }

    /// `(delta + t)^exponent * factor`, with the value 0 whenever `factor == 0`.
    #[inline]
    fn weighted(&self, t: f64, exponent: f64, factor: f64) -> f64 {
        if factor == 0.0 {
            0.0
        } else {
            (self.delta + t).powf(exponent) * factor
        }
    }

    /// Extra stress `S(P)`. Takes the continuous limit `S(0) = 0`.
    #[inline]
    pub fn stress(&self, p: &SymTensor) -> SymTensor {
        let n = p.norm();
        if n == 0.0 {
            return SymTensor::zero(p.dim());
        }
        self.weighted(n, self.p - 2.0, 1.0) * *p
    }

    /// `F(P) = (delta + |P^sym|)^((p-2)/2) P^sym`.
    #[inline]
    pub fn f_map(&self, p: &SymTensor) -> SymTensor {
        let n = p.norm();
        if n == 0.0 {
            return SymTensor::zero(p.dim());
        }
        self.weighted(n, 0.5 * (self.p - 2.0), 1.0) * *p
    }

    /// Derivative of [`stress`](Self::stress) at `P`.
    ///
    /// Fails at the degenerate point `delta = 0`, `P^sym = 0` for `p < 2`.
    pub fn stress_jacobian(&self, p: &SymTensor) -> Result<StressJacobian, PStructureError> {
        let n = p.norm();
        if self.delta == 0.0 && n < DEGENERATE_THRESHOLD && self.p < 2.0 {
            return Err(PStructureError::Degenerate { norm: n });
        }
        Ok(self.jacobian_with_shift(p, self.delta))
    }

    /// Derivative of the stress with the shift replaced by `shift`.
    ///
    /// Used for Newton matrices where `delta = 0` would make the derivative
    /// unbounded at `P = 0`; callers pass `max(delta, floor)`.
    pub fn jacobian_with_shift(&self, p: &SymTensor, shift: f64) -> StressJacobian {
        let n = p.norm();
        let base = shift + n;
        let scale = base.powf(self.p - 2.0);
        let rank_one = if n == 0.0 || self.p == 2.0 {
            0.0
        } else {
            (self.p - 2.0) * base.powf(self.p - 3.0) / n
        };
        StressJacobian { scale, rank_one, dir: *p }
    }

    /// Frozen viscosity `(shift + |P|)^(p-2)` used by Picard iterations.
    #[inline]
    pub fn secant_viscosity(&self, p: &SymTensor, shift: f64) -> f64 {
        (shift + p.norm()).powf(self.p - 2.0)
    }

    /// `phi(t)` with `phi'(t) = (delta + t)^(p-2) t`.
    pub fn phi(&self, t: f64) -> Result<f64, PStructureError> {
        super::nfunction::ShiftedNFunction::new(*self, 0.0)?.value(t)
    }

    pub fn phi_prime(&self, t: f64) -> f64 {
        if t == 0.0 {
            0.0
        } else {
            (self.delta + t).powf(self.p - 2.0) * t
        }
    }

    /// `phi''(t) = (delta + t)^(p-3) ((p-1) t + delta)`; infinite at `t = delta = 0` for `p < 2`.
    pub fn phi_second(&self, t: f64) -> f64 {
        let base = self.delta + t;
        if self.p == 2.0 {
            return 1.0;
        }
        base.powf(self.p - 3.0) * ((self.p - 1.0) * t + self.delta)
    }
}
