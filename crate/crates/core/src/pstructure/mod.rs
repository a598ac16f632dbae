//! Algebra of stresses with `(p, delta)`-structure.
//!
//! The stress is fixed to `S(P) = (delta + |P^sym|)^(p-2) P^sym`, which
//! derives from the potential `phi(|P^sym|)` with
//! `phi'(t) = (delta + t)^(p-2) t`. Everything here is a pure function of its
//! inputs and works for `d = 2` and `d = 3`.

mod equivalence;
mod model;
mod nfunction;
mod tensor;

pub use equivalence::{
    check_equivalences, equivalence_envelope, quasi_norm_lower_bound_ratio, random_sym_tensor, EnvelopeReport,
    EquivalenceReport, LowerBoundRatio, DEFAULT_SEED, ENVELOPE_CSV_HEADER, RATIO_NAMES,
};
pub use model::{Characteristics, StressModel, DEGENERATE_THRESHOLD};
pub use nfunction::ShiftedNFunction;
pub use tensor::{StressJacobian, SymTensor};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PStructureError {
    #[error("invalid stress model: {0}")]
    InvalidModel(String),
    #[error("{what} must be nonnegative, got {value}")]
    Domain { what: &'static str, value: f64 },
    #[error("stress derivative undefined at |P^sym| = {norm:e} with delta = 0")]
    Degenerate { norm: f64 },
    #[error("conjugate root solve for s = {s} did not converge after {iterations} iterations")]
    NonConvergence { s: f64, iterations: usize },
}

/// `phi(t)` for the unshifted N-function of `model`.
pub fn phi(model: &StressModel, t: f64) -> Result<f64, PStructureError> {
    model.phi(t)
}

/// `phi_a(t)`.
pub fn phi_shifted(sn: &ShiftedNFunction, t: f64) -> Result<f64, PStructureError> {
    sn.value(t)
}

/// `(phi_a)^*(s)`.
pub fn phi_shifted_conjugate(sn: &ShiftedNFunction, s: f64) -> Result<f64, PStructureError> {
    sn.conjugate(s)
}
