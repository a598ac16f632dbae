//! Manufactured solutions, discretization errors, convergence studies and
//! numeric checks of the discrete Gronwall and Bochner inequalities.

mod bochner;
mod errors;
mod gronwall;
mod manufactured;
mod quasinorm;
mod residual;
mod study;

pub use bochner::{bochner_check, euclidean, BochnerReport, Separable, TauChoice, TimeFunction, POINTS_PER_INTERVAL};
pub use errors::{error_record, ErrorRecord};
pub use gronwall::{gronwall_check, harvest_gronwall, GronwallData, GronwallReport};
pub use manufactured::{forcing_from, Forcing, ManufacturedProblem, ManufacturedSolution, Snapshot, TimeProfile};
pub use quasinorm::{quasi_norm_suite, QuasiNormReport};
pub use residual::{gate_rule, weak_residual_gate, WeakResidualReport, GATE_SUBDIVISIONS};
pub use study::{
    convergence_study, eoc, least_squares_rate, run_manufactured, temporal_study, LevelResult, StudyConfig, StudyError,
    StudyReport, TemporalRow, P_EXPERIMENTAL, STUDY_CSV_HEADER,
};

/// `manufactured_default` with the only supported profile.
pub fn manufactured_default() -> ManufacturedSolution {
    ManufacturedSolution::smooth_periodic()
}
