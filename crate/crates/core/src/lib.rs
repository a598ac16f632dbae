//! Finite element solver and verification harness for unsteady incompressible
//! flow of shear-thinning fluids whose extra stress has `(p, delta)`-structure.
//!
//! The crate is organised bottom-up:
//!
//! * [`pstructure`]: stress, `F`-map and (shifted) N-functions.
//! * [`mesh`]: simplicial meshes, uniform refinement and quality measures.
//! * [`fespace`]: quadrature, finite element spaces, discrete fields and the
//!   divergence-preserving projection.
//! * [`assembly`]: sparse assembly of every term of the time-discrete scheme.
//! * [`stepper`]: the semi-implicit backward Euler loop with a Newton solver.
//! * [`verification`]: manufactured solutions, error quantities, rate studies
//!   and numeric checkers for the discrete Gronwall and Bochner inequalities.

pub mod assembly;
pub mod fespace;
pub mod linalg;
pub mod mesh;
pub mod pstructure;
pub mod stepper;
pub mod verification;

pub use pstructure::{StressModel, SymTensor};
