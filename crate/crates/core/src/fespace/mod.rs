//! Finite element spaces on triangle meshes.
//!
//! Velocity spaces use [`ElementKind::P1Bubble`] (the default, MINI) or
//! [`ElementKind::P2`] (Taylor-Hood) with two components; pressure spaces use
//! [`ElementKind::P1`] with one component.

mod element;
mod field;
mod projection;
mod quadrature;
mod space;

pub use element::{CellGeometry, ElementKind};
pub use field::{interpolate, interpolate_scalar, DiscreteField};
pub use projection::{div_preserving_projection, inf_sup_constant, FnVector, VectorFunction};
pub use quadrature::{gauss_legendre, gauss_legendre_unit, quadrature_for, QuadratureRule, MAX_DEGREE};
pub use space::{FESpace, Tabulation};

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::linalg::LinearSolveError;
use crate::mesh::Mesh;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum FeError {
    #[error("element {kind:?} is not supported in dimension {dim}")]
    UnsupportedElement { kind: ElementKind, dim: usize },
    #[error("no quadrature rule of degree {degree} in dimension {dim}")]
    UnsupportedQuadrature { dim: usize, degree: usize },
    #[error("point ({x}, {y}) is not inside any cell")]
    PointNotFound { x: f64, y: f64 },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("saddle point solve failed: {0}")]
    Solve(#[from] LinearSolveError),
}

/// Velocity/pressure pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ElementPair {
    #[default]
    Mini,
    TaylorHood,
}

impl ElementPair {
    pub fn velocity_kind(self) -> ElementKind {
        match self {
            ElementPair::Mini => ElementKind::P1Bubble,
            ElementPair::TaylorHood => ElementKind::P2,
        }
    }
}

/// Velocity and pressure spaces on one mesh.
#[derive(Debug, Clone)]
pub struct Spaces {
    pub velocity: Arc<FESpace>,
    pub pressure: Arc<FESpace>,
}

impl Spaces {
    pub fn new(mesh: Arc<Mesh>, pair: ElementPair) -> Result<Self, FeError> {
        Ok(Spaces {
            velocity: Arc::new(FESpace::new(mesh.clone(), pair.velocity_kind(), 2)?),
            pressure: Arc::new(FESpace::new(mesh, ElementKind::P1, 1)?),
        })
    }

    pub fn mesh(&self) -> &Arc<Mesh> {
        self.velocity.mesh()
    }
}
