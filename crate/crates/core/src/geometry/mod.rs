//! Cones, canonical domains, stratified model domains, and the staged
//! ε-covering with its partition of unity.

mod cone;
mod covering;
mod strata;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cone::{dual_cone, Cone, DUAL_CONVENTION};
pub use covering::{build_covering, partition_of_unity, partition_of_unity_on, Ball, Covering, PartitionOfUnity};
pub use strata::{stratify, stratify_model, AxisState, Frame, Model, Stratification, Stratum};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("degenerate cone: {0}")]
    DegenerateCone(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("unsupported model `{0}` (expected cube, square or wedge2d)")]
    UnsupportedModel(String),
    #[error("invalid covering radius: {0}")]
    InvalidRadius(String),
    #[error("point {point:?} is not covered by any ball")]
    Coverage { point: Vec<f64> },
    #[error("partition of unity undefined: grid point {point:?} lies outside every ball")]
    DivisionByZero { point: Vec<f64> },
    #[error(transparent)]
    Grid(#[from] crate::lattice::GridError),
}

/// Model domain for a neighbourhood of a point: `ℝ^m`, the half-space
/// `x_m > 0`, or the wedge `ℝ^k × C^{m-k}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CanonicalDomain {
    FullSpace { dim: usize },
    HalfSpace { dim: usize },
    Wedge { dim: usize, k: usize, cone: Cone },
}

impl CanonicalDomain {
    pub fn wedge(dim: usize, k: usize, cone: Cone) -> Result<Self, GeometryError> {
        if dim < 2 || k + 2 > dim {
            return Err(GeometryError::Unsupported(format!(
                "wedge needs 0 <= k <= m-2, got k = {k}, m = {dim}"
            )));
        }
        if cone.dim() != dim - k {
            return Err(GeometryError::Unsupported(format!(
                "wedge cone has dimension {}, expected {}",
                cone.dim(),
                dim - k
            )));
        }
        cone.facet_normals()?;
        Ok(CanonicalDomain::Wedge { dim, k, cone })
    }

    pub fn dim(&self) -> usize {
        match self {
            CanonicalDomain::FullSpace { dim }
            | CanonicalDomain::HalfSpace { dim }
            | CanonicalDomain::Wedge { dim, .. } => *dim,
        }
    }

    /// Closed membership: the half-space includes `x_m = 0`, the wedge its faces.
    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            CanonicalDomain::FullSpace { .. } => true,
            CanonicalDomain::HalfSpace { dim } => x[dim - 1] >= 0.0,
            CanonicalDomain::Wedge { k, cone, .. } => cone.contains(&x[*k..], 0.0).unwrap_or(false),
        }
    }

    /// The conjugate cone in the normal variables, if the domain has a boundary.
    pub fn dual_cone(&self) -> Result<Option<Cone>, GeometryError> {
        match self {
            CanonicalDomain::FullSpace { .. } => Ok(None),
            CanonicalDomain::HalfSpace { .. } => Ok(Some(Cone::first_orthant(1)?)),
            CanonicalDomain::Wedge { cone, .. } => Ok(Some(dual_cone(cone)?)),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CanonicalDomain::FullSpace { .. } => "full-space",
            CanonicalDomain::HalfSpace { .. } => "half-space",
            CanonicalDomain::Wedge { .. } => "wedge",
        }
    }
}
