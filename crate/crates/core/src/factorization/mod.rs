//! Factorization indices on boundary strata and the Fredholm criterion
//! `|æ_k(x) - s| < 1/2`.
//!
//! Two computable routes to the index are provided. On half-space strata the
//! index follows from the winding of the reduced symbol along the inward
//! normal line; on wedge strata it is read off the growth of a user-supplied
//! wave factor `a_≠` inside its tube domain.

mod fredholm;
mod wave;
mod winding;

use thiserror::Error;

pub use crate::laurent::{laurent_winding, LaurentError, LaurentPoly};
pub use fredholm::{
    check_fredholm_condition, factorize_stratum, factorize_stratification, FactorizationDiagnostics,
    FactorizationMethod, FactorizationOptions, FactorizationReport, FredholmVerdict, StratumVerdict,
};
pub use wave::{
    estimate_wave_index, validate_wave_factors, FactorSupport, GrowthCheck, ProductCheck, RayFit,
    SupportCheck, WaveFactorCandidate, WaveFailure, WaveIndexEstimate, WaveOptions, WaveValidation,
};
pub use winding::{winding_along, winding_index, winding_report, WindingOptions, WindingReport};

/// Convention recorded in every report.
pub const AE_CONVENTION: &str =
    "ae = alpha/2 - w, w = (1/2pi) * increment of arg a(x0, xi', t)(1+|xi|^2)^(-alpha/2) for t from -inf to +inf along the inward normal";

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FactorizationError {
    #[error("reduced symbol vanishes on the normal line at t = {t} (|r| = {modulus:e})")]
    NonEllipticOnLine { t: f64, modulus: f64 },
    #[error("phase jump of {jump} rad between samples at t = {t}; refine the quadrature")]
    BranchJump { t: f64, jump: f64 },
    #[error(transparent)]
    Laurent(#[from] LaurentError),
    #[error("wave index slopes disagree across rays: {slopes:?}")]
    SlopeDisagreement { slopes: Vec<f64> },
    #[error("no factorization report for stratum `{label}`")]
    MissingStratumReport { label: String },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("evaluation failed: {0}")]
    Eval(#[from] crate::dsl::EvalError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Grid(#[from] crate::lattice::GridError),
    #[error("product identity fails: max relative error {max_rel_error:e}")]
    ProductMismatch { max_rel_error: f64 },
    #[error("growth violation for {factor} on ray {ray:?}: slope {slope}, expected {expected}")]
    GrowthViolation {
        factor: String,
        ray: Vec<f64>,
        slope: f64,
        expected: f64,
    },
    #[error("support leak for {factor}: {fraction:e} of the mass lies outside the cone")]
    SupportLeak { factor: String, fraction: f64 },
}
