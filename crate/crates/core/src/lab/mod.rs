//! Lattice realizations: frozen symbols as Fourier multipliers in weighted
//! norms, paired operators, Toeplitz sections and their indices, locality
//! defects, and partition-of-unity assembly.

mod assembly;
pub mod io;
mod locality;
mod operator;
mod paired;
mod space;
mod symbol_op;
mod toeplitz;

use thiserror::Error;

pub use assembly::{
    assemble_operator, assembly_convergence, assembly_grid, assembly_grid_with_spacing, domain_partition, in_unit_box, essential_norm_proxy, frozen_family, high_frequency_projector,
    ConvergenceRow, ConvergenceTable, PatchFamily, CONVERGENCE_SLACK,
};
pub use locality::{locality_defect, separation_ladder, support_separation, torus_bump, LadderStep};
pub use operator::{DiscreteOperator, OperatorKind, Patch, Provenance};
pub use paired::{
    build_paired_operator, classify, compression, condition_number, domain_projector, paired_equivalence_suite,
    paired_from_projector, random_paired_case, Invertibility, LatticeProjector, PairedCase, INVERTIBLE_COND,
    SINGULAR_COND,
};
pub use space::{Basis, DiscreteSobolevSpace};
pub use symbol_op::{discretize_symbol_op, quantize_dense, DENSE_QUANTIZATION_LIMIT};
pub use toeplitz::{
    aggregate_index, numerical_index, numerical_index_block, tall_section, toeplitz_matrix, toeplitz_sections,
    IndexEntry, IndexReport, DEFAULT_RANK_TOL,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("target order {dst} must equal source order {src} minus symbol order {alpha}")]
    OrderMismatch { src: f64, dst: f64, alpha: f64 },
    #[error("domain splits the lattice into {inside} of {total} points; both parts must be nonempty")]
    EmptyDomain { inside: usize, total: usize },
    #[error("kernel count changes between N = {n} and 2N: {counts:?}")]
    UnstableRank { n: usize, counts: Vec<usize> },
    #[error("supports are {separation} apart, need at least {required}")]
    SupportOverlap { separation: f64, required: f64 },
    #[error("no operator for partition center {center:?}")]
    MissingPatch { center: Vec<f64> },
    #[error("duplicate index component k = {k}")]
    DuplicateComponent { k: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("size: {0}")]
    Size(String),
    #[error("evaluation failed: {0}")]
    Eval(#[from] crate::dsl::EvalError),
    #[error(transparent)]
    Grid(#[from] crate::lattice::GridError),
    #[error(transparent)]
    Geometry(#[from] crate::geometry::GeometryError),
    #[error(transparent)]
    Laurent(#[from] crate::laurent::LaurentError),
    #[error("io: {0}")]
    Io(String),
}
