//! Operator-symbol calculus on stratified model domains.

// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod dsl;
pub mod symbol;
pub mod geometry;
pub mod lattice;
pub mod laurent;
pub mod factorization;
pub mod lab;
pub mod pipeline;
