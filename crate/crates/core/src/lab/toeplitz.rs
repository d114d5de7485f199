use std::collections::BTreeSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::{DiscreteOperator, Provenance};
use super::space::DiscreteSobolevSpace;
use super::LabError;
use crate::laurent::LaurentPoly;

pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// `rows × cols` section of the Toeplitz matrix with entry `(i, j) = a_{i-j}`.
pub fn toeplitz_matrix(a: &LaurentPoly, rows: usize, cols: usize) -> DMatrix<Complex64> {
    DMatrix::from_fn(rows, cols, |i, j| a.coeff(i as i64 - j as i64))
}

/// Square section `T_N(a)`.
pub fn toeplitz_sections(a: &LaurentPoly, n: usize) -> Result<DiscreteOperator, LabError> {
    let band = a.negative_width().max(a.positive_width());
    if n <= 2 * band {
        return Err(LabError::Size(format!("N = {n} must exceed twice the bandwidth {band}")));
    }
    DiscreteOperator::dense(
        toeplitz_matrix(a, n, n),
        DiscreteSobolevSpace::sequence(n),
        DiscreteSobolevSpace::sequence(n),
        Provenance::new(format!("Toeplitz section N = {n}, entry (i,j) = a_(i-j)")),
    )
}

/// Tall section `T(a) P_N`: the first `N` columns of the semi-infinite
/// operator together with every row they reach, `(N + q) × N`.
pub fn tall_section(a: &LaurentPoly, n: usize) -> DMatrix<Complex64> {
    toeplitz_matrix(a, n + a.positive_width(), n)
}

/// One component of an index computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexEntry {
    pub k: usize,
    pub dim_ker: usize,
    pub dim_coker: usize,
    pub index: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IndexReport {
    pub components: Vec<IndexEntry>,
    pub total_ker: usize,
    pub total_coker: usize,
    pub total: i64,
}

/// Kernel vectors of the block-diagonal tall section: singular values below
/// `rank_tol · σ_max` (columns minus numerical rank). The singular values of
/// a block-diagonal matrix are those of its blocks taken together, so each
/// block is decomposed on its own.
fn small_singular_count(blocks: &[DMatrix<Complex64>], rank_tol: f64) -> usize {
    let sv: Vec<f64> = blocks.iter().flat_map(|b| b.singular_values().iter().copied().collect::<Vec<_>>()).collect();
    let max = sv.iter().cloned().fold(0.0, f64::max);
    let rank = sv.iter().filter(|&&s| s > rank_tol * max).count();
    blocks.iter().map(|b| b.ncols()).sum::<usize>() - rank
}

fn kernel_dim(symbols: &[LaurentPoly], n: usize, rank_tol: f64) -> Result<usize, LabError> {
    let counts: Vec<usize> = [n, 2 * n]
        .iter()
        .map(|&size| {
            let blocks: Vec<DMatrix<Complex64>> = symbols.iter().map(|a| tall_section(a, size)).collect();
            small_singular_count(&blocks, rank_tol)
        })
        .collect();
    if counts[0] != counts[1] {
        return Err(LabError::UnstableRank { n, counts });
    }
    Ok(counts[0])
}

fn check_symbols(symbols: &[LaurentPoly], n: usize) -> Result<(), LabError> {
    for a in symbols {
        if a.is_zero() {
            return Err(LabError::Size("zero symbol".into()));
        }
        let band = a.negative_width().max(a.positive_width());
        if n <= 2 * band {
            return Err(LabError::Size(format!("N = {n} must exceed twice the bandwidth {band}")));
        }
        let min = a.min_modulus_on_circle(crate::laurent::CIRCLE_SAMPLES);
        if !(min > crate::symbol::TOL_ELL) {
            return Err(LabError::Laurent(crate::laurent::LaurentError::ZeroOnCircle { min_modulus: min }));
        }
    }
    Ok(())
}

/// Index of the semi-infinite Toeplitz operator `T(a)` on `ℓ²(ℕ)`.
///
/// Kernel vectors decay geometrically, so the tall section carries singular
/// values of size `ρ^N` for each one; the cokernel is the kernel of `T(ã)`
/// with `ã_j = conj(a_{-j})`. Counts must agree at `N` and `2N`.
pub fn numerical_index(a: &LaurentPoly, n: usize, rank_tol: f64, k: usize) -> Result<IndexEntry, LabError> {
    numerical_index_block(std::slice::from_ref(a), n, rank_tol, k)
}

/// Index of the direct sum `⊕ T(a_i)`, computed on the block-diagonal section.
pub fn numerical_index_block(symbols: &[LaurentPoly], n: usize, rank_tol: f64, k: usize) -> Result<IndexEntry, LabError> {
    if symbols.is_empty() {
        return Err(LabError::Size("no symbols".into()));
    }
    check_symbols(symbols, n)?;
    let dim_ker = kernel_dim(symbols, n, rank_tol)?;
    let adj: Vec<LaurentPoly> = symbols.iter().map(LaurentPoly::adjoint).collect();
    let dim_coker = kernel_dim(&adj, n, rank_tol)?;
    Ok(IndexEntry {
        k,
        dim_ker,
        dim_coker,
        index: dim_ker as i64 - dim_coker as i64,
    })
}

/// Sum of component indices; components must carry distinct `k`.
pub fn aggregate_index(entries: &[IndexEntry]) -> Result<IndexReport, LabError> {
    let mut seen = BTreeSet::new();
    for e in entries {
        if !seen.insert(e.k) {
            return Err(LabError::DuplicateComponent { k: e.k });
        }
    }
    Ok(IndexReport {
        components: entries.to_vec(),
        total_ker: entries.iter().map(|e| e.dim_ker).sum(),
        total_coker: entries.iter().map(|e| e.dim_coker).sum(),
        total: entries.iter().map(|e| e.index).sum(),
    })
}
