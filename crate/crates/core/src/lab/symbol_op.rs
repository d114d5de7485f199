use nalgebra::DMatrix;
use num_complex::Complex64;

use super::operator::{DiscreteOperator, OperatorKind, Provenance};
use super::space::DiscreteSobolevSpace;
use super::LabError;
use crate::symbol::Symbol;

/// Largest lattice handled by [`quantize_dense`].
pub const DENSE_QUANTIZATION_LIMIT: usize = 4096;

fn check_spaces(s: &Symbol, src: &DiscreteSobolevSpace, dst: &DiscreteSobolevSpace) -> Result<(), LabError> {
    let grid = src
        .grid()
        .ok_or_else(|| LabError::Dimension("symbol operators need a lattice space".into()))?;
    if !src.same_basis(dst) {
        return Err(LabError::Dimension("source and target lattices differ".into()));
    }
    if grid.dim() != s.dim() {
        return Err(LabError::Dimension(format!(
            "symbol has dimension {}, lattice {}",
            s.dim(),
            grid.dim()
        )));
    }
    if (dst.s_order - (src.s_order - s.order())).abs() > 1e-12 {
        return Err(LabError::OrderMismatch {
            src: src.s_order,
            dst: dst.s_order,
            alpha: s.order(),
        });
    }
    Ok(())
}

/// Fourier multiplier `u ↦ F^{-1}[a(x0, ·) F u]` on the torus, mapping
/// `H^s → H^{s-α}`.
pub fn discretize_symbol_op(
    s: &Symbol,
    x0: &[f64],
    src: &DiscreteSobolevSpace,
    dst: &DiscreteSobolevSpace,
) -> Result<DiscreteOperator, LabError> {
    check_spaces(s, src, dst)?;
    if x0.len() != s.dim() {
        return Err(LabError::Dimension(format!("x0 must have length {}", s.dim())));
    }
    let grid = src.grid().expect("checked above");
    let vals = grid
        .frequencies()
        .map(|xi| s.eval_real(x0, &xi))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(DiscreteOperator {
        kind: OperatorKind::Multiplier(vals),
        src: src.clone(),
        dst: dst.clone(),
        provenance: Provenance::new(format!("frozen Fourier multiplier at x0 = {x0:?}"))
            .with_symbol(s.expr().to_string()),
    })
}

/// Dense quantization `A[x, y] = N^{-m} Σ_ξ a(x, ξ) e^{-i(x-y)ξ}` with the
/// symbol evaluated at the output point, for small lattices.
pub fn quantize_dense(
    s: &Symbol,
    src: &DiscreteSobolevSpace,
    dst: &DiscreteSobolevSpace,
) -> Result<DiscreteOperator, LabError> {
    check_spaces(s, src, dst)?;
    let grid = src.grid().expect("checked above");
    let n = grid.len();
    if n > DENSE_QUANTIZATION_LIMIT {
        return Err(LabError::Size(format!(
            "dense quantization limited to {DENSE_QUANTIZATION_LIMIT} points, got {n}"
        )));
    }
    let freqs: Vec<Vec<f64>> = grid.frequencies().collect();
    let inv = 1.0 / n as f64;
    let mut m = DMatrix::zeros(n, n);
    let mut row = vec![Complex64::new(0.0, 0.0); n];
    for xi_idx in 0..n {
        let x = grid.point(xi_idx);
        let rel = grid.multi_index(xi_idx);
        for (k, xi) in freqs.iter().enumerate() {
            // index phase x·ξ with x measured from the origin
            let phase: f64 = rel.iter().zip(xi).map(|(&j, &f)| j as f64 * grid.h() * f).sum();
            row[k] = s.eval_real(&x, xi)? * Complex64::from_polar(inv, -phase);
        }
        grid.forward(&mut row);
        for j in 0..n {
            m[(xi_idx, j)] = row[j];
        }
    }
    Ok(DiscreteOperator {
        kind: OperatorKind::Dense(m),
        src: src.clone(),
        dst: dst.clone(),
        provenance: Provenance::new("dense quantization").with_symbol(s.expr().to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeGrid;

    fn spaces(dim: usize, n: usize, h: f64, s: f64, alpha: f64) -> (DiscreteSobolevSpace, DiscreteSobolevSpace) {
        let g = LatticeGrid::new(dim, n, h).unwrap();
        (DiscreteSobolevSpace::lattice(g.clone(), s), DiscreteSobolevSpace::lattice(g, s - alpha))
    }

    #[test]
    fn unit_symbol_is_identity() {
        let s = Symbol::parse("1", 1, 0.0).unwrap();
        let (a, b) = spaces(1, 8, 1.0, 0.0, 0.0);
        let op = discretize_symbol_op(&s, &[0.0], &a, &b).unwrap();
        let d = op.to_dense();
        assert!((d - DMatrix::<Complex64>::identity(8, 8)).norm() < 1e-14);
    }

    #[test]
    fn laplacian_symbol_against_dft_matrices() {
        let s = Symbol::parse("abs2(k)", 1, 2.0).unwrap();
        let (a, b) = spaces(1, 8, 1.0, 0.0, 2.0);
        let op = discretize_symbol_op(&s, &[0.0], &a, &b).unwrap();
        let g = a.grid().unwrap();
        let n = 8;
        let f = DMatrix::from_fn(n, n, |k, j| Complex64::from_polar(1.0, std::f64::consts::TAU * (k * j) as f64 / n as f64));
        let finv = f.adjoint() / Complex64::new(n as f64, 0.0);
        let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |k, _| {
            let xi = g.axis_frequency(k);
            Complex64::new(xi * xi, 0.0)
        }));
        let expect = finv * diag * f;
        assert!((op.to_dense() - &expect).norm() < 1e-12 * expect.norm().max(1.0));
    }

    #[test]
    fn freezing_drops_x_dependence() {
        let s1 = Symbol::parse("normx2(x) + abs2(k)", 2, 2.0).unwrap();
        let s2 = Symbol::parse("abs2(k)", 2, 2.0).unwrap();
        let (a, b) = spaces(2, 8, 0.5, 1.0, 2.0);
        let o1 = discretize_symbol_op(&s1, &[0.0, 0.0], &a, &b).unwrap();
        let o2 = discretize_symbol_op(&s2, &[0.0, 0.0], &a, &b).unwrap();
        assert_eq!(o1.kind, o2.kind);
    }

    #[test]
    fn order_mismatch() {
        let s = Symbol::parse("abs2(k)", 1, 2.0).unwrap();
        let (a, _) = spaces(1, 8, 1.0, 0.0, 0.0);
        assert!(matches!(
            discretize_symbol_op(&s, &[0.0], &a, &a),
            Err(LabError::OrderMismatch { .. })
        ));
    }

    #[test]
    fn multiplier_algebra_and_covariance() {
        let s1 = Symbol::parse("(1 + abs2(k))^(1/2)", 2, 1.0).unwrap();
        let s2 = Symbol::parse("k1 + 2*i", 2, 1.0).unwrap();
        let (a, b) = spaces(2, 8, 0.3, 0.0, 1.0);
        let c = b.with_order(-2.0);
        let o1 = discretize_symbol_op(&s1, &[0.0, 0.0], &b, &c).unwrap();
        let o2 = discretize_symbol_op(&s2, &[0.0, 0.0], &a, &b).unwrap();
        let o12 = discretize_symbol_op(&s1.product(&s2), &[0.0, 0.0], &a, &c).unwrap();
        let lhs = o1.compose(&o2).unwrap().to_dense();
        assert!((lhs - o12.to_dense()).norm() < 1e-10 * o12.to_dense().norm());
        let norms: Vec<f64> = [-1.0, 0.0, 2.5]
            .iter()
            .map(|&s| {
                let (p, q) = spaces(2, 8, 0.3, s, 1.0);
                discretize_symbol_op(&s1, &[0.0, 0.0], &p, &q).unwrap().norm()
            })
            .collect();
        assert!((norms[0] - norms[1]).abs() < 1e-10 && (norms[1] - norms[2]).abs() < 1e-10);
    }

    #[test]
    fn dense_quantization_of_frozen_symbol() {
        let s = Symbol::parse("(1 + abs2(k))^(1/2) + i*k2", 2, 1.0).unwrap();
        let (a, b) = spaces(2, 8, 0.4, 1.0, 1.0);
        let q = quantize_dense(&s, &a, &b).unwrap().to_dense();
        let m = discretize_symbol_op(&s, &[0.0, 0.0], &a, &b).unwrap().to_dense();
        assert!((q - &m).norm() < 1e-10 * m.norm());
    }
}
