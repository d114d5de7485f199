use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::space::DiscreteSobolevSpace;
use super::LabError;

/// Where an operator came from.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub symbol: Option<String>,
    pub domain: Option<String>,
    pub construction: String,
}

impl Provenance {
    pub fn new(construction: impl Into<String>) -> Self {
        Provenance {
            construction: construction.into(),
            ..Default::default()
        }
    }

    pub fn with_symbol(mut self, symbol: impl Into<String>) -> Self {
        self.symbol = Some(symbol.into());
        self
    }

    pub fn with_domain(mut self, domain: impl Into<String>) -> Self {
        self.domain = Some(domain.into());
        self
    }
}

/// One `f · A · g` term of an assembled operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Patch {
    pub f: Vec<f64>,
    pub op: DiscreteOperator,
    pub g: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    Dense(DMatrix<Complex64>),
    /// Fourier multiplier, values over the dual grid in frequency index order.
    Multiplier(Vec<Complex64>),
    /// Pointwise multiplication on the lattice.
    Multiplication(Vec<Complex64>),
    /// `Σ_j f_j · A_j · g_j`.
    Assembled(Vec<Patch>),
    /// `Σ c_i A_i` over a common pair of spaces.
    Combination(Vec<(Complex64, DiscreteOperator)>),
    /// `A_1 A_2 ⋯ A_n` (rightmost applied first).
    Product(Vec<DiscreteOperator>),
}

/// Linear map between discrete Sobolev spaces, stored densely or in a
/// structured form that is applied matrix-free.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteOperator {
    pub kind: OperatorKind,
    pub src: DiscreteSobolevSpace,
    pub dst: DiscreteSobolevSpace,
    pub provenance: Provenance,
}

const POWER_MAX_ITER: usize = 500;
const POWER_REL_TOL: f64 = 1e-9;
const DENSE_SVD_LIMIT: usize = 600;

impl DiscreteOperator {
    pub fn dense(
        m: DMatrix<Complex64>,
        src: DiscreteSobolevSpace,
        dst: DiscreteSobolevSpace,
        provenance: Provenance,
    ) -> Result<Self, LabError> {
        if m.ncols() != src.len() || m.nrows() != dst.len() {
            return Err(LabError::Dimension(format!(
                "matrix is {}x{}, spaces need {}x{}",
                m.nrows(),
                m.ncols(),
                dst.len(),
                src.len()
            )));
        }
        Ok(DiscreteOperator {
            kind: OperatorKind::Dense(m),
            src,
            dst,
            provenance,
        })
    }

    /// Identity on `space`, stored as the unit multiplier.
    pub fn identity(space: &DiscreteSobolevSpace) -> Self {
        let n = space.len();
        let kind = if space.grid().is_some() {
            OperatorKind::Multiplication(vec![Complex64::new(1.0, 0.0); n])
        } else {
            OperatorKind::Dense(DMatrix::identity(n, n))
        };
        DiscreteOperator {
            kind,
            src: space.clone(),
            dst: space.clone(),
            provenance: Provenance::new("identity"),
        }
    }

    /// Pointwise multiplication by real `values` on `space`.
    pub fn multiplication(values: &[f64], space: &DiscreteSobolevSpace) -> Result<Self, LabError> {
        if values.len() != space.len() {
            return Err(LabError::Dimension(format!(
                "{} values for a space of size {}",
                values.len(),
                space.len()
            )));
        }
        Ok(DiscreteOperator {
            kind: OperatorKind::Multiplication(values.iter().map(|&v| Complex64::new(v, 0.0)).collect()),
            src: space.clone(),
            dst: space.clone(),
            provenance: Provenance::new("multiplication"),
        })
    }

    pub fn rows(&self) -> usize {
        self.dst.len()
    }

    pub fn cols(&self) -> usize {
        self.src.len()
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = provenance;
        self
    }

    /// Same action, measured between other orders on the same bases.
    pub fn between(mut self, src_s: f64, dst_s: f64) -> Self {
        self.src = self.src.with_order(src_s);
        self.dst = self.dst.with_order(dst_s);
        self
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &DiscreteOperator) -> Result<DiscreteOperator, LabError> {
        if !self.src.same_basis(&other.dst) {
            return Err(LabError::Dimension("composition of operators on different bases".into()));
        }
        let kind = match (&self.kind, &other.kind) {
            (OperatorKind::Multiplier(a), OperatorKind::Multiplier(b)) => {
                OperatorKind::Multiplier(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            (OperatorKind::Multiplication(a), OperatorKind::Multiplication(b)) => {
                OperatorKind::Multiplication(a.iter().zip(b).map(|(x, y)| x * y).collect())
            }
            (OperatorKind::Dense(a), OperatorKind::Dense(b)) => OperatorKind::Dense(a * b),
            _ => OperatorKind::Product(vec![self.clone(), other.clone()]),
        };
        Ok(DiscreteOperator {
            kind,
            src: other.src.clone(),
            dst: self.dst.clone(),
            provenance: Provenance::new("composition"),
        })
    }

    /// `Σ c_i A_i`; all terms must share source and target bases.
    pub fn combination(terms: Vec<(Complex64, DiscreteOperator)>) -> Result<DiscreteOperator, LabError> {
        let first = terms
            .first()
            .ok_or_else(|| LabError::Dimension("empty combination".into()))?;
        let (src, dst) = (first.1.src.clone(), first.1.dst.clone());
        if terms.iter().any(|(_, t)| !t.src.same_basis(&src) || !t.dst.same_basis(&dst)) {
            return Err(LabError::Dimension("combination of operators on different bases".into()));
        }
        Ok(DiscreteOperator {
            kind: OperatorKind::Combination(terms),
            src,
            dst,
            provenance: Provenance::new("linear combination"),
        })
    }

    /// `self - other`.
    pub fn sub(&self, other: &DiscreteOperator) -> Result<DiscreteOperator, LabError> {
        DiscreteOperator::combination(vec![
            (Complex64::new(1.0, 0.0), self.clone()),
            (Complex64::new(-1.0, 0.0), other.clone()),
        ])
        .map(|d| d.with_provenance(Provenance::new("difference")))
    }

    fn check_len(&self, v: &[Complex64], n: usize) -> Result<(), LabError> {
        if v.len() != n {
            return Err(LabError::Dimension(format!("vector of length {}, expected {n}", v.len())));
        }
        Ok(())
    }

    /// `A v` in grid values.
    pub fn apply(&self, v: &[Complex64]) -> Result<Vec<Complex64>, LabError> {
        self.check_len(v, self.cols())?;
        Ok(self.apply_unchecked(v, false))
    }

    /// `A^* v` for the Euclidean pairing of grid values.
    pub fn apply_adjoint(&self, v: &[Complex64]) -> Result<Vec<Complex64>, LabError> {
        self.check_len(v, self.rows())?;
        Ok(self.apply_unchecked(v, true))
    }

    fn apply_unchecked(&self, v: &[Complex64], adjoint: bool) -> Vec<Complex64> {
        match &self.kind {
            OperatorKind::Dense(m) => {
                let x = DVector::from_column_slice(v);
                let y = if adjoint { m.adjoint() * x } else { m * x };
                y.as_slice().to_vec()
            }
            OperatorKind::Multiplier(vals) => {
                let grid = self.src.grid().expect("multipliers act on lattices");
                let mut u = v.to_vec();
                grid.forward(&mut u);
                for (x, m) in u.iter_mut().zip(vals) {
                    *x *= if adjoint { m.conj() } else { *m };
                }
                grid.inverse(&mut u);
                u
            }
            OperatorKind::Multiplication(vals) => v
                .iter()
                .zip(vals)
                .map(|(x, m)| x * if adjoint { m.conj() } else { *m })
                .collect(),
            OperatorKind::Assembled(patches) => {
                let mut out = vec![Complex64::new(0.0, 0.0); if adjoint { self.cols() } else { self.rows() }];
                for p in patches {
                    let (first, last) = if adjoint { (&p.f, &p.g) } else { (&p.g, &p.f) };
                    let w: Vec<Complex64> = v.iter().zip(first).map(|(x, a)| x * a).collect();
                    let y = p.op.apply_unchecked(&w, adjoint);
                    for ((o, y), b) in out.iter_mut().zip(y).zip(last) {
                        *o += y * b;
                    }
                }
                out
            }
            OperatorKind::Combination(terms) => {
                let mut out = vec![Complex64::new(0.0, 0.0); if adjoint { self.cols() } else { self.rows() }];
                for (c, op) in terms {
                    let c = if adjoint { c.conj() } else { *c };
                    for (o, y) in out.iter_mut().zip(op.apply_unchecked(v, adjoint)) {
                        *o += c * y;
                    }
                }
                out
            }
            OperatorKind::Product(ops) => {
                let mut u = v.to_vec();
                if adjoint {
                    for op in ops {
                        u = op.apply_unchecked(&u, true);
                    }
                } else {
                    for op in ops.iter().rev() {
                        u = op.apply_unchecked(&u, false);
                    }
                }
                u
            }
        }
    }

    /// Matrix in grid values, built column by column for structured kinds.
    pub fn to_dense(&self) -> DMatrix<Complex64> {
        if let OperatorKind::Dense(m) = &self.kind {
            return m.clone();
        }
        let (r, c) = (self.rows(), self.cols());
        let mut m = DMatrix::zeros(r, c);
        let mut e = vec![Complex64::new(0.0, 0.0); c];
        for j in 0..c {
            e[j] = Complex64::new(1.0, 0.0);
            let col = self.apply_unchecked(&e, false);
            m.column_mut(j).copy_from_slice(&col);
            e[j] = Complex64::new(0.0, 0.0);
        }
        m
    }

    /// `B = W_dst A W_src^{-1}` applied to `v`, or its adjoint.
    fn weighted_apply(&self, v: &[Complex64], adjoint: bool) -> Vec<Complex64> {
        if adjoint {
            let mut u = v.to_vec();
            self.dst.apply_weight(&mut u, 1.0);
            let mut y = self.apply_unchecked(&u, true);
            self.src.apply_weight(&mut y, -1.0);
            y
        } else {
            let mut u = v.to_vec();
            self.src.apply_weight(&mut u, -1.0);
            let mut y = self.apply_unchecked(&u, false);
            self.dst.apply_weight(&mut y, 1.0);
            y
        }
    }

    /// Operator norm `H^{s_src} → H^{s_dst}`: exact for multipliers, an SVD
    /// for small dense operators in unweighted spaces, and power iteration on
    /// `B^*B` otherwise.
    pub fn norm(&self) -> f64 {
        match &self.kind {
            OperatorKind::Multiplier(vals) if self.src.grid().is_some() => {
                let ws = self.src.weights();
                let wd = self.dst.weights();
                vals.iter()
                    .zip(ws.iter().zip(&wd))
                    .map(|(m, (a, b))| m.norm() * b / a)
                    .fold(0.0, f64::max)
            }
            OperatorKind::Multiplication(vals) if self.src.s_order == 0.0 && self.dst.s_order == 0.0 => {
                vals.iter().map(|m| m.norm()).fold(0.0, f64::max)
            }
            OperatorKind::Dense(m)
                if m.nrows().max(m.ncols()) <= DENSE_SVD_LIMIT
                    && (self.src.grid().is_none() || self.src.s_order == 0.0)
                    && (self.dst.grid().is_none() || self.dst.s_order == 0.0) =>
            {
                m.singular_values().iter().cloned().fold(0.0, f64::max)
            }
            _ => self.power_norm(),
        }
    }

    /// Largest singular value of `B` by power iteration on `B^*B` from a
    /// fixed pseudo-random start.
    pub fn power_norm(&self) -> f64 {
        let n = self.cols();
        if n == 0 || self.rows() == 0 {
            return 0.0;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        let mut v: Vec<Complex64> = (0..n)
            .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        let mut sigma = 0.0;
        for _ in 0..POWER_MAX_ITER {
            let vn = v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if vn == 0.0 {
                return 0.0;
            }
            v.iter_mut().for_each(|c| *c /= vn);
            let bv = self.weighted_apply(&v, false);
            let next = bv.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if next == 0.0 {
                return 0.0;
            }
            let converged = (next - sigma).abs() <= POWER_REL_TOL * next;
            sigma = next;
            if converged {
                break;
            }
            v = self.weighted_apply(&bv, true);
        }
        sigma
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::LatticeGrid;

    fn space(s: f64) -> DiscreteSobolevSpace {
        DiscreteSobolevSpace::lattice(LatticeGrid::new(1, 16, 0.5).unwrap(), s)
    }

    #[test]
    fn structured_matches_dense() {
        let sp = space(0.0);
        let mult = DiscreteOperator::multiplication(&(0..16).map(|i| i as f64).collect::<Vec<_>>(), &sp).unwrap();
        let vals: Vec<Complex64> = (0..16).map(|i| Complex64::new(1.0 + i as f64, 0.3)).collect();
        let fm = DiscreteOperator {
            kind: OperatorKind::Multiplier(vals),
            src: sp.clone(),
            dst: sp.clone(),
            provenance: Provenance::new("test"),
        };
        let prod = fm.compose(&mult).unwrap();
        let dense = fm.to_dense() * mult.to_dense();
        assert!((prod.to_dense() - &dense).norm() < 1e-10 * dense.norm());
        // adjoint through the structured path
        let adj = DMatrix::from_fn(16, 16, |i, j| {
            let mut e = vec![Complex64::new(0.0, 0.0); 16];
            e[j] = Complex64::new(1.0, 0.0);
            prod.apply_adjoint(&e).unwrap()[i]
        });
        assert!((adj - dense.adjoint()).norm() < 1e-10 * dense.norm());
    }

    #[test]
    fn norms_agree() {
        let sp = space(0.0);
        let vals: Vec<Complex64> = (0..16).map(|i| Complex64::new((i as f64).sin(), 1.0)).collect();
        let fm = DiscreteOperator {
            kind: OperatorKind::Multiplier(vals.clone()),
            src: sp.clone(),
            dst: sp.clone(),
            provenance: Provenance::new("test"),
        };
        let exact = vals.iter().map(|c| c.norm()).fold(0.0, f64::max);
        assert!((fm.norm() - exact).abs() < 1e-14);
        assert!((fm.power_norm() - exact).abs() < 1e-6 * exact);
        let dense = DiscreteOperator::dense(fm.to_dense(), sp.clone(), sp.clone(), Provenance::new("d")).unwrap();
        assert!((dense.norm() - exact).abs() < 1e-10);
    }

    #[test]
    fn zero_operator_norm() {
        let sp = space(1.0);
        let z = DiscreteOperator::multiplication(&[0.0; 16], &sp).unwrap();
        assert_eq!(z.norm(), 0.0);
    }
}
