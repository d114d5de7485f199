//! Laurent polynomials `a(z) = Σ_{j=lo}^{hi} a_j z^j` on the unit circle.

use std::f64::consts::TAU;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{Exponent, Expr, ParseError, SymbolExpr};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LaurentError {
    #[error("symbol vanishes on the unit circle (min modulus {min_modulus:e})")]
    ZeroOnCircle { min_modulus: f64 },
    #[error("zero Laurent polynomial")]
    Zero,
    #[error("root finding failed to converge")]
    RootFinding,
}

/// Samples used for the nonvanishing check on `|z| = 1`.
pub const CIRCLE_SAMPLES: usize = 4096;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaurentPoly {
    /// Power of the first coefficient.
    pub lo: i32,
    /// `coeffs[i]` multiplies `z^(lo + i)`.
    pub coeffs: Vec<Complex64>,
}

impl LaurentPoly {
    pub fn new(lo: i32, coeffs: Vec<Complex64>) -> Self {
        let mut p = LaurentPoly { lo, coeffs };
        p.trim();
        p
    }

    pub fn from_real(lo: i32, coeffs: &[f64]) -> Self {
        LaurentPoly::new(lo, coeffs.iter().map(|&c| Complex64::new(c, 0.0)).collect())
    }

    /// `c · z^power`.
    pub fn monomial(power: i32, c: Complex64) -> Self {
        LaurentPoly::new(power, vec![c])
    }

    fn trim(&mut self) {
        let zero = Complex64::new(0.0, 0.0);
        while self.coeffs.len() > 1 && self.coeffs.last() == Some(&zero) {
            self.coeffs.pop();
        }
        let lead = self.coeffs.iter().take_while(|&&c| c == zero).count();
        if lead == self.coeffs.len() {
            self.coeffs.truncate(1);
        } else if lead > 0 {
            self.coeffs.drain(..lead);
            self.lo += lead as i32;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0))
    }

    pub fn hi(&self) -> i32 {
        self.lo + self.coeffs.len() as i32 - 1
    }

    /// Coefficient `a_j` (zero outside the stored range).
    pub fn coeff(&self, j: i64) -> Complex64 {
        let i = j - self.lo as i64;
        if i >= 0 && (i as usize) < self.coeffs.len() {
            self.coeffs[i as usize]
        } else {
            Complex64::new(0.0, 0.0)
        }
    }

    /// Number of strictly negative powers `p = max(0, -lo)`.
    pub fn negative_width(&self) -> usize {
        (-self.lo).max(0) as usize
    }

    /// Number of strictly positive powers `q = max(0, hi)`.
    pub fn positive_width(&self) -> usize {
        self.hi().max(0) as usize
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c;
        }
        acc * z.powi(self.lo)
    }

    pub fn mul(&self, other: &LaurentPoly) -> LaurentPoly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        LaurentPoly::new(self.lo + other.lo, out)
    }

    /// Symbol of the adjoint Toeplitz operator: `ã_j = conj(a_{-j})`, which
    /// equals `conj(a(z))` on the circle.
    pub fn adjoint(&self) -> LaurentPoly {
        LaurentPoly::new(
            -self.hi(),
            self.coeffs.iter().rev().map(|c| c.conj()).collect(),
        )
    }

    pub fn min_modulus_on_circle(&self, samples: usize) -> f64 {
        (0..samples)
            .map(|i| self.eval(Complex64::from_polar(1.0, TAU * i as f64 / samples as f64)).norm())
            .fold(f64::INFINITY, f64::min)
    }

    /// Roots of `z^{-lo} a(z)` (a polynomial with nonzero constant term),
    /// from the eigenvalues of its companion matrix.
    pub fn roots(&self) -> Result<Vec<Complex64>, LaurentError> {
        if self.is_zero() {
            return Err(LaurentError::Zero);
        }
        let d = self.coeffs.len() - 1;
        if d == 0 {
            return Ok(Vec::new());
        }
        let lead = self.coeffs[d];
        let mut comp = DMatrix::<Complex64>::zeros(d, d);
        for i in 1..d {
            comp[(i, i - 1)] = Complex64::new(1.0, 0.0);
        }
        for i in 0..d {
            comp[(i, d - 1)] = -self.coeffs[i] / lead;
        }
        let schur = comp.schur();
        let t = schur.unpack().1;
        Ok((0..d).map(|i| t[(i, i)]).collect())
    }

    /// Lift to the real line through `z = (ξ - i)/(ξ + i)`, which traverses
    /// the unit circle once counter-clockwise as `ξ` runs over `ℝ`.
    pub fn lift_to_line(&self) -> Result<SymbolExpr, ParseError> {
        let z = (Expr::K(1) - Expr::Imag) / (Expr::K(1) + Expr::Imag);
        let mut terms = self.coeffs.iter().enumerate().filter(|(_, c)| c.norm() > 0.0);
        let term = |(i, c): (usize, &Complex64)| {
            let j = self.lo + i as i32;
            let zj = if j == 0 { Expr::Num(1.0) } else { z.clone().pow(Exponent::integer(j)) };
            Expr::complex(*c) * zj
        };
        let first = terms.next().map(term).unwrap_or(Expr::Num(0.0));
        let ast = terms.map(term).fold(first, |acc, t| acc + t);
        SymbolExpr::from_ast(ast, 1)
    }

    /// Random Laurent polynomial with powers in `[-2, 2]` and every root at
    /// modulus in `[0.2, 0.7] ∪ [1.4, 3.0]`, so it stays elliptic with margin.
    pub fn random_elliptic<R: Rng>(rng: &mut R) -> LaurentPoly {
        let degree = rng.random_range(1..=4usize);
        let shift = -(rng.random_range(0..=degree.min(2)) as i32);
        let lead = Complex64::from_polar(rng.random_range(0.5..2.0), rng.random_range(0.0..TAU));
        let mut p = LaurentPoly::new(0, vec![lead]);
        for _ in 0..degree {
            let modulus = if rng.random_bool(0.5) {
                rng.random_range(0.2..0.7)
            } else {
                rng.random_range(1.4..3.0)
            };
            let root = Complex64::from_polar(modulus, rng.random_range(0.0..TAU));
            p = p.mul(&LaurentPoly::new(0, vec![-root, Complex64::new(1.0, 0.0)]));
        }
        p.lo = shift;
        p
    }
}

/// Winding number of `a` around the origin on `|z| = 1` by root counting:
/// roots of `z^{-lo} a(z)` inside the unit disk, plus `lo`.
pub fn laurent_winding(a: &LaurentPoly) -> Result<i64, LaurentError> {
    laurent_winding_with_tol(a, crate::symbol::TOL_ELL)
}

pub fn laurent_winding_with_tol(a: &LaurentPoly, tol_ell: f64) -> Result<i64, LaurentError> {
    if a.is_zero() {
        return Err(LaurentError::Zero);
    }
    let min_modulus = a.min_modulus_on_circle(CIRCLE_SAMPLES);
    if !(min_modulus > tol_ell) {
        return Err(LaurentError::ZeroOnCircle { min_modulus });
    }
    let roots = a.roots()?;
    if roots.iter().any(|r| !r.re.is_finite() || !r.im.is_finite()) {
        return Err(LaurentError::RootFinding);
    }
    if roots.iter().any(|r| (r.norm() - 1.0).abs() < 1e-10) {
        return Err(LaurentError::ZeroOnCircle { min_modulus });
    }
    let inside = roots.iter().filter(|r| r.norm() < 1.0).count() as i64;
    Ok(inside + a.lo as i64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn winding_examples() {
        assert_eq!(laurent_winding(&LaurentPoly::from_real(1, &[1.0])).unwrap(), 1);
        assert_eq!(laurent_winding(&LaurentPoly::from_real(0, &[-0.5, 1.0])).unwrap(), 1);
        // z^{-1}(z-2)(z-1/2) = z^{-1} - 5/2 + z
        let a = LaurentPoly::from_real(-1, &[1.0, -2.5, 1.0]);
        assert_eq!(laurent_winding(&a).unwrap(), 0);
        assert_eq!(laurent_winding(&LaurentPoly::from_real(-1, &[1.0])).unwrap(), -1);
        assert_eq!(laurent_winding(&LaurentPoly::from_real(0, &[3.0])).unwrap(), 0);
    }

    // Argument-quadrature cross-check of the root count.
    fn quadrature_winding(a: &LaurentPoly) -> f64 {
        let n = 1 << 14;
        let mut total = 0.0;
        let mut prev = a.eval(c(1.0));
        for i in 1..=n {
            let z = Complex64::from_polar(1.0, TAU * i as f64 / n as f64);
            let v = a.eval(z);
            total += (v / prev).arg();
            prev = v;
        }
        total / TAU
    }

    #[test]
    fn root_count_matches_quadrature() {
        let a = LaurentPoly::from_real(-1, &[1.0, -2.5, 1.0]);
        assert!(quadrature_winding(&a).abs() < 1e-9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..30 {
            let p = LaurentPoly::random_elliptic(&mut rng);
            let q = quadrature_winding(&p);
            assert!((q - q.round()).abs() < 1e-8);
            assert_eq!(laurent_winding(&p).unwrap(), q.round() as i64);
        }
    }

    #[test]
    fn zero_on_circle() {
        let a = LaurentPoly::from_real(0, &[-1.0, 1.0]);
        assert!(matches!(laurent_winding(&a), Err(LaurentError::ZeroOnCircle { .. })));
    }

    #[test]
    fn trimming_and_adjoint() {
        let a = LaurentPoly::new(-2, vec![c(0.0), c(1.0), c(2.0), c(0.0)]);
        assert_eq!(a.lo, -1);
        assert_eq!(a.hi(), 0);
        let adj = a.adjoint();
        assert_eq!(adj.lo, 0);
        assert_eq!(adj.coeff(1), c(1.0));
        let z = Complex64::from_polar(1.0, 0.7);
        assert!((adj.eval(z) - a.eval(z).conj()).norm() < 1e-14);
    }

    #[test]
    fn multiplicative_winding() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let a = LaurentPoly::random_elliptic(&mut rng);
            let b = LaurentPoly::random_elliptic(&mut rng);
            assert_eq!(
                laurent_winding(&a.mul(&b)).unwrap(),
                laurent_winding(&a).unwrap() + laurent_winding(&b).unwrap()
            );
            assert_eq!(laurent_winding(&a.adjoint()).unwrap(), -laurent_winding(&a).unwrap());
        }
    }

    #[test]
    fn lifted_symbol_agrees_on_circle() {
        let a = LaurentPoly::new(-1, vec![Complex64::new(0.3, -1.0), c(2.0), Complex64::new(0.0, 0.5)]);
        let s = a.lift_to_line().unwrap();
        for xi in [-3.0, -0.2, 0.0, 1.5, 40.0] {
            let z = (Complex64::new(xi, 0.0) - Complex64::i()) / (Complex64::new(xi, 0.0) + Complex64::i());
            let lifted = s.eval_real(&[0.0], &[xi]).unwrap();
            assert!((lifted - a.eval(z)).norm() < 1e-12);
        }
    }
}
