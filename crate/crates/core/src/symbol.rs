//! Classical symbols of a declared order and their two-sided ellipticity
//! bounds `c1 (1+|ξ|)^α ≤ |A(x,ξ)| ≤ c2 (1+|ξ|)^α`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsl::{EvalError, ParseError, SymbolExpr};

/// Magnitudes below this are treated as genuine zeros of a symbol.
pub const TOL_ELL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("order must be finite, got {0}")]
    NonFiniteOrder(f64),
    #[error("invalid frequency grid: {0}")]
    Grid(String),
    #[error("invalid radii for order fit: {0}")]
    Radii(String),
    #[error("symbol vanishes on the ray at r = {radius}")]
    DegenerateFit { radius: f64 },
    #[error("point has dimension {got}, symbol has dimension {expected}")]
    Dimension { got: usize, expected: usize },
}

/// A symbol expression with its declared order `α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Symbol {
    expr: SymbolExpr,
    order_alpha: f64,
}

impl Symbol {
    pub fn new(expr: SymbolExpr, order_alpha: f64) -> Result<Self, SymbolError> {
        if !order_alpha.is_finite() {
            return Err(SymbolError::NonFiniteOrder(order_alpha));
        }
        Ok(Symbol { expr, order_alpha })
    }

    pub fn parse(text: &str, dim: usize, order_alpha: f64) -> Result<Self, SymbolError> {
        Symbol::new(SymbolExpr::parse(text, dim)?, order_alpha)
    }

    pub fn expr(&self) -> &SymbolExpr {
        &self.expr
    }

    pub fn order(&self) -> f64 {
        self.order_alpha
    }

    pub fn dim(&self) -> usize {
        self.expr.dim()
    }

    pub fn eval_real(&self, x: &[f64], xi: &[f64]) -> Result<Complex64, EvalError> {
        self.expr.eval_real(x, xi)
    }

    pub fn eval_at(&self, x: &[f64], xi: &[Complex64]) -> Result<Complex64, EvalError> {
        self.expr.eval_at(x, xi)
    }

    pub fn scaled(&self, c: Complex64) -> Symbol {
        Symbol {
            expr: self.expr.scaled(c),
            order_alpha: self.order_alpha,
        }
    }

    /// Product symbol; orders add.
    pub fn product(&self, other: &Symbol) -> Symbol {
        Symbol {
            expr: self.expr.mul(&other.expr),
            order_alpha: self.order_alpha + other.order_alpha,
        }
    }
}

/// Frequency sampling used to certify ellipticity: a tensor grid on
/// `[-radius, radius]^m` plus log-uniform random points per decade from
/// `10` up to `max_radius`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub points_per_axis: usize,
    pub radius: f64,
    pub random_per_decade: usize,
    pub max_radius: f64,
    pub seed: u64,
}

impl Default for FrequencyGrid {
    fn default() -> Self {
        FrequencyGrid {
            points_per_axis: 33,
            radius: 32.0,
            random_per_decade: 64,
            max_radius: 1e4,
            seed: 0,
        }
    }
}

impl FrequencyGrid {
    fn validate(&self) -> Result<(), SymbolError> {
        if self.points_per_axis < 2 {
            return Err(SymbolError::Grid(format!(
                "need at least 2 points per axis, got {}",
                self.points_per_axis
            )));
        }
        if !(self.radius >= 10.0) {
            return Err(SymbolError::Grid(format!(
                "radius must be at least 10, got {}",
                self.radius
            )));
        }
        Ok(())
    }

    /// Every sample point, tensor grid first (row-major), then random points.
    pub fn points(&self, dim: usize) -> Result<Vec<Vec<f64>>, SymbolError> {
        self.validate()?;
        let n = self.points_per_axis;
        let axis: Vec<f64> = (0..n)
            .map(|i| -self.radius + 2.0 * self.radius * i as f64 / (n - 1) as f64)
            .collect();
        let total = n.checked_pow(dim as u32).ok_or_else(|| SymbolError::Grid("grid too large".into()))?;
        let mut pts = Vec::with_capacity(total);
        let mut idx = vec![0usize; dim];
        for _ in 0..total {
            pts.push(idx.iter().map(|&i| axis[i]).collect());
            for d in (0..dim).rev() {
                idx[d] += 1;
                if idx[d] < n {
                    break;
                }
                idx[d] = 0;
            }
        }
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut lo = 10.0_f64;
        while lo < self.max_radius {
            let hi = (lo * 10.0).min(self.max_radius);
            for _ in 0..self.random_per_decade {
                let r = (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp();
                let dir = random_unit(&mut rng, dim);
                pts.push(dir.iter().map(|d| r * d).collect());
            }
            lo = hi;
        }
        Ok(pts)
    }
}

pub(crate) fn random_unit<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim)
            .map(|_| {
                // Box-Muller
                let u1: f64 = rng.random::<f64>().max(f64::MIN_POSITIVE);
                let u2: f64 = rng.random();
                (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
            })
            .collect();
        let n = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if n > 1e-12 {
            return v.into_iter().map(|a| a / n).collect();
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EllipticityReport {
    pub elliptic: bool,
    /// Certified lower constant; absent when the symbol is not elliptic.
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    /// Sample minimizing `|A|(1+|ξ|)^{-α}`; reported when not elliptic.
    pub witness: Option<Witness>,
    pub grid: FrequencyGrid,
    pub x_samples: usize,
    pub samples: usize,
    pub tol_ell: f64,
}

/// Samples `|A(x,ξ)| (1+|ξ|)^{-α}` over `x_samples × grid` and certifies
/// the extremes as the constants `c1`, `c2`.
pub fn check_ellipticity(
    s: &Symbol,
    x_samples: &[Vec<f64>],
    grid: &FrequencyGrid,
) -> Result<EllipticityReport, SymbolError> {
    check_ellipticity_with_tol(s, x_samples, grid, TOL_ELL)
}

pub fn check_ellipticity_with_tol(
    s: &Symbol,
    x_samples: &[Vec<f64>],
    grid: &FrequencyGrid,
    tol_ell: f64,
) -> Result<EllipticityReport, SymbolError> {
    if x_samples.is_empty() {
        return Err(SymbolError::Grid("no x samples".into()));
    }
    let dim = s.dim();
    if let Some(x) = x_samples.iter().find(|x| x.len() != dim) {
        return Err(SymbolError::Dimension {
            got: x.len(),
            expected: dim,
        });
    }
    let xis = grid.points(dim)?;
    let mut lo = f64::INFINITY;
    let mut hi = 0.0_f64;
    let mut argmin = (0usize, 0usize);
    for (ix, x) in x_samples.iter().enumerate() {
        for (ik, xi) in xis.iter().enumerate() {
            let a = s.eval_real(x, xi)?.norm();
            let r = xi.iter().map(|v| v * v).sum::<f64>().sqrt();
            let ratio = a * (1.0 + r).powf(-s.order());
            if ratio < lo {
                lo = ratio;
                argmin = (ix, ik);
            }
            hi = hi.max(ratio);
        }
    }
    let elliptic = lo > tol_ell;
    Ok(EllipticityReport {
        elliptic,
        c1: elliptic.then_some(lo),
        c2: Some(hi),
        witness: (!elliptic).then(|| Witness {
            x: x_samples[argmin.0].clone(),
            xi: xis[argmin.1].clone(),
        }),
        grid: grid.clone(),
        x_samples: x_samples.len(),
        samples: x_samples.len() * xis.len(),
        tol_ell,
    })
}

/// `n` radii spaced geometrically from `lo` to `hi`.
pub fn geometric_radii(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| lo * (hi / lo).powf(i as f64 / (n - 1).max(1) as f64))
        .collect()
}

/// Least-squares slope of `log y` against `log t`.
pub(crate) fn loglog_slope(t: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = t.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Estimates the growth order of `|A(x0, rω)|` along a ray by regressing
/// `log|A|` on `log(1+r)`.
pub fn fit_order(s: &Symbol, x0: &[f64], ray: &[f64], radii: &[f64]) -> Result<f64, SymbolError> {
    if ray.len() != s.dim() {
        return Err(SymbolError::Dimension {
            got: ray.len(),
            expected: s.dim(),
        });
    }
    if radii.len() < 8 {
        return Err(SymbolError::Radii(format!("need at least 8 radii, got {}", radii.len())));
    }
    let (rmin, rmax) = radii
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(a, b), &r| (a.min(r), b.max(r)));
    if !(rmin > 0.0) || rmax / rmin < 1e3 * (1.0 - 1e-12) {
        return Err(SymbolError::Radii("radii must be positive and span at least 3 decades".into()));
    }
    let norm = ray.iter().map(|v| v * v).sum::<f64>().sqrt();
    let mut mags = Vec::with_capacity(radii.len());
    for &r in radii {
        let xi: Vec<f64> = ray.iter().map(|v| r * v / norm).collect();
        let a = s.eval_real(x0, &xi)?.norm();
        if a <= TOL_ELL {
            return Err(SymbolError::DegenerateFit { radius: r });
        }
        mags.push(a);
    }
    let t: Vec<f64> = radii.iter().map(|r| 1.0 + r).collect();
    Ok(loglog_slope(&t, &mags))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sym(text: &str, dim: usize, alpha: f64) -> Symbol {
        Symbol::parse(text, dim, alpha).unwrap()
    }

    fn origin(dim: usize) -> Vec<Vec<f64>> {
        vec![vec![0.0; dim]]
    }

    #[test]
    fn bessel_potential_is_elliptic() {
        let s = sym("(1+abs2(k))^(1/2)", 2, 1.0);
        let r = check_ellipticity(&s, &origin(2), &FrequencyGrid::default()).unwrap();
        assert!(r.elliptic);
        assert!(r.c1.unwrap() >= 1.0 / 2f64.sqrt() - 1e-15);
        assert!(r.c2.unwrap() <= 1.0 + 1e-15);
        assert!(r.witness.is_none());
    }

    #[test]
    fn constant_symbol_constants() {
        let s = sym("5", 2, 0.0);
        let r = check_ellipticity(&s, &origin(2), &FrequencyGrid::default()).unwrap();
        assert!(r.elliptic);
        assert_eq!(r.c1, Some(5.0));
        assert_eq!(r.c2, Some(5.0));
    }

    #[test]
    fn coordinate_symbol_degenerates_on_axis() {
        let s = sym("k1", 2, 1.0);
        let r = check_ellipticity(&s, &origin(2), &FrequencyGrid::default()).unwrap();
        assert!(!r.elliptic);
        assert_eq!(r.c1, None);
        let w = r.witness.unwrap();
        assert_eq!(w.xi[0], 0.0);
    }

    #[test]
    fn grid_preconditions() {
        let s = sym("1", 1, 0.0);
        let g = FrequencyGrid {
            points_per_axis: 1,
            ..FrequencyGrid::default()
        };
        assert!(matches!(check_ellipticity(&s, &origin(1), &g), Err(SymbolError::Grid(_))));
        let g = FrequencyGrid {
            radius: 5.0,
            ..FrequencyGrid::default()
        };
        assert!(matches!(check_ellipticity(&s, &origin(1), &g), Err(SymbolError::Grid(_))));
        assert!(matches!(
            check_ellipticity(&s, &[], &FrequencyGrid::default()),
            Err(SymbolError::Grid(_))
        ));
    }

    #[test]
    fn eval_errors_propagate() {
        let s = sym("1/k1", 1, -1.0);
        assert!(matches!(
            check_ellipticity(&s, &origin(1), &FrequencyGrid::default()),
            Err(SymbolError::Eval(EvalError::DivisionByZero))
        ));
    }

    #[test]
    fn scale_covariance() {
        let s = sym("(1+abs2(k))^(1/2)*(2 + normx2(x))", 2, 1.0);
        let xs = vec![vec![0.0, 0.0], vec![0.5, -0.25]];
        let g = FrequencyGrid::default();
        let base = check_ellipticity(&s, &xs, &g).unwrap();
        for c in [Complex64::new(-3.0, 0.0), Complex64::new(0.5, 2.0), Complex64::new(1e-3, 0.0)] {
            let r = check_ellipticity(&s.scaled(c), &xs, &g).unwrap();
            let k = c.norm();
            let rel = |a: f64, b: f64| (a - b).abs() / b.abs();
            assert!(rel(r.c1.unwrap(), k * base.c1.unwrap()) < 1e-12);
            assert!(rel(r.c2.unwrap(), k * base.c2.unwrap()) < 1e-12);
        }
    }

    #[test]
    fn refinement_is_monotone() {
        let s = sym("(1 + k1^2 + 3*k2^2)^(1/2) + 0.2*k1", 2, 1.0);
        let coarse = FrequencyGrid::default();
        let fine = FrequencyGrid {
            points_per_axis: 65,
            ..coarse.clone()
        };
        let a = check_ellipticity(&s, &origin(2), &coarse).unwrap();
        let b = check_ellipticity(&s, &origin(2), &fine).unwrap();
        assert!(b.c1.unwrap() <= a.c1.unwrap());
        assert!(b.c2.unwrap() >= a.c2.unwrap());
    }

    // Log-log regression oracle for the fitted order, computed directly from
    // closed forms at radii 10^1..10^4.
    fn oracle_slope(f: impl Fn(f64) -> f64) -> f64 {
        let radii = geometric_radii(10.0, 1e4, 16);
        let n = radii.len() as f64;
        let xs: Vec<f64> = radii.iter().map(|r| (1.0 + r).ln()).collect();
        let ys: Vec<f64> = radii.iter().map(|&r| f(r).ln()).collect();
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
        num / den
    }

    #[test]
    fn fitted_orders() {
        let radii = geometric_radii(10.0, 1e4, 16);
        let ray = [0.6, 0.8];
        let x0 = [0.0, 0.0];
        let bessel = fit_order(&sym("(1+abs2(k))^(1/2)", 2, 1.0), &x0, &ray, &radii).unwrap();
        let expected = oracle_slope(|r| (1.0 + r * r).sqrt());
        assert!((bessel - expected).abs() < 1e-12);
        assert!((bessel - 1.0).abs() < 0.05);

        let one = fit_order(&sym("1", 2, 0.0), &x0, &ray, &radii).unwrap();
        assert_eq!(one, 0.0);

        let lap = fit_order(&sym("abs2(k)", 2, 2.0), &x0, &ray, &radii).unwrap();
        let expected = oracle_slope(|r| r * r);
        assert!((lap - expected).abs() < 1e-12);
        assert!((lap - 2.0).abs() < 0.05);
    }

    #[test]
    fn fit_order_errors() {
        let s = sym("k1", 2, 1.0);
        let radii = geometric_radii(10.0, 1e4, 16);
        assert!(matches!(
            fit_order(&s, &[0.0, 0.0], &[0.0, 1.0], &radii),
            Err(SymbolError::DegenerateFit { .. })
        ));
        assert!(matches!(
            fit_order(&s, &[0.0, 0.0], &[1.0, 0.0], &geometric_radii(10.0, 1e4, 4)),
            Err(SymbolError::Radii(_))
        ));
        assert!(matches!(
            fit_order(&s, &[0.0, 0.0], &[1.0, 0.0], &geometric_radii(10.0, 1e2, 10)),
            Err(SymbolError::Radii(_))
        ));
    }

    #[test]
    fn fitted_order_of_product_is_additive() {
        let radii = geometric_radii(10.0, 1e4, 16);
        let ray = [0.6, 0.8];
        let x0 = [0.1, 0.2];
        let a = sym("(1+abs2(k))^(1/2)", 2, 1.0);
        let b = sym("(2 + k1^2 + k2^2)*(3 + normx2(x))", 2, 2.0);
        let fa = fit_order(&a, &x0, &ray, &radii).unwrap();
        let fb = fit_order(&b, &x0, &ray, &radii).unwrap();
        let fab = fit_order(&a.product(&b), &x0, &ray, &radii).unwrap();
        assert!((fab - fa - fb).abs() < 0.1);
    }
}
