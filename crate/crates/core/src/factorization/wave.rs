use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FactorizationError;
use crate::dsl::SymbolExpr;
use crate::geometry::{dual_cone, Cone};
use crate::lattice::LatticeGrid;
use crate::symbol::{geometric_radii, loglog_slope, Symbol};

/// A proposed splitting `a = a_≠ · a_=` on the wedge `ℝ^k × C`, written in
/// canonical coordinates: the first `k` frequencies are tangential and the
/// last `m - k` pair with the cone `C`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveFactorCandidate {
    pub a_neq: SymbolExpr,
    pub a_eq: SymbolExpr,
    pub cone: Cone,
    pub k: usize,
    pub declared_ae: f64,
}

impl WaveFactorCandidate {
    pub fn new(
        a_neq: SymbolExpr,
        a_eq: SymbolExpr,
        cone: Cone,
        k: usize,
        declared_ae: f64,
    ) -> Result<Self, FactorizationError> {
        let m = a_neq.dim().max(a_eq.dim());
        if k + cone.dim() != m || a_neq.dim() != a_eq.dim() {
            return Err(FactorizationError::Dimension(format!(
                "k = {k} plus cone dimension {} must equal the factor dimension {m}",
                cone.dim()
            )));
        }
        if !cone.is_pointed() {
            return Err(FactorizationError::Unsupported("cone must be pointed".into()));
        }
        if !declared_ae.is_finite() {
            return Err(FactorizationError::Unsupported("declared index must be finite".into()));
        }
        Ok(WaveFactorCandidate {
            a_neq,
            a_eq,
            cone,
            k,
            declared_ae,
        })
    }

    pub fn dim(&self) -> usize {
        self.k + self.cone.dim()
    }

    /// Evaluates a factor at `ξ'' = tangential`, `ξ' = base ± i t v`.
    fn eval_tube(f: &SymbolExpr, x0: &[f64], tangential: &[f64], base: &[f64], v: &[f64], t: f64) -> Result<Complex64, FactorizationError> {
        let xi: Vec<Complex64> = tangential
            .iter()
            .map(|&a| Complex64::new(a, 0.0))
            .chain(base.iter().zip(v).map(|(&b, &d)| Complex64::new(b, t * d)))
            .collect();
        Ok(f.eval_at(x0, &xi)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveOptions {
    /// Points per axis of the real product-identity grid on `[-R, R]^m`.
    pub grid_points: usize,
    pub grid_radius: f64,
    /// Exclusion margin around `∂C* ∪ ∂(-C*)`, in grid cells.
    pub exclusion_cells: f64,
    pub tol_prod: f64,
    pub growth_t: Vec<f64>,
    pub slope_tol: f64,
    pub rays: usize,
    /// Paley–Wiener grid: points per axis and side length. `None` picks
    /// 256 and 40 for cones of dimension at most 2, and 64 and 24 above.
    pub pw_points: Option<usize>,
    pub pw_length: Option<f64>,
    /// Extra power of the order-lowering factor `Π 1/(g·ξ + i)`.
    pub pw_smoothing: u32,
    pub tol_pw: f64,
}

impl Default for WaveOptions {
    fn default() -> Self {
        WaveOptions {
            grid_points: 33,
            grid_radius: 16.0,
            exclusion_cells: 2.0,
            tol_prod: 1e-10,
            growth_t: vec![1.0, 10.0, 100.0, 1000.0],
            slope_tol: 0.1,
            rays: 3,
            pw_points: None,
            pw_length: None,
            pw_smoothing: 3,
            tol_pw: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProductCheck {
    pub max_rel_error: f64,
    pub checked: usize,
    pub excluded: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RayFit {
    pub factor: String,
    pub ray: Vec<f64>,
    pub slope: f64,
    pub expected: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthCheck {
    pub fits: Vec<RayFit>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSupport {
    pub factor: String,
    /// Cone the inverse transform should live in: `C` or `-C`.
    pub target: String,
    pub leaked_fraction: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportCheck {
    pub factors: Vec<FactorSupport>,
    pub grid_points: usize,
    pub grid_length: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum WaveFailure {
    ProductMismatch { max_rel_error: f64 },
    GrowthViolation { factor: String, ray: Vec<f64>, slope: f64, expected: f64 },
    SupportLeak { factor: String, fraction: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveValidation {
    pub product: ProductCheck,
    pub growth: GrowthCheck,
    pub support: SupportCheck,
    /// First failing check in the order product, growth, support.
    pub failure: Option<WaveFailure>,
}

impl WaveValidation {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    /// The first failure as an error.
    pub fn ensure(&self) -> Result<(), FactorizationError> {
        match self.failure.clone() {
            None => Ok(()),
            Some(WaveFailure::ProductMismatch { max_rel_error }) => {
                Err(FactorizationError::ProductMismatch { max_rel_error })
            }
            Some(WaveFailure::GrowthViolation { factor, ray, slope, expected }) => {
                Err(FactorizationError::GrowthViolation { factor, ray, slope, expected })
            }
            Some(WaveFailure::SupportLeak { factor, fraction }) => {
                Err(FactorizationError::SupportLeak { factor, fraction })
            }
        }
    }
}

fn unit(g: &[i64]) -> Vec<f64> {
    let n = g.iter().map(|&a| (a * a) as f64).sum::<f64>().sqrt();
    g.iter().map(|&a| a as f64 / n).collect()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Runs the product, growth and Paley–Wiener checks at the frozen point `x0`.
///
/// The support check transforms `F^{-1} · Π_j (g_j·ξ' ± i)^{-p}` for each
/// factor `F`, with `g_j` the generators of `C`. The extra factor is analytic
/// in the same tube as `F` and lowers the order so the sampled transform
/// converges; its inverse transform is supported in `±C`.
pub fn validate_wave_factors(
    s: &Symbol,
    x0: &[f64],
    cand: &WaveFactorCandidate,
    opts: &WaveOptions,
) -> Result<WaveValidation, FactorizationError> {
    let m = cand.dim();
    if s.dim() != m || x0.len() != m {
        return Err(FactorizationError::Dimension(format!(
            "symbol, point and candidate must share dimension {m}"
        )));
    }
    let k = cand.k;
    let d = m - k;
    let cstar = dual_cone(&cand.cone)?;
    let boundary_normals: Vec<Vec<f64>> = cstar.facet_normals()?.iter().map(|g| unit(g)).collect();

    // product identity
    let n = opts.grid_points.max(2);
    let cell = 2.0 * opts.grid_radius / (n - 1) as f64;
    let margin = opts.exclusion_cells * cell;
    let mut max_rel: f64 = 0.0;
    let (mut checked, mut excluded) = (0usize, 0usize);
    for flat in 0..n.pow(m as u32) {
        let mut rem = flat;
        let mut xi = vec![0.0; m];
        for j in (0..m).rev() {
            xi[j] = -opts.grid_radius + cell * (rem % n) as f64;
            rem /= n;
        }
        let y = &xi[k..];
        if boundary_normals.iter().any(|g| dot(g, y).abs() < margin) {
            excluded += 1;
            continue;
        }
        checked += 1;
        let err = match (s.eval_real(x0, &xi), cand.a_neq.eval_real(x0, &xi), cand.a_eq.eval_real(x0, &xi)) {
            (Ok(a), Ok(p), Ok(q)) => (p * q - a).norm() / a.norm().max(f64::MIN_POSITIVE),
            _ => f64::INFINITY,
        };
        max_rel = max_rel.max(err);
    }
    let product = ProductCheck {
        max_rel_error: max_rel,
        checked,
        excluded,
        passed: max_rel < opts.tol_prod,
    };

    // growth in the tubes
    let rays = cstar.interior_rays(opts.rays);
    let tangential = vec![0.0; k];
    let base = vec![0.0; d];
    let abscissa: Vec<f64> = opts.growth_t.iter().map(|t| 1.0 + t).collect();
    let mut fits = Vec::new();
    for (name, f, sign, expected) in [
        ("a_neq", &cand.a_neq, 1.0, cand.declared_ae),
        ("a_eq", &cand.a_eq, -1.0, s.order() - cand.declared_ae),
    ] {
        for v in &rays {
            let mut mags = Vec::with_capacity(opts.growth_t.len());
            for &t in &opts.growth_t {
                let val = WaveFactorCandidate::eval_tube(f, x0, &tangential, &base, v, sign * t)
                    .map(|c| c.norm())
                    .unwrap_or(0.0);
                mags.push(val);
            }
            let slope = if mags.iter().all(|&a| a > 0.0 && a.is_finite()) {
                loglog_slope(&abscissa, &mags)
            } else {
                f64::NAN
            };
            fits.push(RayFit {
                factor: name.into(),
                ray: v.clone(),
                slope,
                expected,
                passed: (slope - expected).abs() <= opts.slope_tol,
            });
        }
    }
    let growth = GrowthCheck {
        passed: fits.iter().all(|f| f.passed),
        fits,
    };

    // Paley-Wiener support
    let gens: Vec<Vec<f64>> = cand.cone.generators().iter().map(|g| g.iter().map(|&a| a as f64).collect()).collect();
    if gens.len() != d {
        return Err(FactorizationError::Unsupported(
            "support check needs a simplicial cone".into(),
        ));
    }
    let pw_n = opts.pw_points.unwrap_or(if d <= 2 { 256 } else { 64 });
    let pw_len = opts.pw_length.unwrap_or(if d <= 2 { 40.0 } else { 24.0 });
    let grid = LatticeGrid::new(d, pw_n, pw_len / pw_n as f64)?;
    let mut factors = Vec::new();
    for (name, f, sign, order) in [
        ("a_neq", &cand.a_neq, 1.0, cand.declared_ae),
        ("a_eq", &cand.a_eq, -1.0, s.order() - cand.declared_ae),
    ] {
        let p = opts.pw_smoothing as i32 + (-order).max(0.0).ceil() as i32;
        let target = if sign > 0.0 { cand.cone.clone() } else { cand.cone.negated() };
        let mut data = Vec::with_capacity(grid.len());
        for idx in 0..grid.len() {
            let eta = grid.frequency(idx);
            let mut xi = tangential.clone();
            xi.extend_from_slice(&eta);
            let fv = f.eval_real(x0, &xi)?;
            let mut e = Complex64::new(1.0, 0.0);
            for g in &gens {
                e /= Complex64::new(dot(g, &eta), sign);
            }
            data.push(e.powi(p) / fv);
        }
        grid.inverse(&mut data);
        let (mut total, mut outside) = (0.0, 0.0);
        for (idx, u) in data.iter().enumerate() {
            let pos: Vec<f64> = grid
                .multi_index(idx)
                .iter()
                .map(|&j| {
                    let j = j as i64;
                    let w = if j < pw_n as i64 / 2 { j } else { j - pw_n as i64 };
                    w as f64 * grid.h()
                })
                .collect();
            let mass = u.norm_sqr();
            total += mass;
            if !target.contains(&pos, 1e-12)? {
                outside += mass;
            }
        }
        let fraction = if total > 0.0 { outside / total } else { 1.0 };
        factors.push(FactorSupport {
            factor: name.into(),
            target: if sign > 0.0 { "C".into() } else { "-C".into() },
            leaked_fraction: fraction,
            passed: fraction < opts.tol_pw,
        });
    }
    let support = SupportCheck {
        passed: factors.iter().all(|f| f.passed),
        factors,
        grid_points: pw_n,
        grid_length: pw_len,
    };

    let failure = if !product.passed {
        Some(WaveFailure::ProductMismatch { max_rel_error: product.max_rel_error })
    } else if let Some(f) = growth.fits.iter().find(|f| !f.passed) {
        Some(WaveFailure::GrowthViolation {
            factor: f.factor.clone(),
            ray: f.ray.clone(),
            slope: f.slope,
            expected: f.expected,
        })
    } else {
        support.factors.iter().find(|f| !f.passed).map(|f| WaveFailure::SupportLeak {
            factor: f.factor.clone(),
            fraction: f.leaked_fraction,
        })
    };
    Ok(WaveValidation {
        product,
        growth,
        support,
        failure,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveIndexEstimate {
    pub ae: f64,
    pub slopes: Vec<f64>,
    pub rays: Vec<Vec<f64>>,
    pub declared_ae: f64,
    pub agrees: bool,
}

/// Growth exponent of `a_≠` along interior rays of `C*`: the slope of
/// `log|a_≠(0, i t v)|` against `log(1 + t)` for `t` from 10 to 1000.
pub fn estimate_wave_index(
    cand: &WaveFactorCandidate,
    x0: &[f64],
    rays: usize,
) -> Result<WaveIndexEstimate, FactorizationError> {
    let m = cand.dim();
    if x0.len() != m {
        return Err(FactorizationError::Dimension(format!("x0 must have length {m}")));
    }
    let cstar = dual_cone(&cand.cone)?;
    let rays = cstar.interior_rays(rays.max(1));
    let ts = geometric_radii(10.0, 1000.0, 16);
    let abscissa: Vec<f64> = ts.iter().map(|t| 1.0 + t).collect();
    let tangential = vec![0.0; cand.k];
    let base = vec![0.0; cand.cone.dim()];
    let mut slopes = Vec::with_capacity(rays.len());
    for v in &rays {
        let mut mags = Vec::with_capacity(ts.len());
        for &t in &ts {
            let a = WaveFactorCandidate::eval_tube(&cand.a_neq, x0, &tangential, &base, v, t)?.norm();
            if !(a > 0.0 && a.is_finite()) {
                return Err(FactorizationError::Unsupported(format!(
                    "a_neq vanishes or is singular in the tube at t = {t}"
                )));
            }
            mags.push(a);
        }
        slopes.push(loglog_slope(&abscissa, &mags));
    }
    let lo = slopes.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = slopes.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if hi - lo > 0.2 {
        return Err(FactorizationError::SlopeDisagreement { slopes });
    }
    let ae = slopes.iter().sum::<f64>() / slopes.len() as f64;
    Ok(WaveIndexEstimate {
        ae,
        agrees: (ae - cand.declared_ae).abs() <= 0.1,
        slopes,
        rays,
        declared_ae: cand.declared_ae,
    })
}
