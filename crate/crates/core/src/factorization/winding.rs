use std::f64::consts::{FRAC_PI_2, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FactorizationError;
use crate::symbol::{Symbol, TOL_ELL};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WindingOptions {
    /// Truncation radius `R` of the normal line.
    pub cutoff: f64,
    pub samples: usize,
    pub tol_ell: f64,
}

impl Default for WindingOptions {
    fn default() -> Self {
        WindingOptions {
            cutoff: 1e4,
            samples: 1 << 16,
            tol_ell: TOL_ELL,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingReport {
    /// Argument increment divided by `2π`.
    pub winding: f64,
    pub ae: f64,
    pub order: f64,
    /// Contribution of both tails `|t| > R`, in radians.
    pub tail_correction: f64,
    /// Largest phase step between adjacent samples.
    pub max_step: f64,
    pub min_modulus: f64,
    pub samples: usize,
    pub cutoff: f64,
}

/// `a(x0, base + t·dir)·(1 + |ξ|²)^{-α/2}`.
fn reduced(s: &Symbol, x0: &[f64], base: &[f64], dir: &[f64], t: f64) -> Result<Complex64, FactorizationError> {
    let xi: Vec<f64> = base.iter().zip(dir).map(|(b, d)| b + t * d).collect();
    let n2: f64 = xi.iter().map(|v| v * v).sum();
    let a = s.eval_real(x0, &xi)?;
    Ok(a * (1.0 + n2).powf(-0.5 * s.order()))
}

/// Winding of the reduced symbol along the line `ξ = base + t·dir`, `t ∈ ℝ`.
///
/// The line is sampled at `t = σ tan φ` with `φ` uniform, where
/// `σ = (1 + |base|²)^{1/2}`, so the samples concentrate where the symbol
/// turns. Phases are unwrapped step by step; the tails beyond `±R` are
/// extrapolated assuming a `1/t` approach to the limit values.
pub fn winding_along(
    s: &Symbol,
    x0: &[f64],
    base: &[f64],
    dir: &[f64],
    opts: &WindingOptions,
) -> Result<WindingReport, FactorizationError> {
    let m = s.dim();
    if x0.len() != m || base.len() != m || dir.len() != m {
        return Err(FactorizationError::Dimension(format!(
            "x0, base and direction must have length {m}"
        )));
    }
    if !(opts.cutoff > 0.0) || opts.samples < 16 {
        return Err(FactorizationError::Unsupported(
            "cutoff must be positive and samples at least 16".into(),
        ));
    }
    let dn = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(dn > 0.0) {
        return Err(FactorizationError::Dimension("zero direction".into()));
    }
    let dir: Vec<f64> = dir.iter().map(|v| v / dn).collect();
    let sigma = (1.0 + base.iter().map(|v| v * v).sum::<f64>()).sqrt();
    let phi_max = (opts.cutoff / sigma).atan();
    let n = opts.samples;

    let eval = |t: f64| -> Result<Complex64, FactorizationError> {
        let r = reduced(s, x0, base, &dir, t)?;
        if !(r.norm() > opts.tol_ell) {
            return Err(FactorizationError::NonEllipticOnLine { t, modulus: r.norm() });
        }
        Ok(r)
    };

    let mut prev = eval(-opts.cutoff)?;
    let mut total = 0.0;
    let mut max_step: f64 = 0.0;
    let mut min_modulus = prev.norm();
    for i in 1..=n {
        let phi = -phi_max + 2.0 * phi_max * i as f64 / n as f64;
        let t = if i == n { opts.cutoff } else { sigma * phi.tan() };
        let cur = eval(t)?;
        let step = (cur / prev).arg();
        if step.abs() > FRAC_PI_2 {
            return Err(FactorizationError::BranchJump { t, jump: step });
        }
        max_step = max_step.max(step.abs());
        min_modulus = min_modulus.min(cur.norm());
        total += step;
        prev = cur;
    }

    let r = opts.cutoff;
    let right = 2.0 * (eval(2.0 * r)? / eval(r)?).arg();
    let left = -2.0 * (eval(-2.0 * r)? / eval(-r)?).arg();
    let tail = right + left;
    let winding = (total + tail) / TAU;
    Ok(WindingReport {
        winding,
        ae: 0.5 * s.order() - winding,
        order: s.order(),
        tail_correction: tail,
        max_step,
        min_modulus,
        samples: n,
        cutoff: opts.cutoff,
    })
}

/// Full report for the canonical half-space: `ξ = (ξ', t)`, `t` along `e_m`.
pub fn winding_report(
    s: &Symbol,
    x0: &[f64],
    xi_prime: &[f64],
    opts: &WindingOptions,
) -> Result<WindingReport, FactorizationError> {
    let m = s.dim();
    if xi_prime.len() + 1 != m {
        return Err(FactorizationError::Dimension(format!(
            "xi' must have length {}, got {}",
            m - 1,
            xi_prime.len()
        )));
    }
    let mut base = xi_prime.to_vec();
    base.push(0.0);
    let mut dir = vec![0.0; m];
    dir[m - 1] = 1.0;
    winding_along(s, x0, &base, &dir, opts)
}

/// Half-space factorization index `æ_{m-1}(x0, ξ')`.
pub fn winding_index(
    s: &Symbol,
    x0: &[f64],
    xi_prime: &[f64],
    opts: &WindingOptions,
) -> Result<f64, FactorizationError> {
    Ok(winding_report(s, x0, xi_prime, opts)?.ae)
}
