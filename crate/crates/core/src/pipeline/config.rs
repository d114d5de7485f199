use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::dsl::SymbolExpr;
use crate::factorization::WaveFactorCandidate;
use crate::geometry::{stratify, Cone, Model};
use crate::symbol::Symbol;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid {field}: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

fn invalid(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.to_string(),
        reason: reason.into(),
    }
}

/// A proposed wave factorization `a = a_≠ · a_=` for `wave-validate`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaveSpec {
    pub a_neq: String,
    pub a_eq: String,
    /// Integer generators of the cone, one row each.
    pub cone: Vec<Vec<i64>>,
    pub k: usize,
    pub declared_ae: f64,
}

/// Everything a run depends on. Two runs with equal configurations produce
/// identical manifests apart from wall times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisConfig {
    pub symbol: String,
    pub alpha: f64,
    pub model: String,
    pub s_order: f64,
    pub eps: Vec<f64>,
    pub grid_n: usize,
    /// Lattice spacing; `None` means `2 / grid_n`.
    pub grid_h: Option<f64>,
    pub seed: u64,
    pub cutoff: f64,
    pub quad_samples: usize,
    pub rays: usize,
    pub tol_ell: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub wave: Option<WaveSpec>,
    /// Output directory; not part of the configuration hash.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub out: Option<PathBuf>,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            symbol: "(1 + abs2(k))^(1/2)".into(),
            alpha: 1.0,
            model: "square".into(),
            s_order: 0.5,
            eps: vec![0.4, 0.2, 0.1],
            grid_n: 64,
            grid_h: None,
            seed: 0,
            cutoff: 1e4,
            quad_samples: 1 << 16,
            rays: 3,
            tol_ell: crate::symbol::TOL_ELL,
            wave: None,
            out: None,
        }
    }
}

/// A configuration that passed every precondition check, with the parsed
/// pieces the stages need.
#[derive(Debug, Clone)]
pub struct ValidatedConfig {
    pub config: AnalysisConfig,
    pub model: Model,
    pub symbol: Symbol,
    pub grid_h: f64,
}

fn finite(field: &str, v: f64) -> Result<f64, ConfigError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(invalid(field, format!("must be finite, got {v}")))
    }
}

impl AnalysisConfig {
    /// SHA-256 of the canonical JSON form, output directory excluded.
    pub fn hash(&self) -> String {
        let mut c = self.clone();
        c.out = None;
        let bytes = serde_json::to_vec(&c).expect("configuration serializes");
        hex::encode(Sha256::digest(bytes))
    }

    fn check_numbers(&self) -> Result<f64, ConfigError> {
        finite("alpha", self.alpha)?;
        finite("s-order", self.s_order)?;
        if !(finite("cutoff", self.cutoff)? > 1.0) {
            return Err(invalid("cutoff", "must exceed 1"));
        }
        if self.quad_samples < 64 {
            return Err(invalid("quad-samples", "need at least 64 samples"));
        }
        if self.rays == 0 {
            return Err(invalid("rays", "need at least one ray"));
        }
        if !(finite("tol-ell", self.tol_ell)? > 0.0) {
            return Err(invalid("tol-ell", "must be positive"));
        }
        if self.grid_n < 4 {
            return Err(invalid("grid-n", "need at least 4 points per axis"));
        }
        let h = self.grid_h.unwrap_or(2.0 / self.grid_n as f64);
        if !(finite("grid-h", h)? > 0.0) {
            return Err(invalid("grid-h", "must be positive"));
        }
        if self.eps.is_empty() {
            return Err(invalid("eps", "need at least one radius"));
        }
        for &e in &self.eps {
            if !(finite("eps", e)? > 0.0) {
                return Err(invalid("eps", format!("radii must be positive, got {e}")));
            }
        }
        if self.eps.windows(2).any(|w| !(w[1] < w[0])) {
            return Err(invalid("eps", "radii must be strictly decreasing"));
        }
        Ok(h)
    }

    /// Checks the preconditions of the model-based stages: known model,
    /// admissible radii, and a symbol that parses in the model dimension.
    pub fn validate(&self) -> Result<ValidatedConfig, ConfigError> {
        let grid_h = self.check_numbers()?;
        let model: Model = self.model.parse().map_err(|e: crate::geometry::GeometryError| invalid("model", e.to_string()))?;
        let sep = stratify(model).min_separation();
        if self.eps[0] >= 0.5 * sep {
            return Err(invalid("eps", format!("radii must stay below half the vertex separation {sep}")));
        }
        let symbol = Symbol::parse(&self.symbol, model.dim(), self.alpha).map_err(|e| invalid("symbol", e.to_string()))?;
        Ok(ValidatedConfig {
            config: self.clone(),
            model,
            symbol,
            grid_h,
        })
    }

    /// Checks a wave-factorization request; the symbol dimension is
    /// `k + cone dimension` and the model is ignored.
    pub fn validate_wave(&self) -> Result<(Symbol, WaveFactorCandidate), ConfigError> {
        self.check_numbers()?;
        let w = self.wave.clone().ok_or_else(|| invalid("wave", "missing factorization candidate"))?;
        let cdim = w.cone.first().map(Vec::len).ok_or_else(|| invalid("cone", "no generators"))?;
        let cone = Cone::new(cdim, w.cone.clone()).map_err(|e| invalid("cone", e.to_string()))?;
        let m = w.k + cdim;
        let symbol = Symbol::parse(&self.symbol, m, self.alpha).map_err(|e| invalid("symbol", e.to_string()))?;
        let a_neq = SymbolExpr::parse(&w.a_neq, m).map_err(|e| invalid("a-neq", e.to_string()))?;
        let a_eq = SymbolExpr::parse(&w.a_eq, m).map_err(|e| invalid("a-eq", e.to_string()))?;
        let cand = WaveFactorCandidate::new(a_neq, a_eq, cone, w.k, finite("declared-ae", w.declared_ae)?)
            .map_err(|e| invalid("wave", e.to_string()))?;
        Ok((symbol, cand))
    }
}

impl ValidatedConfig {
    /// Preconditions of the assembly table: three or more radii and a
    /// periodic box wider than the unit box by `2 eps` per axis.
    pub fn check_assembly(&self) -> Result<(), ConfigError> {
        let c = &self.config;
        if c.eps.len() < 3 {
            return Err(invalid("eps", "the assembly table needs at least three radii"));
        }
        let side = c.grid_n as f64 * self.grid_h;
        if side < 1.0 + 2.0 * c.eps[0] {
            return Err(invalid(
                "grid-h",
                format!("grid side {side} must be at least 1 + 2 eps = {}", 1.0 + 2.0 * c.eps[0]),
            ));
        }
        Ok(())
    }
}
