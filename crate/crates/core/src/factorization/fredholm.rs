use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::wave::{estimate_wave_index, WaveFactorCandidate};
use super::winding::{winding_along, WindingOptions};
use super::{FactorizationError, AE_CONVENTION};
use crate::geometry::{CanonicalDomain, Stratification, Stratum};
use crate::symbol::Symbol;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FactorizationMethod {
    WindingQuadrature,
    RootCount,
    WaveSlope,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FactorizationDiagnostics {
    pub windings: Vec<f64>,
    /// Largest change of a winding when the quadrature is halved.
    pub quadrature_residual: Option<f64>,
    /// Largest disagreement between two index computations at one point.
    pub method_disagreement: Option<f64>,
    pub notes: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationReport {
    pub stratum: String,
    pub k: usize,
    pub points: Vec<Vec<f64>>,
    pub ae_values: Vec<f64>,
    pub method: FactorizationMethod,
    pub diagnostics: FactorizationDiagnostics,
    pub convention: String,
}

impl FactorizationReport {
    /// Report holding externally computed index values.
    pub fn from_values(stratum: &str, k: usize, points: Vec<Vec<f64>>, ae_values: Vec<f64>, method: FactorizationMethod) -> Self {
        FactorizationReport {
            stratum: stratum.into(),
            k,
            points,
            ae_values,
            method,
            diagnostics: FactorizationDiagnostics::default(),
            convention: AE_CONVENTION.into(),
        }
    }

    pub fn ae_range(&self) -> Option<[f64; 2]> {
        if self.ae_values.is_empty() {
            return None;
        }
        let lo = self.ae_values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = self.ae_values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        Some([lo, hi])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorizationOptions {
    pub winding: WindingOptions,
    /// Sample points per stratum component (the anchor is always included).
    pub points_per_stratum: usize,
    pub rays: usize,
}

impl Default for FactorizationOptions {
    fn default() -> Self {
        FactorizationOptions {
            winding: WindingOptions::default(),
            points_per_stratum: 3,
            rays: 3,
        }
    }
}

fn unit_axis(m: usize, j: usize) -> Vec<f64> {
    let mut e = vec![0.0; m];
    e[j] = 1.0;
    e
}

fn chosen_points(st: &Stratum, count: usize) -> Vec<Vec<f64>> {
    let mut pts = vec![st.anchor()];
    let extra = count.saturating_sub(1);
    let n = st.sample_points.len();
    if extra > 0 && n > 0 {
        for i in 0..extra.min(n) {
            let p = &st.sample_points[i * n / extra.min(n)];
            if !pts.contains(p) {
                pts.push(p.clone());
            }
        }
    }
    pts
}

/// Index values on one boundary stratum.
///
/// Faces use the winding along the inward normal at `ξ' = ±e` for a tangent
/// unit vector `e`. Lower-dimensional strata use `wave` when supplied;
/// otherwise each inward normal of the wedge is treated as a half-space
/// normal and all resulting windings are reported, so the Fredholm margin is
/// taken over every normal.
pub fn factorize_stratum(
    s: &Symbol,
    st: &Stratum,
    opts: &FactorizationOptions,
    wave: Option<&WaveFactorCandidate>,
) -> Result<FactorizationReport, FactorizationError> {
    let m = s.dim();
    if st.frame.axes.len() != m {
        return Err(FactorizationError::Dimension(format!(
            "stratum has dimension {}, symbol {m}",
            st.frame.axes.len()
        )));
    }
    let points = chosen_points(st, opts.points_per_stratum);
    let mut diag = FactorizationDiagnostics::default();
    let mut values = Vec::new();
    let method;
    match (&st.domain, wave) {
        (CanonicalDomain::FullSpace { .. }, _) => {
            return Err(FactorizationError::Unsupported(
                "the interior stratum needs no factorization index".into(),
            ))
        }
        (CanonicalDomain::Wedge { .. }, Some(cand)) => {
            method = FactorizationMethod::WaveSlope;
            for p in &points {
                let est = estimate_wave_index(cand, p, opts.rays)?;
                diag.method_disagreement = Some(
                    diag.method_disagreement.unwrap_or(0.0).max((est.ae - cand.declared_ae).abs()),
                );
                values.push(est.ae);
            }
        }
        (domain, _) => {
            method = FactorizationMethod::WindingQuadrature;
            let normals: Vec<usize> = match domain {
                CanonicalDomain::HalfSpace { .. } => vec![m - 1],
                _ => (st.k..m).collect(),
            };
            if !matches!(domain, CanonicalDomain::HalfSpace { .. }) {
                diag.notes.push(format!(
                    "wedge stratum without wave factors: windings along each of the {} inward normals",
                    normals.len()
                ));
            }
            let coarse = WindingOptions {
                samples: opts.winding.samples / 2,
                ..opts.winding
            };
            let mut residual: f64 = 0.0;
            for p in &points {
                for &j in &normals {
                    let dir = st.frame.vector_to_ambient(&unit_axis(m, j));
                    // tangential offsets: along the first canonical axis other than j
                    let bases: Vec<Vec<f64>> = if m == 1 {
                        vec![vec![0.0]]
                    } else {
                        let t = if j == 0 { 1 } else { 0 };
                        let e = st.frame.vector_to_ambient(&unit_axis(m, t));
                        vec![e.clone(), e.iter().map(|v| -v).collect()]
                    };
                    for base in &bases {
                        let rep = winding_along(s, p, base, &dir, &opts.winding)?;
                        let half = winding_along(s, p, base, &dir, &coarse)?;
                        residual = residual.max((rep.winding - half.winding).abs());
                        diag.windings.push(rep.winding);
                        values.push(rep.ae);
                    }
                }
            }
            diag.quadrature_residual = Some(residual);
        }
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(FactorizationError::Unsupported("non-finite index value".into()));
    }
    Ok(FactorizationReport {
        stratum: st.label.clone(),
        k: st.k,
        points,
        ae_values: values,
        method,
        diagnostics: diag,
        convention: AE_CONVENTION.into(),
    })
}

/// Reports for every boundary stratum; `waves` maps stratum labels to
/// candidate factorizations.
pub fn factorize_stratification(
    s: &Symbol,
    strat: &Stratification,
    opts: &FactorizationOptions,
    waves: &BTreeMap<String, WaveFactorCandidate>,
) -> Result<Vec<FactorizationReport>, FactorizationError> {
    strat
        .strata
        .iter()
        .filter(|st| !st.is_interior())
        .map(|st| factorize_stratum(s, st, opts, waves.get(&st.label)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StratumVerdict {
    pub stratum: String,
    pub k: usize,
    pub ae_range: [f64; 2],
    pub s: f64,
    pub condition_met: bool,
    pub margin: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FredholmVerdict {
    pub strata: Vec<StratumVerdict>,
    pub interior_elliptic: bool,
    pub fredholm: bool,
}

/// Checks `|æ_k(x) - s| < 1/2` on every boundary stratum. The margin is
/// `1/2 - max|æ - s|`, attained at an endpoint of the sampled range.
pub fn check_fredholm_condition(
    strat: &Stratification,
    reports: &[FactorizationReport],
    s_order: f64,
    interior_elliptic: bool,
) -> Result<FredholmVerdict, FactorizationError> {
    let mut strata = Vec::new();
    for st in strat.strata.iter().filter(|st| !st.is_interior()) {
        let rep = reports
            .iter()
            .find(|r| r.stratum == st.label)
            .ok_or_else(|| FactorizationError::MissingStratumReport { label: st.label.clone() })?;
        let [lo, hi] = rep
            .ae_range()
            .ok_or_else(|| FactorizationError::MissingStratumReport { label: st.label.clone() })?;
        let margin = 0.5 - (lo - s_order).abs().max((hi - s_order).abs());
        strata.push(StratumVerdict {
            stratum: st.label.clone(),
            k: st.k,
            ae_range: [lo, hi],
            s: s_order,
            condition_met: margin > 0.0,
            margin,
        });
    }
    let fredholm = interior_elliptic && strata.iter().all(|v| v.condition_met);
    Ok(FredholmVerdict {
        strata,
        interior_elliptic,
        fredholm,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::stratify_model;

    fn constant_reports(strat: &Stratification, ae: f64) -> Vec<FactorizationReport> {
        strat
            .strata
            .iter()
            .filter(|st| !st.is_interior())
            .map(|st| {
                FactorizationReport::from_values(&st.label, st.k, vec![st.anchor()], vec![ae], FactorizationMethod::WindingQuadrature)
            })
            .collect()
    }

    #[test]
    fn arithmetic_examples() {
        let sq = stratify_model("square", 2).unwrap();
        let v = check_fredholm_condition(&sq, &constant_reports(&sq, 1.0), 1.0, true).unwrap();
        assert!(v.fredholm);
        assert!(v.strata.iter().all(|s| s.margin == 0.5));

        let mut reps = constant_reports(&sq, 0.0);
        let edge = reps.iter_mut().find(|r| r.k == 1).unwrap();
        edge.ae_values = vec![0.7];
        let v = check_fredholm_condition(&sq, &reps, 0.0, true).unwrap();
        assert!(!v.fredholm);
        let bad = v.strata.iter().find(|s| !s.condition_met).unwrap();
        assert!((bad.margin + 0.2).abs() < 1e-15);

        let mut reps = constant_reports(&sq, 0.5);
        reps[0].ae_values = vec![0.4, 0.6, 0.5];
        let v = check_fredholm_condition(&sq, &reps, 0.5, true).unwrap();
        assert!(v.fredholm);
        assert!((v.strata[0].margin - 0.4).abs() < 1e-15);
    }

    #[test]
    fn interior_ellipticity_required() {
        let sq = stratify_model("square", 2).unwrap();
        let v = check_fredholm_condition(&sq, &constant_reports(&sq, 0.0), 0.0, false).unwrap();
        assert!(!v.fredholm);
        assert!(v.strata.iter().all(|s| s.condition_met));
    }

    #[test]
    fn missing_report() {
        let sq = stratify_model("square", 2).unwrap();
        let mut reps = constant_reports(&sq, 0.0);
        reps.pop();
        assert!(matches!(
            check_fredholm_condition(&sq, &reps, 0.0, true),
            Err(FactorizationError::MissingStratumReport { .. })
        ));
    }

    #[test]
    fn bessel_symbol_on_square_and_cube() {
        let opts = FactorizationOptions {
            winding: WindingOptions { samples: 1 << 12, ..Default::default() },
            points_per_stratum: 2,
            rays: 3,
        };
        for (model, m) in [("square", 2), ("cube", 3)] {
            let strat = stratify_model(model, m).unwrap();
            let s = Symbol::parse("(1 + abs2(k))^(1/2)", m, 1.0).unwrap();
            let reps = factorize_stratification(&s, &strat, &opts, &BTreeMap::new()).unwrap();
            for (s_order, margin) in [(0.5, 0.5), (1.1, -0.1)] {
                let v = check_fredholm_condition(&strat, &reps, s_order, true).unwrap();
                for sv in &v.strata {
                    assert!((sv.margin - margin).abs() < 1e-9, "{sv:?}");
                }
                assert_eq!(v.fredholm, margin > 0.0);
            }
        }
    }

    #[test]
    fn scaling_does_not_change_verdict() {
        let strat = stratify_model("square", 2).unwrap();
        let opts = FactorizationOptions {
            winding: WindingOptions { samples: 1 << 12, ..Default::default() },
            points_per_stratum: 1,
            rays: 3,
        };
        let s = Symbol::parse("(1 + abs2(k))^(1/2) + i*k1", 2, 1.0).unwrap();
        let scaled = s.scaled(num_complex::Complex64::new(3.5, 0.0));
        let a = factorize_stratification(&s, &strat, &opts, &BTreeMap::new()).unwrap();
        let b = factorize_stratification(&scaled, &strat, &opts, &BTreeMap::new()).unwrap();
        let va = check_fredholm_condition(&strat, &a, 0.3, true).unwrap();
        let vb = check_fredholm_condition(&strat, &b, 0.3, true).unwrap();
        for (x, y) in va.strata.iter().zip(&vb.strata) {
            assert!((x.margin - y.margin).abs() < 1e-12);
            assert_eq!(x.condition_met, y.condition_met);
        }
    }
}
