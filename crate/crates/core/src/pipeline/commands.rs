use std::collections::BTreeMap;
use std::convert::Infallible;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::Serialize;

use super::config::{AnalysisConfig, ValidatedConfig};
use super::manifest::{RunManifest, Stages, Verdict};
use super::verify::{run_suite, Suite};
use crate::factorization::{
    check_fredholm_condition, estimate_wave_index, factorize_stratification, validate_wave_factors,
    FactorizationOptions, WaveFactorCandidate, WaveOptions, WindingOptions,
};
use crate::geometry::{build_covering, stratify, Covering, Stratification};
use crate::lab::io::{write_convergence_csv, write_json, write_operator};
use crate::lab::{
    assemble_operator, assembly_convergence, assembly_grid_with_spacing, domain_partition, frozen_family,
    ConvergenceTable, DiscreteOperator, LabError,
};
use crate::symbol::{check_ellipticity_with_tol, EllipticityReport, FrequencyGrid, Symbol};

const NOT_ELLIPTIC: &str = "symbol is not elliptic; the ellipticity verdict settles the analysis";

/// Largest lattice whose assembled operator is exported as a dense matrix.
const EXPORT_LIMIT: usize = 1024;

/// Extra files a command produces next to its manifest.
#[derive(Debug, Clone)]
pub enum Artifact {
    ConvergenceCsv { name: String, table: ConvergenceTable },
    Operator { name: String, op: DiscreteOperator },
}

#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub manifest: RunManifest,
    pub artifacts: Vec<Artifact>,
}

/// Writes `manifest.json` and every artifact into `out`, returning the
/// paths written.
pub fn write_artifacts(out: &Path, output: &CommandOutput) -> Result<Vec<PathBuf>, LabError> {
    fs::create_dir_all(out).map_err(|e| LabError::Io(format!("{}: {e}", out.display())))?;
    let manifest = out.join("manifest.json");
    write_json(&output.manifest, &manifest)?;
    let mut written = vec![manifest];
    for a in &output.artifacts {
        match a {
            Artifact::ConvergenceCsv { name, table } => {
                let p = out.join(format!("{name}.csv"));
                write_convergence_csv(table, &p)?;
                written.push(p);
            }
            Artifact::Operator { name, op } => {
                let (bin, json) = write_operator(op, &out.join(name))?;
                written.extend([bin, json]);
            }
        }
    }
    Ok(written)
}

fn unit_box_samples(dim: usize) -> Vec<Vec<f64>> {
    let ticks = [0.0, 0.5, 1.0];
    (0..3usize.pow(dim as u32))
        .map(|mut code| {
            (0..dim)
                .map(|_| {
                    let t = ticks[code % 3];
                    code /= 3;
                    t
                })
                .collect()
        })
        .collect()
}

fn factorization_options(c: &AnalysisConfig) -> FactorizationOptions {
    FactorizationOptions {
        winding: WindingOptions {
            cutoff: c.cutoff,
            samples: c.quad_samples,
            tol_ell: c.tol_ell,
        },
        rays: c.rays,
        ..FactorizationOptions::default()
    }
}

fn ellipticity_stage(stages: &mut Stages, v: &ValidatedConfig, verdict: &mut Verdict) -> Option<EllipticityReport> {
    let grid = FrequencyGrid {
        seed: v.config.seed,
        ..FrequencyGrid::default()
    };
    let rep = stages.run("ellipticity", || {
        check_ellipticity_with_tol(&v.symbol, &unit_box_samples(v.model.dim()), &grid, v.config.tol_ell)
    });
    verdict.elliptic = rep.as_ref().map(|r| r.elliptic);
    rep
}

fn stratification_stage(stages: &mut Stages, v: &ValidatedConfig) -> Option<Stratification> {
    stages.run("stratification", || Ok::<_, Infallible>(stratify(v.model)))
}

/// Reason a stage cannot run, or `None` when its inputs are present.
fn blocked(elliptic: Option<bool>, inputs_present: bool) -> Option<&'static str> {
    match elliptic {
        Some(false) => Some(NOT_ELLIPTIC),
        _ if !inputs_present => Some("an upstream stage failed"),
        _ => None,
    }
}

fn assembly_table(v: &ValidatedConfig, strat: &Stratification) -> Result<ConvergenceTable, LabError> {
    let c = &v.config;
    let grid = assembly_grid_with_spacing(v.model.dim(), c.grid_n, v.grid_h)?;
    assembly_convergence(&v.symbol, strat, &c.eps, &grid, c.s_order)
}

/// Ellipticity, stratification, per-stratum indices, the Fredholm verdict
/// and, for planar models, the assembly table.
pub fn cmd_analyze(v: &ValidatedConfig) -> CommandOutput {
    let c = &v.config;
    let mut stages = Stages::new();
    let mut verdict = Verdict::default();
    let mut artifacts = Vec::new();
    let ell = ellipticity_stage(&mut stages, v, &mut verdict);
    let elliptic = ell.as_ref().map(|r| r.elliptic);
    let strat = stratification_stage(&mut stages, v);

    let reports = match (blocked(elliptic, ell.is_some() && strat.is_some()), &strat) {
        (None, Some(strat)) => stages.run("factorization", || {
            factorize_stratification(&v.symbol, strat, &factorization_options(c), &BTreeMap::new())
        }),
        (reason, _) => {
            stages.skip("factorization", reason.unwrap_or("an upstream stage failed"));
            None
        }
    };

    match (blocked(elliptic, reports.is_some()), &strat, &reports) {
        (None, Some(strat), Some(reports)) => {
            let fv = stages.run("fredholm", || check_fredholm_condition(strat, reports, c.s_order, true));
            verdict.fredholm = fv.map(|f| f.fredholm);
        }
        (reason, _, _) => {
            if elliptic == Some(false) {
                verdict.fredholm = Some(false);
            }
            stages.skip("fredholm", reason.unwrap_or("an upstream stage failed"));
        }
    }

    match (blocked(elliptic, strat.is_some()), &strat) {
        (None, Some(strat)) => {
            if v.model.dim() > 2 {
                stages.skip("assembly", "assembly tables are computed for planar models only; use `assemble`");
            } else if let Err(e) = v.check_assembly() {
                stages.skip("assembly", e.to_string());
            } else if let Some(table) = stages.run("assembly", || assembly_table(v, strat)) {
                artifacts.push(Artifact::ConvergenceCsv {
                    name: "convergence".into(),
                    table,
                });
            }
        }
        (reason, _) => stages.skip("assembly", reason.unwrap_or("an upstream stage failed")),
    }

    stages.skip(
        "index",
        "the index of an assembled operator is not computed from its pieces; `verify additivity` checks index sums on direct sums",
    );
    CommandOutput {
        manifest: stages.finish("analyze", c, verdict),
        artifacts,
    }
}

#[derive(Serialize)]
struct CoveringSummary {
    eps: f64,
    balls_per_stage: Vec<usize>,
    covering: Covering,
}

/// Strata of the model and a covering for every radius.
pub fn cmd_stratify(v: &ValidatedConfig) -> CommandOutput {
    let c = &v.config;
    let mut stages = Stages::new();
    if let Some(strat) = stratification_stage(&mut stages, v) {
        stages.run("covering", || {
            c.eps
                .iter()
                .map(|&e| {
                    let covering = build_covering(&strat, e)?;
                    Ok(CoveringSummary {
                        eps: e,
                        balls_per_stage: covering.stages.iter().map(Vec::len).collect(),
                        covering,
                    })
                })
                .collect::<Result<Vec<_>, crate::geometry::GeometryError>>()
        });
    } else {
        stages.skip("covering", "an upstream stage failed");
    }
    CommandOutput {
        manifest: stages.finish("stratify", c, Verdict::default()),
        artifacts: Vec::new(),
    }
}

/// Factorization indices on every boundary stratum.
pub fn cmd_winding(v: &ValidatedConfig) -> CommandOutput {
    let c = &v.config;
    let mut stages = Stages::new();
    let mut verdict = Verdict::default();
    let ell = ellipticity_stage(&mut stages, v, &mut verdict);
    let elliptic = ell.as_ref().map(|r| r.elliptic);
    let strat = stratification_stage(&mut stages, v);
    match (blocked(elliptic, ell.is_some() && strat.is_some()), &strat) {
        (None, Some(strat)) => {
            stages.run("factorization", || {
                factorize_stratification(&v.symbol, strat, &factorization_options(c), &BTreeMap::new())
            });
        }
        (reason, _) => stages.skip("factorization", reason.unwrap_or("an upstream stage failed")),
    }
    CommandOutput {
        manifest: stages.finish("winding", c, verdict),
        artifacts: Vec::new(),
    }
}

/// Product, growth and support checks of a wave-factor candidate, plus its
/// index estimated from growth. A failed check is a verdict.
pub fn cmd_wave_validate(c: &AnalysisConfig, symbol: &Symbol, cand: &WaveFactorCandidate) -> CommandOutput {
    let mut stages = Stages::new();
    let mut verdict = Verdict::default();
    let x0 = vec![0.0; cand.dim()];
    let opts = WaveOptions {
        rays: c.rays,
        ..WaveOptions::default()
    };
    let val = stages.run("validation", || validate_wave_factors(symbol, &x0, cand, &opts));
    verdict.wave_factorization = val.as_ref().map(|v| v.passed());
    stages.run("wave-index", || estimate_wave_index(cand, &x0, c.rays));
    CommandOutput {
        manifest: stages.finish("wave-validate", c, verdict),
        artifacts: Vec::new(),
    }
}

/// Assembly convergence table; small lattices also export the assembled
/// operator at the finest radius.
pub fn cmd_assemble(v: &ValidatedConfig) -> CommandOutput {
    let c = &v.config;
    let mut stages = Stages::new();
    let mut artifacts = Vec::new();
    let strat = stratification_stage(&mut stages, v);
    let table = match &strat {
        Some(strat) => stages.run("assembly", || assembly_table(v, strat)),
        None => {
            stages.skip("assembly", "an upstream stage failed");
            None
        }
    };
    if let Some(table) = table {
        artifacts.push(Artifact::ConvergenceCsv {
            name: "convergence".into(),
            table,
        });
    }
    let points = c.grid_n.pow(v.model.dim() as u32);
    match &strat {
        Some(strat) if points <= EXPORT_LIMIT => {
            let eps = *c.eps.last().expect("validated eps is nonempty");
            let name = format!("assembled_eps_{eps}");
            let mut built = None;
            stages.run("export", || {
                let grid = assembly_grid_with_spacing(v.model.dim(), c.grid_n, v.grid_h)?;
                let pou = domain_partition(strat, eps, &grid)?;
                let op = assemble_operator(&frozen_family(&v.symbol, &pou, c.s_order)?, &pou)?;
                let summary = serde_json::json!({
                    "name": name,
                    "eps": eps,
                    "rows": op.rows(),
                    "cols": op.cols(),
                    "provenance": op.provenance,
                });
                built = Some(op);
                Ok::<_, LabError>(summary)
            });
            if let Some(op) = built {
                artifacts.push(Artifact::Operator { name, op });
            }
        }
        Some(_) => stages.skip("export", format!("{points} lattice points exceed the dense export limit {EXPORT_LIMIT}")),
        None => stages.skip("export", "an upstream stage failed"),
    }
    CommandOutput {
        manifest: stages.finish("assemble", c, Verdict::default()),
        artifacts,
    }
}

/// Runs the named suites with the configured seed; one stage per suite.
pub fn cmd_verify(suites: &[Suite], c: &AnalysisConfig) -> CommandOutput {
    let mut stages = Stages::new();
    let mut all = true;
    for &suite in suites {
        let t0 = Instant::now();
        let report = run_suite(suite, c.seed);
        let failure = (!report.all_passed()).then(|| format!("{} of {} cases failed", report.failed, report.cases.len()));
        all &= report.all_passed();
        stages.record(&format!("verify-{suite}"), &report, failure, t0.elapsed().as_secs_f64() * 1e3);
    }
    let verdict = Verdict {
        verified: Some(all),
        ..Verdict::default()
    };
    let names: Vec<String> = suites.iter().map(Suite::to_string).collect();
    CommandOutput {
        manifest: stages.finish(&format!("verify {}", names.join(",")), c, verdict),
        artifacts: Vec::new(),
    }
}
