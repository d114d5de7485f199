use std::collections::BTreeMap;
use std::fmt::Display;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::config::AnalysisConfig;
use super::exit;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum StageOutcome {
    Completed { report: serde_json::Value },
    Skipped { reason: String },
    Failed {
        error: String,
        #[serde(skip_serializing_if = "Option::is_none", default)]
        report: Option<serde_json::Value>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub outcome: StageOutcome,
    pub wall_ms: f64,
}

/// Classification results; `None` when the deciding stage did not run.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub elliptic: Option<bool>,
    pub fredholm: Option<bool>,
    /// Verification suites: every case passed.
    pub verified: Option<bool>,
    /// Wave-factor candidate: all three checks passed.
    pub wave_factorization: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub command: String,
    pub config_hash: String,
    pub config: AnalysisConfig,
    pub conventions: BTreeMap<String, String>,
    pub stages: Vec<StageRecord>,
    pub verdict: Verdict,
    pub exit_code: i32,
}

impl RunManifest {
    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.stage == name)
    }

    /// The manifest with every wall time zeroed, for reproducibility checks.
    pub fn without_timings(&self) -> RunManifest {
        let mut m = self.clone();
        m.stages.iter_mut().for_each(|s| s.wall_ms = 0.0);
        m
    }
}

/// Collects stage records in execution order.
pub(crate) struct Stages {
    records: Vec<StageRecord>,
}

impl Stages {
    pub(crate) fn new() -> Self {
        Stages { records: Vec::new() }
    }

    pub(crate) fn run<T: Serialize, E: Display>(&mut self, name: &str, f: impl FnOnce() -> Result<T, E>) -> Option<T> {
        let t0 = Instant::now();
        let result = f();
        let wall_ms = t0.elapsed().as_secs_f64() * 1e3;
        let (outcome, value) = match result {
            Ok(v) => match serde_json::to_value(&v) {
                Ok(report) => (StageOutcome::Completed { report }, Some(v)),
                Err(e) => (StageOutcome::Failed { error: format!("report serialization: {e}"), report: None }, None),
            },
            Err(e) => (StageOutcome::Failed { error: e.to_string(), report: None }, None),
        };
        self.records.push(StageRecord {
            stage: name.to_string(),
            outcome,
            wall_ms,
        });
        value
    }

    /// Records a finished stage; `failure` marks it failed while keeping
    /// the report.
    pub(crate) fn record<T: Serialize>(&mut self, name: &str, report: &T, failure: Option<String>, wall_ms: f64) {
        let outcome = match (serde_json::to_value(report), failure) {
            (Ok(r), None) => StageOutcome::Completed { report: r },
            (Ok(r), Some(error)) => StageOutcome::Failed { error, report: Some(r) },
            (Err(e), _) => StageOutcome::Failed { error: format!("report serialization: {e}"), report: None },
        };
        self.records.push(StageRecord {
            stage: name.to_string(),
            outcome,
            wall_ms,
        });
    }

    pub(crate) fn skip(&mut self, name: &str, reason: impl Into<String>) {
        self.records.push(StageRecord {
            stage: name.to_string(),
            outcome: StageOutcome::Skipped { reason: reason.into() },
            wall_ms: 0.0,
        });
    }

    pub(crate) fn finish(self, command: &str, config: &AnalysisConfig, verdict: Verdict) -> RunManifest {
        let failed = self.records.iter().any(|r| matches!(r.outcome, StageOutcome::Failed { .. }));
        let conventions = BTreeMap::from([
            ("ae".to_string(), crate::factorization::AE_CONVENTION.to_string()),
            ("dual_cone".to_string(), crate::geometry::DUAL_CONVENTION.to_string()),
            (
                "fourier".to_string(),
                "forward sum u(x) e^{+i x.xi}; inverse e^{-i x.xi} / N^m; phases by index".to_string(),
            ),
        ]);
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            command: command.to_string(),
            config_hash: config.hash(),
            config: config.clone(),
            conventions,
            stages: self.records,
            verdict,
            exit_code: if failed { exit::STAGE_ERROR } else { exit::COMPLETED },
        }
    }
}
