//! Batch orchestration behind the `opsymbol` binary: validated run
//! configurations, stage-by-stage manifests and the seeded verification
//! suites.

mod commands;
mod config;
mod manifest;
mod verify;

pub use commands::{cmd_analyze, cmd_assemble, cmd_stratify, cmd_verify, cmd_wave_validate, cmd_winding, write_artifacts, Artifact, CommandOutput};
pub use config::{AnalysisConfig, ConfigError, ValidatedConfig, WaveSpec};
pub use manifest::{RunManifest, StageOutcome, StageRecord, Verdict};
pub use verify::{run_suite, CaseResult, Suite, SuiteReport};

/// Process exit codes of the command-line front end.
pub mod exit {
    pub const COMPLETED: i32 = 0;
    pub const STAGE_ERROR: i32 = 2;
    pub const CONFIG_INVALID: i32 = 3;
}
