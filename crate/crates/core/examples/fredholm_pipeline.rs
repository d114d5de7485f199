//! Runs the full analysis on the square for a few symbols and prints the
//! per-stratum indices and the Fredholm verdict. Optionally writes the
//! manifest and convergence table to the directory given as argument.
use opsymbol::pipeline::{cmd_analyze, write_artifacts, AnalysisConfig, StageOutcome};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1);
    for (symbol, alpha, s_order) in [("(1 + abs2(k))^(1/2)", 1.0, 0.5), ("(1 + abs2(k))^(1/2)", 1.0, 1.5), ("k1", 1.0, 0.0)] {
        let config = AnalysisConfig {
            symbol: symbol.into(),
            alpha,
            s_order,
            grid_n: 32,
            ..AnalysisConfig::default()
        };
        let output = cmd_analyze(&config.validate()?);
        let m = &output.manifest;
        println!("{symbol}, alpha = {alpha}, s = {s_order}");
        for st in &m.stages {
            let status = match &st.outcome {
                StageOutcome::Completed { .. } => "completed".to_string(),
                StageOutcome::Skipped { reason } => format!("skipped ({reason})"),
                StageOutcome::Failed { error, .. } => format!("failed ({error})"),
            };
            println!("  {:<15} {status}", st.stage);
        }
        println!("  verdict: {:?}, exit code {}", m.verdict, m.exit_code);
        if let Some(dir) = &out {
            let dir = std::path::Path::new(dir).join(format!("s{s_order}-{}", m.config_hash.get(..8).unwrap_or("run")));
            for p in write_artifacts(&dir, &output)? {
                println!("  wrote {}", p.display());
            }
        }
    }
    Ok(())
}
