use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use opsymbol::pipeline::{
    cmd_analyze, cmd_assemble, cmd_stratify, cmd_verify, cmd_wave_validate, cmd_winding, exit, write_artifacts,
    AnalysisConfig, CommandOutput, ConfigError, Suite, WaveSpec,
};

#[derive(Parser)]
#[command(name = "opsymbol", version, about = "Symbol analysis and discrete operator experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Ellipticity, stratification, factorization, Fredholm verdict and assembly table.
    Analyze(Common),
    /// Seeded verification suites.
    Verify {
        /// Comma-separated suites: all, toeplitz, additivity, paired, assembly, locality.
        #[arg(long, default_value = "all")]
        suite: String,
        #[command(flatten)]
        common: Common,
    },
    /// Strata of the model and the nested coverings.
    Stratify(Common),
    /// Boundary-symbol windings at every stratum.
    Winding(Common),
    /// Checks a proposed wave factorization of the symbol.
    WaveValidate {
        #[arg(long)]
        a_neq: String,
        #[arg(long, default_value = "1")]
        a_eq: String,
        /// Cone generators, rows separated by `;`, entries by `,` (e.g. "1,0;0,1").
        #[arg(long)]
        cone: String,
        /// Number of free (non-cone) variables.
        #[arg(long, default_value_t = 0)]
        k: usize,
        /// Declared factorization index.
        #[arg(long)]
        ae: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Assembles the operator from local frozen patches and reports convergence.
    Assemble(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    symbol: Option<String>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    model: Option<String>,
    #[arg(long = "s-order")]
    s_order: Option<f64>,
    /// Comma-separated, strictly decreasing radii.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long = "grid-n")]
    grid_n: Option<usize>,
    #[arg(long = "grid-h")]
    grid_h: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    rays: Option<usize>,
    #[arg(long, default_value_t = 1e4)]
    cutoff: f64,
    #[arg(long = "quad-samples", default_value_t = 1 << 16)]
    quad_samples: usize,
}

impl Common {
    fn config(self) -> AnalysisConfig {
        let d = AnalysisConfig::default();
        AnalysisConfig {
            symbol: self.symbol.unwrap_or(d.symbol),
            alpha: self.alpha.unwrap_or(d.alpha),
            model: self.model.unwrap_or(d.model),
            s_order: self.s_order.unwrap_or(d.s_order),
            eps: self.eps.unwrap_or(d.eps),
            grid_n: self.grid_n.unwrap_or(d.grid_n),
            grid_h: self.grid_h,
            seed: self.seed.unwrap_or(d.seed),
            cutoff: self.cutoff,
            quad_samples: self.quad_samples,
            rays: self.rays.unwrap_or(d.rays),
            out: self.out,
            ..d
        }
    }
}

fn config_error(field: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        reason: reason.into(),
    }
}

fn parse_cone(s: &str) -> Result<Vec<Vec<i64>>, ConfigError> {
    s.split(';')
        .map(|row| {
            row.split(',')
                .map(|v| v.trim().parse::<i64>().map_err(|e| config_error("cone", format!("`{v}`: {e}"))))
                .collect()
        })
        .collect()
}

fn parse_suites(s: &str) -> Result<Vec<Suite>, ConfigError> {
    if s.trim() == "all" {
        return Ok(Suite::ALL.to_vec());
    }
    s.split(',').map(|p| p.trim().parse::<Suite>().map_err(|e| config_error("suite", e))).collect()
}

fn run(command: Command) -> Result<(CommandOutput, Option<PathBuf>), ConfigError> {
    let output = match command {
        Command::Analyze(c) => cmd_analyze(&c.config().validate()?),
        Command::Stratify(c) => cmd_stratify(&c.config().validate()?),
        Command::Winding(c) => cmd_winding(&c.config().validate()?),
        Command::Assemble(c) => cmd_assemble(&c.config().validate()?),
        Command::Verify { suite, common } => {
            let suites = parse_suites(&suite)?;
            let c = common.config();
            c.validate()?;
            cmd_verify(&suites, &c)
        }
        Command::WaveValidate { a_neq, a_eq, cone, k, ae, common } => {
            let mut c = common.config();
            c.wave = Some(WaveSpec {
                a_neq,
                a_eq,
                cone: parse_cone(&cone)?,
                k,
                declared_ae: ae,
            });
            let (symbol, cand) = c.validate_wave()?;
            cmd_wave_validate(&c, &symbol, &cand)
        }
    };
    let out = output.manifest.config.out.clone();
    Ok((output, out))
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::CONFIG_INVALID } else { exit::COMPLETED };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let (output, out) = match run(cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit::CONFIG_INVALID as u8);
        }
    };
    match serde_json::to_string_pretty(&output.manifest) {
        Ok(json) => println!("{json}"),
        Err(e) => {
            eprintln!("error: manifest serialization: {e}");
            return ExitCode::from(exit::STAGE_ERROR as u8);
        }
    }
    if let Some(dir) = out {
        if let Err(e) = write_artifacts(&dir, &output) {
            eprintln!("error: writing artifacts to {}: {e}", dir.display());
            return ExitCode::from(exit::STAGE_ERROR as u8);
        }
    }
    ExitCode::from(output.manifest.exit_code as u8)
}
