use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};

use boussinesq_core::io::{parse_config, Metadata, Report, ReportKind, RunConfig};
use boussinesq_core::{Error, Result};

mod commands;

#[derive(Parser)]
#[command(
    name = "boussinesq",
    version,
    about = "Order-reduced finite differences for the 2D Boussinesq equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate per the config, writing snapshots, norms.csv and report.json.
    Run(RunArgs),
    /// Self-convergence study at a fixed final time.
    Converge(ConvergeArgs),
    /// Truncation-residual refinement study of the exact profile.
    Consistency(ConsistencyArgs),
    /// Empirical stability probe with the closed-form radii for comparison.
    Stability(StabilityArgs),
    /// Sampled operator-norm bounds.
    Operators(OperatorsArgs),
    /// Pivoted elimination on the Kronecker form of the step operator.
    Solvability(SolvabilityArgs),
    /// Fixed-point versus Kronecker solver cross-check.
    Oracle(OracleArgs),
    /// Closed-form admissible radii.
    Eta(EtaArgs),
}

#[derive(Args)]
struct Common {
    /// JSON run configuration.
    #[arg(short, long)]
    config: Option<PathBuf>,
    /// Override the number of cells per side.
    #[arg(long = "J", value_name = "N")]
    cells: Option<usize>,
    /// Write the report into this directory instead of stdout.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[arg(short, long)]
    config: PathBuf,
    /// Output directory; defaults to `output.directory` from the config.
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ConvergeArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Steps on the coarsest level; finer levels cover the same time.
    #[arg(long, default_value_t = 2)]
    steps: usize,
}

#[derive(Args)]
struct ConsistencyArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 3)]
    levels: usize,
}

#[derive(Args)]
struct StabilityArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long, default_value_t = 0.1)]
    epsilon: f64,
    #[arg(long, default_value_t = 100)]
    steps: usize,
    #[arg(long, default_value_t = 8)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OperatorsArgs {
    #[command(flatten)]
    common: Common,
    /// Number of random unit matrices.
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct SolvabilityArgs {
    #[command(flatten)]
    common: Common,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    common: Common,
    /// Weights to sweep.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.4])]
    alpha: Vec<f64>,
    /// Random right-hand sides per case.
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct EtaArgs {
    #[command(flatten)]
    common: Common,
    #[arg(long)]
    epsilon: f64,
    /// Time step; defaults to the one derived from the grid.
    #[arg(long)]
    l: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    phi_norm: f64,
}

/// Outcome of a subcommand: the report to emit and whether it records a
/// numerical failure.
pub(crate) struct Outcome {
    report: Report,
    failed: bool,
}

impl Outcome {
    pub(crate) fn ok(report: Report) -> Self {
        Outcome { report, failed: false }
    }

    pub(crate) fn numerical(kind: ReportKind, e: &Error, metadata: Metadata) -> Self {
        Outcome {
            report: Report::failure(kind, e, metadata),
            failed: true,
        }
    }
}

const DEFAULT_CONFIG: &str = r#"{
  "domain": {"L0": 0, "L1": 1},
  "grid": {"J": 16},
  "initial": {"profile": "cosine"}
}"#;

pub(crate) struct Loaded {
    pub config: RunConfig,
    pub echo: serde_json::Value,
}

/// Reads and validates the config (or the built-in default) and applies a
/// `--J` override.
pub(crate) fn load(path: Option<&Path>, cells: Option<usize>) -> Result<Loaded> {
    let text = match path {
        Some(p) => std::fs::read_to_string(p).map_err(|e| Error::Io {
            path: p.to_path_buf(),
            source: e,
        })?,
        None => DEFAULT_CONFIG.to_string(),
    };
    let mut config = parse_config(&text)?;
    if let Some(j) = cells {
        config.grid.cells = j;
        if config.coupling.mode == boussinesq_core::io::CouplingMode::Coupled {
            config.coupling.l = None;
        }
        config = parse_config(&config.echo())?;
    }
    let echo = serde_json::to_value(&config)?;
    Ok(Loaded { config, echo })
}

fn emit(report: &Report, out: Option<&Path>, file: &str) -> Result<()> {
    match out {
        Some(dir) => {
            std::fs::create_dir_all(dir).map_err(|e| Error::Io {
                path: dir.to_path_buf(),
                source: e,
            })?;
            report.write(&dir.join(file))
        }
        None => {
            print!("{}", report.to_canonical());
            Ok(())
        }
    }
}

fn dispatch(command: Command) -> Result<bool> {
    let (outcome, out, file) = match command {
        Command::Run(a) => return commands::run(&a.config, a.out.as_deref()),
        Command::Converge(a) => (
            commands::converge(&a.common, a.levels, a.steps)?,
            a.common.out,
            "convergence.json",
        ),
        Command::Consistency(a) => (
            commands::consistency(&a.common, a.levels)?,
            a.common.out,
            "consistency.json",
        ),
        Command::Stability(a) => (
            commands::stability(&a.common, a.epsilon, a.steps, a.trials, a.seed)?,
            a.common.out,
            "stability.json",
        ),
        Command::Operators(a) => (
            commands::operators(&a.common, a.trials, a.seed)?,
            a.common.out,
            "operators.json",
        ),
        Command::Solvability(a) => (commands::solvability(&a.common)?, a.common.out, "solvability.json"),
        Command::Oracle(a) => (
            commands::oracle(&a.common, &a.alpha, a.trials, a.seed)?,
            a.common.out,
            "oracle.json",
        ),
        Command::Eta(a) => {
            let outcome = commands::eta(&a.common, a.epsilon, a.l, a.phi_norm)?;
            if let Some(dir) = a.common.out.as_deref() {
                emit(&outcome.report, Some(dir), "eta.json")?;
            }
            return Ok(!outcome.failed);
        }
    };
    emit(&outcome.report, out.as_deref(), file)?;
    if let Some(rec) = &outcome.report.error {
        eprintln!("error: {}", rec.message);
    }
    Ok(!outcome.failed)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(1),
            };
        }
    };
    match dispatch(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_numerical() { 2 } else { 1 })
        }
    }
}
