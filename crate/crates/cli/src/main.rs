//! `covfdr`: covariate-aware FDR control on simulated or real summary data.
//!
//! Subcommands: `simulate` (Monte Carlo evaluation of the procedures),
//! `analyze` (run one procedure on a CSV of p-values and covariates),
//! `pca` (loadings/eigenvalues/scores export), `report` (consolidate output
//! directories). Exit codes: 0 success, 1 I/O or runtime failure, 2 usage.

mod analyze;
mod config;
mod pca_cmd;
mod report;
mod simulate;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use config::FileConfig;

#[derive(Parser)]
#[command(
    name = "covfdr",
    version,
    about = "Covariate-aware false discovery rate control toolkit"
)]
struct Cli {
    /// Worker threads for the parallel sections (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Key = value config file; explicit flags override file values.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a simulation scenario and evaluate the testing procedures.
    Simulate(simulate::SimulateArgs),
    /// Apply a procedure to a CSV of p-values and covariates.
    Analyze(analyze::AnalyzeArgs),
    /// PCA of the covariate columns: loadings, eigenvalues, scores.
    Pca(pca_cmd::PcaArgs),
    /// Consolidate result tables from an output directory.
    Report(report::ReportArgs),
}

/// CSV tables, JSON mirrors, or both.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Csv,
    Json,
    Both,
}

impl OutputFormat {
    pub fn csv(self) -> bool {
        matches!(self, OutputFormat::Csv | OutputFormat::Both)
    }

    pub fn json(self) -> bool {
        matches!(self, OutputFormat::Json | OutputFormat::Both)
    }
}

impl std::str::FromStr for OutputFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            "both" => Ok(OutputFormat::Both),
            other => Err(format!("unknown format `{other}`")),
        }
    }
}

/// Errors split by exit code: usage mistakes exit 2, failures exit 1.
pub enum CliError {
    Usage(String),
    Failure(anyhow::Error),
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Failure(e)
    }
}

impl From<covfdr::Error> for CliError {
    fn from(e: covfdr::Error) -> Self {
        CliError::Failure(anyhow::Error::new(e))
    }
}

pub type CliResult = Result<(), CliError>;

/// Output directory: the environment override wins, then the flag, then the
/// config file.
pub fn resolve_out_dir(flag: Option<PathBuf>, cfg: &FileConfig) -> Result<PathBuf, CliError> {
    if let Ok(env_dir) = std::env::var("COVFDR_OUT_DIR") {
        if !env_dir.is_empty() {
            return Ok(PathBuf::from(env_dir));
        }
    }
    flag.or_else(|| cfg.get_string("out").map(PathBuf::from))
        .ok_or_else(|| CliError::Usage("missing --out directory".into()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();

    let file_config = match &cli.config {
        Some(path) => match FileConfig::load(path) {
            Ok(cfg) => cfg,
            Err(e) => {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
        },
        None => FileConfig::empty(),
    };

    if let Some(threads) = cli
        .threads
        .or_else(|| file_config.get_parsed("threads").ok().flatten())
    {
        covfdr::configure_threads(threads);
    }

    let outcome = match cli.command {
        Command::Simulate(args) => simulate::run(args, &file_config),
        Command::Analyze(args) => analyze::run(args, &file_config),
        Command::Pca(args) => pca_cmd::run(args, &file_config),
        Command::Report(args) => report::run(args, &file_config),
    };

    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Failure(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
