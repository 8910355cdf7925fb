//! `cvteleport` — figures of merit and verification curves for a
//! continuous-variable teleporter, driven by a JSON run configuration.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 request
//! outside the closed-form oracle's scope, 4 I/O failure.

mod commands;
mod config;
mod table;

use clap::{Parser, Subcommand, ValueEnum};
use config::{OutputFormat, RunConfig};
use cvteleport_core::Error;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "cvteleport", version, about = "Continuous-variable teleportation simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Csv,
    Json,
}

#[derive(clap::Args)]
struct CommonArgs {
    /// JSON run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Write results here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Output format; overrides the configuration's output section.
    #[arg(long, value_enum)]
    format: Option<FormatArg>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full chain once and report every figure of merit.
    Teleport {
        #[command(flatten)]
        common: CommonArgs,
        /// Cross-check output variances by direct sampling.
        #[arg(long)]
        samples: Option<usize>,
        /// Seed for the Monte Carlo cross-check.
        #[arg(long)]
        seed: Option<u64>,
        /// Also report the closed-form oracle's output variances; fails if
        /// the configuration is outside the oracle's scope.
        #[arg(long)]
        oracle: bool,
    },
    /// Sweep the feedforward gain at fixed resources.
    SweepGain {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Emit T-V diagram curve families.
    TvMap {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Entanglement diagnostics of the resource pair.
    Duan {
        #[command(flatten)]
        common: CommonArgs,
    },
    /// Synthesize verification spectrum-analyzer traces.
    Spectrum {
        #[command(flatten)]
        common: CommonArgs,
        /// Seed for the synthesized noise floors.
        #[arg(long)]
        seed: Option<u64>,
    },
}

const EXIT_CONFIG: u8 = 2;
const EXIT_ORACLE_SCOPE: u8 = 3;
const EXIT_IO: u8 = 4;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Core(err)) => {
            eprintln!("error: {err}");
            match err {
                Error::OracleScope(_) => ExitCode::from(EXIT_ORACLE_SCOPE),
                _ => ExitCode::from(EXIT_CONFIG),
            }
        }
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_IO)
        }
    }
}

enum CliError {
    Core(Error),
    Config(String),
    Io(String),
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Core(err)
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let (common, table) = match cli.command {
        Command::Teleport {
            common,
            samples,
            seed,
            oracle,
        } => {
            let config = load_config(&common.config)?;
            let table = commands::teleport(&config, samples, seed, oracle)?;
            ((common, config), table)
        }
        Command::SweepGain { common } => {
            let config = load_config(&common.config)?;
            let table = commands::sweep_gain(&config)?;
            ((common, config), table)
        }
        Command::TvMap { common } => {
            let config = load_config(&common.config)?;
            let table = commands::tv_map(&config)?;
            ((common, config), table)
        }
        Command::Duan { common } => {
            let config = load_config(&common.config)?;
            let table = commands::duan(&config)?;
            ((common, config), table)
        }
        Command::Spectrum { common, seed } => {
            let config = load_config(&common.config)?;
            let table = commands::spectrum(&config, seed)?;
            ((common, config), table)
        }
    };
    let (common, config) = common;
    emit(&table, &common, &config)
}

fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let config: RunConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::Config(format!("invalid configuration {}: {e}", path.display())))?;
    config.teleporter.validate()?;
    Ok(config)
}

fn emit(
    table: &table::CurveTable,
    common: &CommonArgs,
    config: &RunConfig,
) -> Result<(), CliError> {
    let output = config.output.as_ref();
    let format = common
        .format
        .map(|f| match f {
            FormatArg::Csv => OutputFormat::Csv,
            FormatArg::Json => OutputFormat::Json,
        })
        .or(output.and_then(|o| o.format))
        .unwrap_or(OutputFormat::Csv);
    let rendered = match format {
        OutputFormat::Csv => table.to_csv(),
        OutputFormat::Json => table.to_json(),
    };
    let path = common
        .out
        .clone()
        .or(output.and_then(|o| o.path.as_ref().map(PathBuf::from)));
    match path {
        Some(path) => std::fs::write(&path, rendered)
            .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display()))),
        None => {
            use std::io::Write;
            // A closed pipe (e.g. piping into `head`) is not an error.
            match std::io::stdout().write_all(rendered.as_bytes()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    Err(CliError::Io(format!("cannot write to stdout: {e}")))
                }
                _ => Ok(()),
            }
        }
    }
}
