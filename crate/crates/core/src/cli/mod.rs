//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 when a run fails or a verification does not
//! pass, 2 when the configuration is malformed or the surface is invalid.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use clap::{Parser, Subcommand};
use thiserror::Error;

pub use commands::{cmd_compare, cmd_integrate, cmd_invariants, cmd_verify, Outcome};
pub use config::RunConfig;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Runtime(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "finsler",
    version,
    about = "Invariants, identity checks and curve flows on Finsler surfaces"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate I, J, K and frame derivatives over a chart grid.
    Invariants(RunArgs),
    /// Check the structure equations and identities; exit 1 if any fails.
    Verify(RunArgs),
    /// Integrate a geodesic, N-parallel or N-extremal.
    Integrate(RunArgs),
    /// Integrate all three flows from matched initial data.
    Compare(RunArgs),
}

#[derive(Debug, clap::Args)]
pub struct RunArgs {
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output file; overrides the config's `output`, defaults to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for grid scans and batch integrations.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u16).range(1..))]
    pub jobs: u16,
}

impl Command {
    fn args(&self) -> &RunArgs {
        match self {
            Command::Invariants(a) | Command::Verify(a) | Command::Integrate(a) | Command::Compare(a) => a,
        }
    }
}

fn execute(command: &Command) -> Result<(Outcome, Option<PathBuf>), CliError> {
    let args = command.args();
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| CliError::Config(format!("cannot read {}: {e}", args.config.display())))?;
    let cfg = RunConfig::parse(&text)?;
    let echo: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Config(format!("config: {e}")))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.jobs as usize)
        .build()
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    let outcome = pool.install(|| match command {
        Command::Invariants(_) => cmd_invariants(&cfg),
        Command::Verify(_) => cmd_verify(&cfg),
        Command::Integrate(_) => cmd_integrate(&cfg, &echo.to_string()),
        Command::Compare(_) => cmd_compare(&cfg),
    })?;
    Ok((outcome, args.out.clone().or(cfg.output)))
}

/// Runs one command and returns the process exit code.
pub fn run(cli: &Cli) -> i32 {
    match execute(&cli.command) {
        Ok((outcome, out)) => {
            let written = match &out {
                Some(path) => {
                    std::fs::write(path, &outcome.document).map_err(|e| format!("cannot write {}: {e}", path.display()))
                }
                None => {
                    use std::io::Write;
                    std::io::stdout()
                        .write_all(outcome.document.as_bytes())
                        .map_err(|e| e.to_string())
                }
            };
            if let Err(msg) = written {
                eprintln!("error: {msg}");
                return 1;
            }
            match outcome.failure {
                Some(msg) => {
                    eprintln!("failed: {msg}");
                    1
                }
                None => 0,
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
