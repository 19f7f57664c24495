//! `tripleline` command-line front end.
//!
//! Exit codes: 0 success, 1 failed criterion, 2 invalid or infeasible
//! configuration, 3 numerical-domain error, 4 I/O failure.

mod config;
mod run;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use config::RunConfig;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("numerical domain: {0}")]
    Domain(String),
    #[error("cannot write {0}: {1}")]
    Io(PathBuf, std::io::Error),
}

impl RunError {
    fn exit_code(&self) -> u8 {
        match self {
            RunError::Config(_) => 2,
            RunError::Domain(_) => 3,
            RunError::Io(..) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "tripleline",
    version,
    about = "Field grids and verification runs for the triple-line half-space solution"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Common {
    /// TOML run configuration; built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.directory`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate displacement, strain and stress on the configured grid.
    Field {
        #[command(flatten)]
        common: Common,
        /// Write a single quantity (`u`, `strain_xx`, ..., `stress_zz`).
        #[arg(long)]
        only: Option<String>,
    },
    /// Run the verification criteria and write the summary table.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Restrict to one group: potentials, fields, equilibrium, energy,
        /// green, sobolev, surface, line.
        #[arg(long)]
        only: Option<String>,
        /// Multiplies every numeric tolerance.
        #[arg(long, default_value_t = 1.0)]
        tolerance_scale: f64,
    },
}

fn load(common: &Common) -> Result<(RunConfig, PathBuf), RunError> {
    let cfg = match &common.config {
        Some(path) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| RunError::Config(format!("cannot read {}: {e}", path.display())))?;
            RunConfig::from_toml(&text)?
        }
        None => RunConfig::default(),
    };
    let out = common
        .out
        .clone()
        .or_else(|| cfg.output.directory.clone())
        .unwrap_or_else(|| PathBuf::from("out"));
    Ok((cfg, out))
}

fn execute(cli: Cli) -> Result<bool, RunError> {
    match cli.command {
        Command::Field { common, only } => {
            let (cfg, out) = load(&common)?;
            for f in run::cmd_field(&cfg, &out, only.as_deref())? {
                println!("wrote {}", f.display());
            }
            Ok(true)
        }
        Command::Verify {
            common,
            only,
            tolerance_scale,
        } => {
            let (cfg, out) = load(&common)?;
            let report = run::cmd_verify(&cfg, &out, only.as_deref(), tolerance_scale)?;
            for o in &report.outcomes {
                println!("{o}");
            }
            let failed = report.failed();
            for o in &failed {
                eprintln!("failed criterion {}: {}", o.id, o.name);
            }
            for f in &report.files {
                println!("wrote {}", f.display());
            }
            Ok(failed.is_empty())
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
