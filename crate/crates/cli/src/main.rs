//! `bsseries` command-line driver.
//!
//! Exit codes: 0 success, 1 malformed config or I/O failure, 2 inadmissible
//! initial profile, 3 resonant forcing, 4 verification failure, 5 unstable
//! grid solve.

mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use thiserror::Error;

use config::{Overrides, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("malformed config: {0}")]
    Config(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error("inadmissible initial profile; order-0 residual: {0}")]
    Inadmissible(String),
    #[error("resonant forcing at order {0}")]
    Resonance(usize),
    #[error("verification failed")]
    VerifyFailed,
    #[error("grid solve became unstable: {0}")]
    Instability(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Inadmissible(_) => 2,
            CliError::Resonance(_) => 3,
            CliError::VerifyFailed => 4,
            CliError::Instability(_) => 5,
        }
    }
}

/// Writes through a sibling temp file and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |e: std::io::Error| CliError::Io(format!("{}: {e}", path.display()));
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent).map_err(io)?;
    }
    let file_name = path
        .file_name()
        .ok_or_else(|| CliError::Io(format!("{}: not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(file_name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    {
        let mut f = std::fs::File::create(&tmp).map_err(io)?;
        f.write_all(bytes).map_err(io)?;
        f.sync_all().map_err(io)?;
    }
    std::fs::rename(&tmp, path).map_err(io)
}

#[derive(Debug, Parser)]
#[command(
    version,
    about = "Exact series solutions, identity checks and a grid oracle for the transformed Black-Scholes equation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute f_0..f_N and write the exact series JSON
    Expand {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check the recurrence, the integral identity and the residual order
    Verify {
        #[command(flatten)]
        overrides: Overrides,
        /// Verify this series file instead of expanding the config
        #[arg(long)]
        series_in: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the finite-difference oracle, convergence study and truncation sweep
    Oracle {
        #[command(flatten)]
        overrides: Overrides,
        #[arg(long)]
        series_in: Option<PathBuf>,
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Expand { overrides, out } => {
            let cfg = RunConfig::load_with(&overrides)?;
            let path = commands::cmd_expand(&cfg, out)?;
            println!("wrote {}", path.display());
        }
        Command::Verify {
            overrides,
            series_in,
            out,
        } => {
            let cfg = RunConfig::load_with(&overrides)?;
            let (path, report) = commands::cmd_verify(&cfg, series_in.as_deref(), out)?;
            println!(
                "recurrence: {}  adm identity: {}  residual order: {}",
                verdict(report.recurrence.pass),
                verdict(report.adm.pass),
                verdict(report.residual.pass)
            );
            if !report.adm.pass {
                println!(
                    "adm identity fails at orders {:?}",
                    report.adm.failing_orders()
                );
            }
            println!("wrote {}", path.display());
            if !report.pass {
                return Err(CliError::VerifyFailed);
            }
        }
        Command::Oracle {
            overrides,
            series_in,
            out_dir,
        } => {
            let cfg = RunConfig::load_with(&overrides)?;
            let (dir, summary) = commands::cmd_oracle(&cfg, series_in.as_deref(), out_dir)?;
            println!(
                "observed order {:.3}; domain sensitivity {:.3e}",
                summary.observed_order, summary.domain_sensitivity_max_abs
            );
            println!("wrote {}", dir.display());
        }
    }
    Ok(())
}

fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "FAIL"
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = std::env::var("THREADS")
        .ok()
        .and_then(|t| t.parse::<usize>().ok())
    {
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads.max(1))
            .build_global();
    }
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
