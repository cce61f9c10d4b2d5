//! Command-line front end: flag and config parsing, the subcommands, and
//! report rendering.
//!
//! Exit codes: 0 when every row passes, 2 when input is rejected, 3 when
//! some row misses its tolerance.

pub mod args;
pub mod commands;
pub mod report;
pub mod suite;

use std::io::IsTerminal;
use std::time::Instant;

use args::{Cli, Command, ConfigFile};
use report::{RunReport, EXIT_REJECTED};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] localize::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_REJECTED
    }
}

/// Runs the parsed command line and returns its report.
pub fn execute(cli: &Cli) -> Result<RunReport, CliError> {
    let file = match &cli.output.config {
        Some(path) => ConfigFile::load(path)?,
        None => ConfigFile::default(),
    };
    let start = Instant::now();
    let mut report = match &cli.command {
        Command::Partition(a) => commands::cmd_partition(a, &file)?,
        Command::Geometry(a) => commands::cmd_geometry(a, &file)?,
        Command::Quantum(a) => commands::cmd_quantum(a, &file)?,
        Command::Embed(a) => commands::cmd_embed(a, &file)?,
        Command::Suite(a) => suite::run(a.seed.or(file.seed).unwrap_or(suite::DEFAULT_SEED))?,
    };
    if cli.output.timing {
        report.wall_time_ms = Some(start.elapsed().as_millis() as u64);
    }
    Ok(report)
}

/// Table on a terminal, JSON when piped or with `--json`, CSV with `--csv`.
pub fn render(cli: &Cli, report: &RunReport) -> String {
    if cli.output.csv {
        report.to_csv()
    } else if cli.output.json || !std::io::stdout().is_terminal() {
        report.to_json()
    } else {
        report.to_table()
    }
}

/// Caps the global rayon pool from `LOCALIZE_THREADS` when set.
pub fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("LOCALIZE_THREADS") else {
        return Ok(());
    };
    let threads: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&t| t > 0)
        .ok_or_else(|| CliError::Input(format!("LOCALIZE_THREADS must be a positive integer, got {raw:?}")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Input(format!("cannot size thread pool: {e}")))
}
