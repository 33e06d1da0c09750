//! Command-line front end for `fringecycle`: configuration, presets, and CSV
//! or text reports.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

pub mod commands;
pub mod config;
pub mod report;

pub use commands::{execute, Outcome, EXIT_NO_VIOLATION, EXIT_USAGE, EXIT_VIOLATION};
pub use config::{Args, Command, Format, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Core(#[from] fringecycle::Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("writing output: {0}")]
    Stdout(io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

fn create(path: &PathBuf) -> Result<BufWriter<File>, CliError> {
    File::create(path).map(BufWriter::new).map_err(|source| CliError::Io { path: path.clone(), source })
}

/// Writes the report to the configured file, or to `stdout` if none, and the
/// scan data (if any) to its file.
pub fn emit<W: Write>(cfg: &RunConfig, outcome: &Outcome, stdout: W) -> Result<(), CliError> {
    match &cfg.output {
        Some(path) => {
            let mut f = create(path)?;
            outcome.report.write(&mut f, cfg.format)?;
            f.flush().map_err(|source| CliError::Io { path: path.clone(), source })?;
        }
        None => outcome.report.write(stdout, cfg.format)?,
    }
    if let (Some(path), Some(scans)) = (&cfg.scans, &outcome.scans) {
        let mut f = create(path)?;
        scans.write(&mut f, Format::Csv)?;
        f.flush().map_err(|source| CliError::Io { path: path.clone(), source })?;
    }
    Ok(())
}

/// Parses, runs and emits; returns the process exit status.
pub fn run(args: Args) -> u8 {
    let result = RunConfig::from_args(args).and_then(|cfg| {
        let outcome = execute(&cfg)?;
        emit(&cfg, &outcome, io::stdout().lock())?;
        Ok(outcome.exit_code)
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fringecycle: {e}");
            EXIT_USAGE
        }
    }
}
