//! Command-line front end for `qeigen`.
//!
//! Exit codes: 0 success, 1 verification failure (report still written),
//! 2 invalid input, 3 numerical or I/O failure.

pub mod commands;
pub mod config;
pub mod format;

use std::ffi::OsString;
use std::io::Write;

use clap::error::ErrorKind;
use clap::Parser;
use qeigen::QeError;
use thiserror::Error;

pub use commands::Outcome;
pub use config::{CliConfig, ConfigFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Error, Debug)]
pub enum CliError {
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Numerical(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
}

impl From<QeError> for CliError {
    fn from(e: QeError) -> Self {
        match e {
            QeError::InvalidParams(_) | QeError::Unsupported(_) => CliError::Invalid(e.to_string()),
            QeError::Numerical(_) => CliError::Numerical(e.to_string()),
        }
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Invalid(_) => EXIT_INVALID,
            _ => EXIT_FAILURE,
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match config::Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(err, "{e}");
                    EXIT_INVALID
                }
            };
        }
    };
    match execute(cli, out, err) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn execute(cli: config::Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, CliError> {
    let cfg = cli.resolve()?;
    let outcome = thread_pool()?.install(|| commands::run(&cfg))?;
    for line in &outcome.log {
        writeln!(err, "{line}")?;
    }
    match &cfg.output_path {
        Some(path) => std::fs::write(path, &outcome.body)?,
        None => {
            out.write_all(outcome.body.as_bytes())?;
            out.flush()?;
        }
    }
    Ok(if outcome.passed { EXIT_OK } else { EXIT_VERIFY_FAILED })
}

/// A pool capped by `QE_THREADS` when set.
fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut b = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var("QE_THREADS") {
        let n = v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n >= 1)
            .ok_or_else(|| CliError::Invalid(format!("QE_THREADS must be a positive integer, got {v:?}")))?;
        b = b.num_threads(n);
    }
    b.build().map_err(|e| CliError::Numerical(format!("thread pool: {e}")))
}
