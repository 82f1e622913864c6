//! Command-line front end: identity reports, sharpness sweeps, divergence
//! fits and lemma checks as JSON, CSV or plot data.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod emit;
pub mod run;

use std::ffi::OsString;
use std::io::Write;

pub use config::{Cli, Command, FloatList, Format, RunConfig, REL_TOL_ENV};
pub use emit::{emit_report, render, suffixed_path, write_rendered, Rendered};
pub use run::{run, Artifact, Outcome};

/// Exit status: every report passed.
pub const EXIT_PASS: u8 = 0;
/// Exit status: a numerical check failed.
pub const EXIT_FAIL: u8 = 1;
/// Exit status: invalid flags or parameters.
pub const EXIT_USAGE: u8 = 2;

#[derive(Debug)]
pub enum UsageError {
    Clap(clap::Error),
    Invalid(String),
}

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            UsageError::Clap(e) => write!(f, "{e}"),
            UsageError::Invalid(m) => write!(f, "error: {m}"),
        }
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug)]
pub enum CliError {
    Usage(UsageError),
    /// Evaluation failed before a report could be formed.
    Numerical(String),
}

impl From<UsageError> for CliError {
    fn from(e: UsageError) -> Self {
        CliError::Usage(e)
    }
}

/// Parses, runs and emits; returns the process exit status.
pub fn main_with<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cfg = match RunConfig::from_args(args) {
        Ok(c) => c,
        Err(UsageError::Clap(e)) => {
            // --help and --version are not errors
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_PASS;
        }
        Err(e) => {
            let _ = writeln!(stderr, "{e}");
            return EXIT_USAGE;
        }
    };
    if cfg.format == Format::Plot && cfg.output.is_none() {
        let _ = writeln!(stderr, "error: plot output needs --output");
        return EXIT_USAGE;
    }
    let outcome = match run(&cfg) {
        Ok(o) => o,
        Err(CliError::Usage(e)) => {
            let _ = writeln!(stderr, "{e}");
            return EXIT_USAGE;
        }
        Err(CliError::Numerical(m)) => {
            let _ = writeln!(stderr, "numerical failure: {m}");
            return EXIT_FAIL;
        }
    };
    for line in &outcome.summary {
        let _ = writeln!(stderr, "{line}");
    }
    let rendered = match render(&outcome.artifact, cfg.format) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            return EXIT_USAGE;
        }
    };
    if let Err(e) = write_rendered(rendered, cfg.output.as_deref(), stdout) {
        let _ = writeln!(stderr, "error: {e:#}");
        return EXIT_FAIL;
    }
    if outcome.passed {
        EXIT_PASS
    } else {
        EXIT_FAIL
    }
}
