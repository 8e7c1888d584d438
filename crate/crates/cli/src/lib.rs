//! Front end for `mathieu-core`: argument parsing into a validated [`JobSpec`],
//! deterministic execution into CSV and JSON artifacts, and exit-code mapping.
//!
//! Exit codes: 0 success, 1 numerical failure, 2 usage error.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

mod args;
mod jobs;
mod output;

pub use args::{Cli, Command, OutputFormat};
pub use output::{Artifact, Sidecar};

use mathieu_core::oracle::validate_tol;
use mathieu_core::MathieuError;

/// Environment variable overriding the default oracle tolerance.
pub const TOL_ENV: &str = "MATHIEU_KIT_TOL";
pub const DEFAULT_TOL: f64 = 1e-10;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NUMERICAL: u8 = 1;
pub const EXIT_USAGE: u8 = 2;

/// A parsed and validated job.
#[derive(Debug, Clone)]
pub struct JobSpec {
    pub command: Command,
    pub output: OutputFormat,
    pub out_path: Option<PathBuf>,
    pub sidecar_path: Option<PathBuf>,
    /// Oracle tolerance after flag and environment resolution.
    pub tol: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseFailure {
    /// Help or version text; not an error.
    Info(String),
    Usage(String),
}

/// Parses `argv` (including the program name) with the tolerance override taken
/// from `env_tol` when no `--tol` flag is given.
pub fn parse_with_env<I, T>(argv: I, env_tol: Option<&str>) -> Result<JobSpec, ParseFailure>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = Cli::try_parse_from(argv).map_err(|e| match e.kind() {
        ErrorKind::DisplayHelp | ErrorKind::DisplayVersion | ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            ParseFailure::Info(e.to_string())
        }
        _ => ParseFailure::Usage(e.to_string()),
    })?;
    let io = cli.command.io().clone();
    let tol = match (io.tol, env_tol) {
        (Some(t), _) => t,
        (None, Some(raw)) => raw
            .trim()
            .parse::<f64>()
            .map_err(|_| ParseFailure::Usage(format!("{TOL_ENV}='{raw}' is not a number")))?,
        (None, None) => DEFAULT_TOL,
    };
    validate_tol(tol).map_err(|e| ParseFailure::Usage(e.to_string()))?;
    jobs::validate(&cli.command).map_err(|e| ParseFailure::Usage(e.to_string()))?;
    let sidecar_path = match (&io.sidecar, &io.out, io.output) {
        (Some(p), _, _) => Some(p.clone()),
        (None, Some(out), OutputFormat::Csv) => Some(out.with_extension("json")),
        _ => None,
    };
    Ok(JobSpec {
        command: cli.command,
        output: io.output,
        out_path: io.out,
        sidecar_path,
        tol,
    })
}

/// Parses `argv` using the process environment for the tolerance override.
pub fn parse<I, T>(argv: I) -> Result<JobSpec, ParseFailure>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let env = std::env::var(TOL_ENV).ok();
    parse_with_env(argv, env.as_deref())
}

/// Runs the job. Never panics on numerical trouble; failures are reported in
/// the returned artifact's exit code and diagnostic.
pub fn execute(job: &JobSpec) -> Artifact {
    jobs::run(job)
}

/// Exit code for an error raised by the core library.
pub fn exit_code_for(err: &MathieuError) -> u8 {
    match err {
        MathieuError::InvalidInput(_)
        | MathieuError::Admissibility { .. }
        | MathieuError::Domain(_)
        | MathieuError::Mapping(_) => EXIT_USAGE,
        _ => EXIT_NUMERICAL,
    }
}

/// Writes the artifact's primary output and sidecar where the job asks.
pub fn emit(job: &JobSpec, artifact: &Artifact) -> io::Result<()> {
    let json = artifact.sidecar_json();
    match job.output {
        OutputFormat::Json => write_to(&job.out_path, json.as_bytes())?,
        OutputFormat::Csv => {
            if let Some(csv) = &artifact.csv {
                write_to(&job.out_path, csv)?;
            }
            if let Some(path) = &job.sidecar_path {
                fs::write(path, json.as_bytes())?;
            }
        }
    }
    Ok(())
}

fn write_to(path: &Option<PathBuf>, bytes: &[u8]) -> io::Result<()> {
    match path {
        Some(p) => fs::write(p, bytes),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(bytes)?;
            out.flush()
        }
    }
}
