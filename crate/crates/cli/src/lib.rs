//! Configuration-driven runs of the frac-orlicz library.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error,
//! 3 solver nonconvergence (diagnostics are still written), 4 numerical
//! assembly failure.

pub mod config;
pub mod run;

use std::path::Path;

use frac_orlicz::Error;

pub use config::{Mode, RunConfig};
pub use run::{execute, Options, Outcome};

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{location}: {message}")]
    Config { location: String, message: String },
    #[error("{0}")]
    Io(String),
    #[error("nonconvergence: {0}")]
    NonConvergence(String),
    #[error("assembly failure: {0}")]
    Assembly(String),
}

impl From<Error> for RunError {
    fn from(e: Error) -> Self {
        match e {
            Error::Config(_) | Error::Domain(_) | Error::Shape { .. } => {
                RunError::Config { location: "config".into(), message: e.to_string() }
            }
            Error::NonConvergence(_) | Error::RootFinding(_) => RunError::NonConvergence(e.to_string()),
            Error::Assembly(_) | Error::Diagonal(_) | Error::Degenerate(_) | Error::UnboundedConjugate { .. } => {
                RunError::Assembly(e.to_string())
            }
        }
    }
}

impl RunError {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Io(_) => 1,
            RunError::Config { .. } => 2,
            RunError::NonConvergence(_) => 3,
            RunError::Assembly(_) => 4,
        }
    }
}

/// Reads, validates and executes the configuration at `path`.
pub fn run_file(path: &Path, opts: &Options) -> Result<Outcome, RunError> {
    let text = std::fs::read_to_string(path).map_err(|e| RunError::Config {
        location: path.display().to_string(),
        message: format!("cannot read config: {e}"),
    })?;
    let cfg = RunConfig::parse(&text, &path.display().to_string())?;
    execute(cfg, opts)
}
