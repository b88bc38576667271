use std::io;
use std::path::PathBuf;

use affdyn_core::ParseError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read `{}`: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("cannot write `{}`: {source}", path.display())]
    Write { path: PathBuf, source: io::Error },
    #[error("{origin}: {source}")]
    Manifest { origin: String, source: ParseError },
    #[error("{origin}: nothing to run, no engine selected")]
    NothingToRun { origin: String },
    #[error("{origin}: {source}")]
    Scenario { origin: String, source: affdyn_core::Error },
    #[error(transparent)]
    Core(#[from] affdyn_core::Error),
    #[error("the result holds no trajectory")]
    EmptyResult,
    #[error("csv line {line}: {message}")]
    Csv { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, CliError>;
