use std::io;
use std::path::PathBuf;

use thiserror::Error;

use minfine_core::{AggregationError, Diagnostic, FormulationError, ModelError, ResultError};
use minfine_solver::{MpsError, SolverError};

#[derive(Debug, Error)]
pub enum LoadError {
    #[error("cannot read {}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("{}:{line}:{column}: invalid JSON: {message}", path.display())]
    Syntax { path: PathBuf, line: usize, column: usize, message: String },
    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },
    #[error("{}: line {line}, column {column}: {message}", file.display())]
    Csv { file: PathBuf, line: u64, column: usize, message: String },
    #[error("{}: no column named {column:?}", file.display())]
    MissingColumn { file: PathBuf, column: String },
    #[error("at {pointer}: {source}")]
    Model { pointer: String, source: ModelError },
    #[error("model is invalid:\n{}", .0.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n"))]
    Invalid(Vec<Diagnostic>),
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Load(#[from] LoadError),
    #[error(transparent)]
    Aggregation(#[from] AggregationError),
    #[error(transparent)]
    Formulation(#[from] FormulationError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Result(#[from] ResultError),
    #[error(transparent)]
    Mps(#[from] MpsError),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("{}: {message}", path.display())]
    Bundle { path: PathBuf, message: String },
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}
