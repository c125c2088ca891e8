use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ProblemError {
    #[error("bound, objective and integrality arrays differ in length from the column count")]
    LengthMismatch,
    #[error("problem has no rows")]
    NoRows,
    #[error("column {column}: invalid bounds [{lower}, {upper}]")]
    InvalidBounds { column: String, lower: f64, upper: f64 },
    #[error("non-finite or zero coefficient in {0}")]
    NonFinite(String),
    #[error("row {0} has no nonzero coefficient")]
    EmptyRow(String),
    #[error("row {row} references column {column} which does not exist")]
    ColumnOutOfRange { row: String, column: usize },
    #[error("row {0} has unsorted or duplicate column entries")]
    UnsortedRow(String),
}

#[derive(Debug, Error)]
pub enum SolverError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("integer column {0} has bounds outside [0, 1]; only binaries are supported")]
    NonBinaryInteger(String),
    #[error("basis matrix became numerically singular")]
    SingularBasis,
}

#[derive(Debug, Error)]
pub enum MpsError {
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("missing ENDATA")]
    MissingEndata,
}

impl MpsError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        MpsError::Parse { line, message: message.into() }
    }
}
