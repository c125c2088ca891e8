use thiserror::Error;

use crate::validate::Diagnostic;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("empty {0} label")]
    EmptyLabel(&'static str),
    #[error("label {0:?} contains whitespace")]
    InvalidLabel(String),
    #[error("duplicate region {0}")]
    DuplicateRegion(String),
    #[error("duplicate commodity {0}")]
    DuplicateCommodity(String),
    #[error("model needs at least one {0}")]
    EmptySet(&'static str),
    #[error("invalid time structure: {0}")]
    InvalidTime(String),
    #[error("duplicate component name {0}")]
    DuplicateComponent(String),
    #[error("duplicate annual limit name {0}")]
    DuplicateLimit(String),
    #[error("component {component}: unknown commodity {commodity}")]
    UnknownCommodity { component: String, commodity: String },
    #[error("component {component}: unknown region {region}")]
    UnknownRegion { component: String, region: String },
    #[error("component {component}: series length {got} ≠ {expected}")]
    SeriesLength { component: String, got: usize, expected: usize },
    #[error("component {component}: no series given for region {region}")]
    MissingSeries { component: String, region: String },
    #[error("{0}")]
    InvalidParameter(String),
}

#[derive(Debug, Error)]
pub enum FormulationError {
    #[error("model has validation errors:\n{}", format_diagnostics(.0))]
    Invalid(Vec<Diagnostic>),
    #[error("no components")]
    NoComponents,
    #[error("no balance rows: no component produces or consumes a commodity")]
    NoBalanceRows,
    #[error("{row} cannot be satisfied: it has no adjustable terms and a fixed residual of {residual}")]
    TriviallyInfeasible { row: String, residual: f64 },
    #[error("aggregation does not match the model: {0}")]
    AggregationMismatch(String),
    #[error(transparent)]
    Problem(#[from] minfine_solver::ProblemError),
}

fn format_diagnostics(d: &[Diagnostic]) -> String {
    d.iter().map(|d| format!("  {d}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Error)]
pub enum ResultError {
    #[error("solution status is {0}, not optimal")]
    NotOptimal(minfine_solver::Status),
    #[error("primal vector has length {got}, expected {expected}")]
    Length { got: usize, expected: usize },
    #[error("column {column} = {value} violates its bounds [{lower}, {upper}]")]
    BoundViolation { column: String, value: f64, lower: f64, upper: f64 },
    #[error("row {row} violated by {amount}")]
    RowViolation { row: String, amount: f64 },
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AggregationError {
    #[error("{steps} not divisible by {period}")]
    Indivisible { steps: usize, period: usize },
    #[error("period length must be positive")]
    ZeroPeriod,
    #[error("model has no time series to aggregate")]
    NoSeries,
    #[error("cluster count {k} outside 1..={periods}")]
    ClusterRange { k: usize, periods: usize },
}
