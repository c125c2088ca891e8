//! Declarative model documents, results bundles and the `minfine` command line.

pub mod bundle;
pub mod commands;
pub mod document;
pub mod error;
mod fsutil;
pub mod report;

pub use commands::{main_with_args, run, AggregationArgs, SolverArgs};
pub use document::{load_model, parse_document, to_json, write_model, LoadedModel, ModelDocument};
pub use error::{CliError, LoadError};
pub use fsutil::write_atomic;
