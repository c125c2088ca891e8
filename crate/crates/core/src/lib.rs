//! Energy system model, its compilation into a sparse LP/MILP and typical-period aggregation.

pub mod economics;
pub mod error;
pub mod formulation;
pub mod model;
pub mod tsa;
pub mod validate;

pub use economics::{annual_scale, crf, HOURS_PER_YEAR};
pub use error::{AggregationError, FormulationError, ModelError, ResultError};
pub use formulation::{
    balance_residuals, build_aggregated_problem, build_linked_problem, build_problem, evaluate_solution,
    extract_results, Formulation, ResultSet, StorageLinkage, VarKind, VariableRef,
};
pub use model::{
    new_model, uniform_series, AnnualLimit, CapacityPolicy, Commodity, Component, ComponentHandle,
    ComponentKind, ConversionSpec, Economics, Edge, EnergySystemModel, LimitMember, RegionSeries,
    RegionValue, SeriesAttribute, SourceSinkSpec, StorageSpec, TimeStructure, TransmissionSpec,
};
pub use tsa::{aggregate, kmedoids, segment, TypicalPeriodSet};
pub use validate::{validate_model, Diagnostic, Severity};
