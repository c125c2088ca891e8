//! Results bundle: `summary.json`, `schedules.csv`, `prices.csv`, `aggregation.json`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use minfine_core::formulation::{BuildDecision, CapacityValue, CostBreakdown, LimitDual};
use minfine_core::{ResultSet, TypicalPeriodSet};
use minfine_solver::SolveStats;

use crate::error::CliError;
use crate::fsutil::write_atomic;

pub const SUMMARY: &str = "summary.json";
pub const SCHEDULES: &str = "schedules.csv";
pub const PRICES: &str = "prices.csv";
pub const AGGREGATION: &str = "aggregation.json";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SolverStats {
    pub iterations: usize,
    pub nodes: usize,
    pub refactorizations: usize,
    /// Seconds; the only field allowed to differ between identical runs.
    pub wall_time: f64,
}

impl From<&SolveStats> for SolverStats {
    fn from(s: &SolveStats) -> Self {
        SolverStats {
            iterations: s.iterations,
            nodes: s.nodes,
            refactorizations: s.refactorizations,
            wall_time: s.wall_time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct AggregationFile {
    pub k: usize,
    pub period_length: usize,
    pub num_periods: usize,
    pub seed: u64,
    pub weights: Vec<u64>,
    pub ordering_map: Vec<usize>,
    pub medoid_indices: Vec<usize>,
    pub within_cluster_distance: f64,
}

impl From<&TypicalPeriodSet> for AggregationFile {
    fn from(t: &TypicalPeriodSet) -> Self {
        AggregationFile {
            k: t.k,
            period_length: t.period_length,
            num_periods: t.num_periods,
            seed: t.seed,
            weights: t.weights.clone(),
            ordering_map: t.ordering_map.clone(),
            medoid_indices: t.medoid_indices.clone(),
            within_cluster_distance: t.within_cluster_distance,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Summary {
    pub tool: String,
    pub version: String,
    pub model: String,
    pub input_hash: String,
    pub status: String,
    #[serde(rename = "objectiveTAC")]
    pub objective_tac: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub message: Option<String>,
    pub num_vars: usize,
    pub num_rows: usize,
    pub mixed_integer: bool,
    pub aggregated: bool,
    pub capacities: Vec<CapacityValue>,
    pub build_decisions: Vec<BuildDecision>,
    pub cost_breakdown: Vec<CostBreakdown>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub limit_duals: Option<Vec<LimitDual>>,
    pub solver: SolverStats,
}

fn csv_bytes(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    w.into_inner().expect("in-memory flush")
}

fn put(dir: &Path, name: &str, bytes: &[u8]) -> Result<(), CliError> {
    let path = dir.join(name);
    write_atomic(&path, bytes).map_err(|e| CliError::io(path, e))
}

fn drop_stale(dir: &Path, name: &str) -> Result<(), CliError> {
    let path = dir.join(name);
    match fs::remove_file(&path) {
        Err(e) if e.kind() != std::io::ErrorKind::NotFound => Err(CliError::io(path, e)),
        _ => Ok(()),
    }
}

pub fn schedules_csv(results: &ResultSet) -> Vec<u8> {
    let ops = results
        .schedules
        .iter()
        .map(|e| vec![e.component.clone(), e.location.clone(), e.kind.clone(), e.t.to_string(), e.value.to_string()]);
    let socs = results
        .storage_states
        .iter()
        .map(|s| vec![s.component.clone(), s.region.clone(), "soc".into(), s.t.to_string(), s.value.to_string()]);
    csv_bytes(&["component", "location", "kind", "t", "value"], ops.chain(socs))
}

/// Writes every bundle file; files that do not apply to this run are removed.
pub fn write_bundle(
    dir: &Path,
    summary: &Summary,
    results: Option<&ResultSet>,
    aggregation: Option<&TypicalPeriodSet>,
) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut json = serde_json::to_string_pretty(summary).expect("summary serializes");
    json.push('\n');
    put(dir, SUMMARY, json.as_bytes())?;
    match results {
        Some(r) => put(dir, SCHEDULES, &schedules_csv(r))?,
        None => drop_stale(dir, SCHEDULES)?,
    }
    match results.and_then(|r| r.shadow_prices.as_ref()) {
        Some(prices) => {
            let rows = prices
                .iter()
                .map(|p| vec![p.region.clone(), p.commodity.clone(), p.t.to_string(), p.value.to_string()]);
            put(dir, PRICES, &csv_bytes(&["region", "commodity", "t", "price"], rows))?;
        }
        None => drop_stale(dir, PRICES)?,
    }
    match aggregation {
        Some(t) => put(dir, AGGREGATION, aggregation_json(t).as_bytes())?,
        None => drop_stale(dir, AGGREGATION)?,
    }
    Ok(())
}

pub fn aggregation_json(t: &TypicalPeriodSet) -> String {
    let mut s = serde_json::to_string_pretty(&AggregationFile::from(t)).expect("aggregation serializes");
    s.push('\n');
    s
}

pub fn read_summary(dir: &Path) -> Result<Summary, CliError> {
    let path = dir.join(SUMMARY);
    let bytes = fs::read(&path).map_err(|e| CliError::io(&path, e))?;
    serde_json::from_slice(&bytes).map_err(|e| CliError::Bundle { path, message: e.to_string() })
}
