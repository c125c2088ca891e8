//! Command-line definitions and the `validate`, `run`, `aggregate`, `export-mps` and
//! `report` pipelines.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use minfine_core::tsa::aggregate;
use minfine_core::{
    build_problem, extract_results, EnergySystemModel, Formulation, FormulationError, TypicalPeriodSet,
};
use minfine_solver::{write_mps, MilpOptions, Status};

use crate::bundle::{aggregation_json, write_bundle, SolverStats, Summary};
use crate::document::load_model;
use crate::error::CliError;
use crate::fsutil::write_atomic;
use crate::report::render_report;

pub const THREADS_VAR: &str = "MINFINE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "minfine", version, about = "Build, solve and report energy system models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a model document and list its diagnostics
    Validate { model: PathBuf },
    /// Solve a model and write a results bundle
    Run {
        model: PathBuf,
        /// Bundle directory [default: ./<model stem>-results]
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        aggregation: AggregationArgs,
        #[command(flatten)]
        solver: SolverArgs,
    },
    /// Cluster the time series into typical periods without solving
    Aggregate {
        model: PathBuf,
        /// Write aggregation.json here instead of printing it
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        period_length: usize,
        #[arg(long)]
        clusters: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Write the optimization problem in free MPS format
    ExportMps {
        model: PathBuf,
        /// Target file [default: ./<model stem>.mps]
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[command(flatten)]
        aggregation: AggregationArgs,
    },
    /// Print capacity, cost and price tables of a results bundle
    Report { bundle: PathBuf },
}

#[derive(Debug, Clone, Args)]
pub struct AggregationArgs {
    /// Steps per typical period; requires --clusters
    #[arg(long)]
    pub period_length: Option<usize>,
    /// Number of typical periods; requires --period-length
    #[arg(long)]
    pub clusters: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    /// Simplex iteration limit per LP
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Branch-and-bound node limit
    #[arg(long)]
    pub max_nodes: Option<usize>,
    /// Primal and dual feasibility tolerance
    #[arg(long)]
    pub solver_tol: Option<f64>,
}

impl SolverArgs {
    fn options(&self) -> Result<MilpOptions, CliError> {
        let mut o = MilpOptions::default();
        if let Some(n) = self.max_iter {
            o.lp.max_iter = n;
        }
        if let Some(n) = self.max_nodes {
            o.max_nodes = n;
        }
        if let Some(tol) = self.solver_tol {
            if !(tol.is_finite() && tol > 0.0) {
                return Err(CliError::Usage(format!("--solver-tol must be positive, got {tol}")));
            }
            o.lp.tol_primal = tol;
            o.lp.tol_dual = tol;
        }
        Ok(o)
    }
}

pub fn exit_code(status: Status) -> i32 {
    match status {
        Status::Optimal => 0,
        Status::Infeasible => 2,
        Status::Unbounded => 3,
        Status::IterationLimit | Status::NodeLimit => 4,
    }
}

fn stem(path: &Path) -> String {
    path.file_stem().map_or_else(|| "model".to_string(), |s| s.to_string_lossy().into_owned())
}

fn maybe_aggregate(model: &EnergySystemModel, a: &AggregationArgs) -> Result<Option<TypicalPeriodSet>, CliError> {
    match (a.period_length, a.clusters) {
        (None, None) => Ok(None),
        (Some(p), Some(k)) => Ok(Some(aggregate(model, p, k, a.seed)?)),
        _ => Err(CliError::Usage("--period-length and --clusters must be given together".into())),
    }
}

fn check_threads() -> Result<(), CliError> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(()),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(()),
            _ => Err(CliError::Usage(format!("{THREADS_VAR} must be a positive integer, got {v:?}"))),
        },
    }
}

/// Outcome of a `run`: the exit code and the bundle directory.
pub struct RunOutcome {
    pub code: i32,
    pub status: String,
    pub bundle: PathBuf,
}

fn empty_summary(model: &EnergySystemModel, input_hash: &str, status: &str) -> Summary {
    Summary {
        tool: "minfine".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        model: model.name().to_string(),
        input_hash: input_hash.to_string(),
        status: status.to_string(),
        objective_tac: None,
        message: None,
        num_vars: 0,
        num_rows: 0,
        mixed_integer: false,
        aggregated: false,
        capacities: Vec::new(),
        build_decisions: Vec::new(),
        cost_breakdown: Vec::new(),
        limit_duals: None,
        solver: SolverStats { iterations: 0, nodes: 0, refactorizations: 0, wall_time: 0.0 },
    }
}

pub fn run(
    model_path: &Path,
    output: Option<&Path>,
    aggregation: &AggregationArgs,
    solver: &SolverArgs,
) -> Result<RunOutcome, CliError> {
    let options = solver.options()?;
    let loaded = load_model(model_path)?;
    let model = &loaded.model;
    let tps = maybe_aggregate(model, aggregation)?;
    let dir = output.map_or_else(|| PathBuf::from(format!("{}-results", stem(model_path))), Path::to_path_buf);
    let mut summary = empty_summary(model, &loaded.input_hash, "infeasible");
    summary.aggregated = tps.is_some();

    let f: Formulation = match build_problem(model, tps.as_ref()) {
        Ok(f) => f,
        Err(e @ FormulationError::TriviallyInfeasible { .. }) => {
            summary.message = Some(e.to_string());
            write_bundle(&dir, &summary, None, tps.as_ref())?;
            return Ok(RunOutcome { code: 2, status: summary.status, bundle: dir });
        }
        Err(e) => return Err(e.into()),
    };
    summary.num_vars = f.problem.num_vars();
    summary.num_rows = f.problem.num_rows();
    summary.mixed_integer = f.is_mip();
    let solution = f.solve(&options)?;
    summary.status = solution.status.as_str().to_string();
    summary.solver = SolverStats::from(&solution.stats);
    let results = if solution.status == Status::Optimal {
        let r = extract_results(model, &f, &solution)?;
        summary.objective_tac = Some(r.objective_tac);
        summary.capacities = r.capacities.clone();
        summary.build_decisions = r.build_decisions.clone();
        summary.cost_breakdown = r.cost_breakdown.clone();
        summary.limit_duals = r.limit_duals.clone();
        Some(r)
    } else {
        None
    };
    write_bundle(&dir, &summary, results.as_ref(), tps.as_ref())?;
    Ok(RunOutcome { code: exit_code(solution.status), status: summary.status, bundle: dir })
}

fn dispatch(cli: Cli, out: &mut dyn Write) -> Result<i32, CliError> {
    check_threads()?;
    let say = |out: &mut dyn Write, s: String| {
        let _ = writeln!(out, "{s}");
    };
    match cli.command {
        Command::Validate { model } => {
            let m = load_model(&model)?.model;
            say(
                out,
                format!(
                    "{}: valid ({} regions, {} commodities, {} components, {} steps)",
                    m.name(),
                    m.regions().len(),
                    m.commodities().len(),
                    m.components().len(),
                    m.time().num_steps()
                ),
            );
            Ok(0)
        }
        Command::Run { model, output, aggregation, solver } => {
            let o = run(&model, output.as_deref(), &aggregation, &solver)?;
            say(out, format!("status {}; bundle written to {}", o.status, o.bundle.display()));
            Ok(o.code)
        }
        Command::Aggregate { model, output, period_length, clusters, seed } => {
            let m = load_model(&model)?.model;
            let tps = aggregate(&m, period_length, clusters, seed)?;
            let json = aggregation_json(&tps);
            match output {
                Some(path) => {
                    write_atomic(&path, json.as_bytes()).map_err(|e| CliError::io(&path, e))?;
                    say(out, format!("{} periods in {} clusters written to {}", tps.num_periods, tps.k, path.display()));
                }
                None => {
                    let _ = out.write_all(json.as_bytes());
                }
            }
            Ok(0)
        }
        Command::ExportMps { model, output, aggregation } => {
            let m = load_model(&model)?.model;
            let tps = maybe_aggregate(&m, &aggregation)?;
            let f = build_problem(&m, tps.as_ref())?;
            let mut bytes = Vec::new();
            write_mps(&f.problem, &mut bytes)?;
            let path = output.unwrap_or_else(|| PathBuf::from(format!("{}.mps", stem(&model))));
            write_atomic(&path, &bytes).map_err(|e| CliError::io(&path, e))?;
            say(
                out,
                format!("{}: {} variables, {} rows", path.display(), f.problem.num_vars(), f.problem.num_rows()),
            );
            Ok(0)
        }
        Command::Report { bundle } => {
            let text = render_report(&bundle)?;
            let _ = out.write_all(text.as_bytes());
            Ok(0)
        }
    }
}

/// Parses `args` (including the program name) and runs the command; returns the exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { out.write_all(text.as_bytes()) } else { err.write_all(text.as_bytes()) };
            return code;
        }
    };
    match dispatch(cli, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            1
        }
    }
}
