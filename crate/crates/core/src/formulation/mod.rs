//! Compiles a model into a sparse LP/MILP and maps solutions back to component results.

mod results;

use std::collections::BTreeMap;

use serde::Serialize;

use minfine_solver::{
    solve_lp, solve_milp, MilpOptions, ProblemBuilder, Row, Sense, Solution, SolverError, SparseProblem,
};

use crate::economics::crf;
use crate::error::FormulationError;
use crate::model::{
    Component, ConversionSpec, EnergySystemModel, SourceSinkSpec, StorageSpec, TransmissionSpec,
};
use crate::tsa::TypicalPeriodSet;
use crate::validate::validate_model;

pub use results::{
    balance_residuals, cost_breakdown, evaluate_solution, extract_results, BalanceResiduals,
    BuildDecision, CapacityValue, CostBreakdown, InterPeriodState, LimitDual, ResultSet,
    ScheduleEntry, ShadowPrice, StorageState, BOUND_TOL, ROW_TOL,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "camelCase")]
pub enum VarKind {
    Capacity,
    Build,
    Operation,
    Charge,
    Discharge,
    /// State of charge at full resolution, or inside one typical period without linkage.
    Soc,
    SocIntra,
    SocInter,
    Flow,
    OnOff,
}

impl VarKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VarKind::Capacity => "capacity",
            VarKind::Build => "build",
            VarKind::Operation => "operation",
            VarKind::Charge => "charge",
            VarKind::Discharge => "discharge",
            VarKind::Soc => "soc",
            VarKind::SocIntra => "socIntra",
            VarKind::SocInter => "socInter",
            VarKind::Flow => "flow",
            VarKind::OnOff => "onOff",
        }
    }
}

/// What a problem column means in model terms.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VariableRef {
    pub index: usize,
    pub kind: VarKind,
    pub component: String,
    /// Region, edge label `A-B` for capacities, or direction `A->B` for flows.
    pub location: String,
    /// Typical period for aggregated storage states.
    pub period: Option<usize>,
    /// Modeled step; for storage states the boundary index, for inter-period states the period.
    pub time: Option<usize>,
}

/// How storage states are chained when the horizon is aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum StorageLinkage {
    /// Intra-period states plus one inter-period state per original period.
    #[default]
    InterPeriod,
    /// Each typical period closes its own cycle; no energy moves between periods.
    PeriodCyclic,
}

/// Mapping between modeled steps and the original horizon.
#[derive(Debug, Clone, PartialEq)]
pub struct StepLayout {
    pub num_steps: usize,
    /// Steps per period; the whole horizon at full resolution.
    pub period_length: usize,
    /// Occurrences of each modeled step in the original horizon.
    pub weights: Vec<f64>,
    /// Original step whose data each modeled step uses.
    pub source_steps: Vec<usize>,
    pub aggregation: Option<TypicalPeriodSet>,
    pub linkage: StorageLinkage,
}

impl StepLayout {
    fn full(n: usize) -> Self {
        StepLayout {
            num_steps: n,
            period_length: n,
            weights: vec![1.0; n],
            source_steps: (0..n).collect(),
            aggregation: None,
            linkage: StorageLinkage::InterPeriod,
        }
    }

    fn aggregated(tps: &TypicalPeriodSet, linkage: StorageLinkage) -> Self {
        let n = tps.num_typical_steps();
        StepLayout {
            num_steps: n,
            period_length: tps.period_length,
            weights: (0..n).map(|s| tps.weights[s / tps.period_length] as f64).collect(),
            source_steps: (0..n).map(|s| tps.source_step(s)).collect(),
            aggregation: Some(tps.clone()),
            linkage,
        }
    }

    pub fn num_periods(&self) -> usize {
        self.num_steps / self.period_length
    }

    /// Modeled step standing in for original step `t`.
    pub fn modeled_step(&self, t: usize) -> usize {
        match &self.aggregation {
            None => t,
            Some(a) => a.ordering_map[t / a.period_length] * a.period_length + t % a.period_length,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BalanceRow {
    pub row: usize,
    pub region: String,
    pub commodity: String,
    pub step: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LimitRow {
    pub row: usize,
    pub name: String,
}

/// Operation pinned by an absolute `operationRateFix`; folded into right-hand sides.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedOperation {
    pub component: String,
    pub location: String,
    pub step: usize,
    pub value: f64,
}

/// The compiled program together with the tables needed to interpret its columns and rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Formulation {
    pub problem: SparseProblem,
    pub variables: Vec<VariableRef>,
    pub balance_rows: Vec<BalanceRow>,
    pub limit_rows: Vec<LimitRow>,
    pub fixed_operations: Vec<FixedOperation>,
    pub layout: StepLayout,
}

impl Formulation {
    /// Rows whose name starts with `tag[`.
    pub fn rows_with_tag<'a>(&'a self, tag: &'a str) -> impl Iterator<Item = (usize, &'a Row)> + 'a {
        self.problem
            .rows
            .iter()
            .enumerate()
            .filter(move |(_, r)| r.name.strip_prefix(tag).is_some_and(|rest| rest.starts_with('[')))
    }

    pub fn variables_of<'a>(
        &'a self,
        kind: VarKind,
        component: &'a str,
    ) -> impl Iterator<Item = &'a VariableRef> + 'a {
        self.variables.iter().filter(move |v| v.kind == kind && v.component == component)
    }

    pub fn is_mip(&self) -> bool {
        self.problem.has_integers()
    }

    /// Solves with branch and bound when binaries are present, the simplex otherwise.
    pub fn solve(&self, options: &MilpOptions) -> Result<Solution, SolverError> {
        if self.is_mip() {
            solve_milp(&self.problem, options)
        } else {
            solve_lp(&self.problem, &options.lp)
        }
    }
}

/// Compiles the model at full resolution, or on the typical periods of `tps` with
/// inter-period storage linkage.
pub fn build_problem(
    model: &EnergySystemModel,
    tps: Option<&TypicalPeriodSet>,
) -> Result<Formulation, FormulationError> {
    match tps {
        None => compile(model, StepLayout::full(model.time().num_steps())),
        Some(t) => build_aggregated_problem(model, t, StorageLinkage::InterPeriod),
    }
}

pub fn build_linked_problem(
    model: &EnergySystemModel,
    tps: &TypicalPeriodSet,
) -> Result<Formulation, FormulationError> {
    build_aggregated_problem(model, tps, StorageLinkage::InterPeriod)
}

pub fn build_aggregated_problem(
    model: &EnergySystemModel,
    tps: &TypicalPeriodSet,
    linkage: StorageLinkage,
) -> Result<Formulation, FormulationError> {
    check_aggregation(model, tps)?;
    compile(model, StepLayout::aggregated(tps, linkage))
}

fn check_aggregation(model: &EnergySystemModel, tps: &TypicalPeriodSet) -> Result<(), FormulationError> {
    let mismatch = |m: String| Err(FormulationError::AggregationMismatch(m));
    let n = model.time().num_steps();
    if tps.k == 0 || tps.period_length == 0 {
        return mismatch("empty typical period set".into());
    }
    if tps.period_length * tps.num_periods != n {
        return mismatch(format!(
            "{} periods of {} steps do not cover {n} steps",
            tps.num_periods, tps.period_length
        ));
    }
    if tps.ordering_map.len() != tps.num_periods {
        return mismatch(format!(
            "ordering map has {} entries for {} periods",
            tps.ordering_map.len(),
            tps.num_periods
        ));
    }
    if tps.medoid_indices.len() != tps.k || tps.weights.len() != tps.k {
        return mismatch("medoid or weight count differs from k".into());
    }
    if tps.ordering_map.iter().any(|&j| j >= tps.k) || tps.medoid_indices.iter().any(|&m| m >= tps.num_periods) {
        return mismatch("cluster or medoid index out of range".into());
    }
    if tps.weights.iter().sum::<u64>() != tps.num_periods as u64 {
        return mismatch("weights do not sum to the number of periods".into());
    }
    Ok(())
}

#[derive(Default)]
struct BalanceAcc {
    terms: Vec<(usize, f64)>,
    constant: f64,
}

struct Compiler<'m> {
    model: &'m EnergySystemModel,
    layout: StepLayout,
    omega: f64,
    dt: f64,
    pb: ProblemBuilder,
    vars: Vec<VariableRef>,
    /// Keyed by (region index, commodity index, step).
    balance: BTreeMap<(usize, usize, usize), BalanceAcc>,
    fixed: Vec<FixedOperation>,
}

fn compile(model: &EnergySystemModel, layout: StepLayout) -> Result<Formulation, FormulationError> {
    if model.components().is_empty() {
        return Err(FormulationError::NoComponents);
    }
    let diagnostics = validate_model(model);
    if !diagnostics.is_empty() {
        return Err(FormulationError::Invalid(diagnostics));
    }
    let mut c = Compiler {
        model,
        omega: model.time().annual_scale(),
        dt: model.time().hours_per_step(),
        layout,
        pb: ProblemBuilder::new(model.name()),
        vars: Vec::new(),
        balance: BTreeMap::new(),
        fixed: Vec::new(),
    };
    for comp in model.components() {
        match comp {
            Component::Source(s) => c.source_sink(comp, s, 1.0),
            Component::Sink(s) => c.source_sink(comp, s, -1.0),
            Component::Conversion(cv) => c.conversion(comp, cv),
            Component::Storage(st) => c.storage(comp, st),
            Component::Transmission(t) => c.transmission(comp, t),
        }
    }
    let balance_rows = c.balance_rows()?;
    if balance_rows.is_empty() {
        return Err(FormulationError::NoBalanceRows);
    }
    let limit_rows = c.limit_rows()?;
    let problem = c.pb.build()?;
    Ok(Formulation {
        problem,
        variables: c.vars,
        balance_rows,
        limit_rows,
        fixed_operations: c.fixed,
        layout: c.layout,
    })
}

fn annuity(comp: &Component) -> f64 {
    let e = comp.economics();
    crf(e.interest_rate, e.economic_lifetime).expect("economics validated before compilation")
}

impl Compiler<'_> {
    #[allow(clippy::too_many_arguments)]
    fn var(
        &mut self,
        kind: VarKind,
        comp: &str,
        loc: &str,
        period: Option<usize>,
        time: Option<usize>,
        bounds: (f64, f64),
        cost: f64,
        integer: bool,
    ) -> usize {
        let name = match (period, time) {
            (Some(p), Some(t)) => format!("{}[{comp},{loc},{p},{t}]", col_prefix(kind)),
            (None, Some(t)) => format!("{}[{comp},{loc},{t}]", col_prefix(kind)),
            _ => format!("{}[{comp},{loc}]", col_prefix(kind)),
        };
        let index = self.pb.add_var(name, bounds.0, bounds.1, cost, integer);
        self.vars.push(VariableRef {
            index,
            kind,
            component: comp.to_string(),
            location: loc.to_string(),
            period,
            time,
        });
        index
    }

    fn row(&mut self, name: String, sense: Sense, rhs: f64, terms: Vec<(usize, f64)>) {
        self.pb.add_row(name, sense, rhs, terms);
    }

    fn balance_term(&mut self, region: &str, commodity: &str, step: usize, col: usize, coef: f64) {
        let key = self.balance_key(region, commodity, step);
        self.balance.entry(key).or_default().terms.push((col, coef));
    }

    fn balance_constant(&mut self, region: &str, commodity: &str, step: usize, value: f64) {
        let key = self.balance_key(region, commodity, step);
        self.balance.entry(key).or_default().constant += value;
    }

    fn balance_key(&self, region: &str, commodity: &str, step: usize) -> (usize, usize, usize) {
        let r = self.model.regions().iter().position(|x| x == region).expect("known region");
        let c = self.model.commodities().iter().position(|x| x.label == commodity).expect("known commodity");
        (r, c, step)
    }

    /// Operational cost weight of one unit at modeled step `s`.
    fn step_weight(&self, s: usize) -> f64 {
        self.omega * self.layout.weights[s]
    }

    /// Capacity column (and build binary) of a component at one location.
    fn capacity(&mut self, comp: &Component, loc: &str, invest_scale: f64) -> Option<usize> {
        let cap = comp.capacity();
        if !cap.has_capacity() {
            return None;
        }
        let e = comp.economics();
        let a = annuity(comp);
        let name = comp.name();
        let bounds = match cap.fix(loc) {
            Some(f) if cap.has_build_binary => (0.0, f),
            Some(f) => (f, f),
            None => (cap.min(loc), cap.max(loc)),
        };
        let cost = e.invest_per_capacity * invest_scale * a + e.opex_per_capacity;
        let col = self.var(VarKind::Capacity, name, loc, None, None, bounds, cost, false);
        if cap.has_build_binary {
            let bcost = e.invest_if_built * a + e.opex_if_built_per_year;
            let b = self.var(VarKind::Build, name, loc, None, None, (0.0, 1.0), bcost, true);
            let upper = cap.fix(loc).unwrap_or(cap.max(loc));
            self.row(format!("buildmax[{name},{loc}]"), Sense::Le, 0.0, vec![(col, 1.0), (b, -upper)]);
            let lower = cap.fix(loc).unwrap_or(cap.min_if_built(loc));
            if lower > 0.0 {
                self.row(format!("buildmin[{name},{loc}]"), Sense::Ge, 0.0, vec![(col, 1.0), (b, -lower)]);
            }
        }
        Some(col)
    }

    fn source_sink(&mut self, comp: &Component, s: &SourceSinkSpec, sign: f64) {
        let unit_cost = s.economics.opex_per_operation + s.commodity_cost_per_unit;
        for loc in &s.regions {
            let cap = self.capacity(comp, loc, 1.0);
            let fix = s.operation_rate_fix.as_ref().and_then(|m| m.get(loc));
            let rate_max = s.operation_rate_max.as_ref().and_then(|m| m.get(loc));
            for step in 0..self.layout.num_steps {
                let d = self.layout.source_steps[step];
                let w = self.step_weight(step);
                match (cap, fix) {
                    (None, Some(fix)) => {
                        let value = fix[d];
                        self.balance_constant(loc, &s.commodity, step, sign * value);
                        self.pb.add_offset(w * unit_cost * value);
                        self.fixed.push(FixedOperation {
                            component: s.name.clone(),
                            location: loc.clone(),
                            step,
                            value,
                        });
                    }
                    _ => {
                        let op = self.var(
                            VarKind::Operation,
                            &s.name,
                            loc,
                            None,
                            Some(step),
                            (0.0, f64::INFINITY),
                            w * unit_cost,
                            false,
                        );
                        self.balance_term(loc, &s.commodity, step, op, sign);
                        if let Some(cap) = cap {
                            let tag = format!("[{},{loc},{step}]", s.name);
                            match fix {
                                Some(fix) => self.row(
                                    format!("opfix{tag}"),
                                    Sense::Eq,
                                    0.0,
                                    vec![(op, 1.0), (cap, -fix[d] * self.dt)],
                                ),
                                None => {
                                    let alpha = rate_max.map_or(1.0, |m| m[d]);
                                    self.row(
                                        format!("opmax{tag}"),
                                        Sense::Le,
                                        0.0,
                                        vec![(op, 1.0), (cap, -alpha * self.dt)],
                                    );
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    fn conversion(&mut self, comp: &Component, cv: &ConversionSpec) {
        let period = self.layout.period_length;
        for loc in &cv.regions {
            let cap = self.capacity(comp, loc, 1.0);
            let cap_fix = cv.capacity.fix(loc);
            let mut ops = Vec::with_capacity(self.layout.num_steps);
            for step in 0..self.layout.num_steps {
                let w = self.step_weight(step);
                let op = self.var(
                    VarKind::Operation,
                    &cv.name,
                    loc,
                    None,
                    Some(step),
                    (0.0, f64::INFINITY),
                    w * cv.economics.opex_per_operation,
                    false,
                );
                ops.push(op);
                for (commodity, &gamma) in &cv.conversion_factors {
                    self.balance_term(loc, commodity, step, op, gamma);
                }
                let tag = format!("[{},{loc},{step}]", cv.name);
                if let Some(cap) = cap {
                    self.row(format!("opmax{tag}"), Sense::Le, 0.0, vec![(op, 1.0), (cap, -self.dt)]);
                    if step % period != 0 {
                        let prev = ops[step - 1];
                        if let Some(up) = cv.ramp_up_max {
                            self.row(
                                format!("rampup{tag}"),
                                Sense::Le,
                                0.0,
                                vec![(op, 1.0), (prev, -1.0), (cap, -up * self.dt)],
                            );
                        }
                        if let Some(down) = cv.ramp_down_max {
                            self.row(
                                format!("rampdown{tag}"),
                                Sense::Le,
                                0.0,
                                vec![(prev, 1.0), (op, -1.0), (cap, -down * self.dt)],
                            );
                        }
                    }
                }
                if let (Some(plm), Some(fix)) = (cv.part_load_min, cap_fix) {
                    let on = self.var(VarKind::OnOff, &cv.name, loc, None, Some(step), (0.0, 1.0), 0.0, true);
                    self.row(format!("plmax{tag}"), Sense::Le, 0.0, vec![(op, 1.0), (on, -fix * self.dt)]);
                    self.row(
                        format!("plmin{tag}"),
                        Sense::Ge,
                        0.0,
                        vec![(op, 1.0), (on, -plm * fix * self.dt)],
                    );
                }
            }
        }
    }

    fn storage(&mut self, comp: &Component, st: &StorageSpec) {
        let n = self.layout.num_steps;
        for loc in &st.regions {
            let cap = self.capacity(comp, loc, 1.0).expect("storage has capacity");
            let mut ch = Vec::with_capacity(n);
            let mut dis = Vec::with_capacity(n);
            for step in 0..n {
                let w = self.step_weight(step);
                let c = self.var(VarKind::Charge, &st.name, loc, None, Some(step), (0.0, f64::INFINITY), 0.0, false);
                let d = self.var(
                    VarKind::Discharge,
                    &st.name,
                    loc,
                    None,
                    Some(step),
                    (0.0, f64::INFINITY),
                    w * st.economics.opex_per_operation,
                    false,
                );
                self.balance_term(loc, &st.commodity, step, c, -1.0);
                self.balance_term(loc, &st.commodity, step, d, 1.0);
                let tag = format!("[{},{loc},{step}]", st.name);
                self.row(format!("chmax{tag}"), Sense::Le, 0.0, vec![(c, 1.0), (cap, -st.charge_rate_max * self.dt)]);
                self.row(
                    format!("dismax{tag}"),
                    Sense::Le,
                    0.0,
                    vec![(d, 1.0), (cap, -st.discharge_rate_max * self.dt)],
                );
                ch.push(c);
                dis.push(d);
            }
            let linked = self.layout.aggregation.is_some() && self.layout.linkage == StorageLinkage::InterPeriod;
            if linked {
                self.linked_states(st, loc, cap, &ch, &dis);
            } else {
                self.period_states(st, loc, cap, &ch, &dis);
            }
        }
    }

    /// Evolution row `soc[next] = ret * soc[prev] + eta_ch * ch - dis / eta_dis`.
    fn evolution(&mut self, name: String, st: &StorageSpec, prev: usize, next: usize, ch: usize, dis: usize) {
        let ret = st.retention(self.dt);
        self.row(
            name,
            Sense::Eq,
            0.0,
            vec![(next, 1.0), (prev, -ret), (ch, -st.charge_efficiency), (dis, 1.0 / st.discharge_efficiency)],
        );
    }

    /// States closing a cycle within each modeled period (the whole horizon at full resolution).
    fn period_states(&mut self, st: &StorageSpec, loc: &str, cap: usize, ch: &[usize], dis: &[usize]) {
        let p_len = self.layout.period_length;
        let aggregated = self.layout.aggregation.is_some();
        for j in 0..self.layout.num_periods() {
            let (period, label) = if aggregated { (Some(j), format!("{j},")) } else { (None, String::new()) };
            let soc: Vec<usize> = (0..=p_len)
                .map(|tau| {
                    let t = if aggregated { tau } else { j * p_len + tau };
                    self.var(VarKind::Soc, &st.name, loc, period, Some(t), (0.0, f64::INFINITY), 0.0, false)
                })
                .collect();
            for tau in 0..p_len {
                let s = j * p_len + tau;
                self.evolution(format!("socev[{},{loc},{label}{tau}]", st.name), st, soc[tau], soc[tau + 1], ch[s], dis[s]);
            }
            if st.cyclic {
                self.row(format!("soccyc[{},{loc}{}]", st.name, suffix(period)), Sense::Eq, 0.0, vec![(soc[0], 1.0), (soc[p_len], -1.0)]);
            } else {
                self.row(
                    format!("socinit[{},{loc}{}]", st.name, suffix(period)),
                    Sense::Eq,
                    0.0,
                    vec![(soc[0], 1.0), (cap, -st.soc_min_fraction)],
                );
            }
            for (tau, &v) in soc.iter().enumerate() {
                self.row(format!("socmax[{},{loc},{label}{tau}]", st.name), Sense::Le, 0.0, vec![(v, 1.0), (cap, -1.0)]);
                if st.soc_min_fraction > 0.0 {
                    self.row(
                        format!("socmin[{},{loc},{label}{tau}]", st.name),
                        Sense::Ge,
                        0.0,
                        vec![(v, 1.0), (cap, -st.soc_min_fraction)],
                    );
                }
            }
        }
    }

    /// Superposition form: intra-period states anchored at zero plus one inter-period state
    /// per original period boundary.
    fn linked_states(&mut self, st: &StorageSpec, loc: &str, cap: usize, ch: &[usize], dis: &[usize]) {
        let tps = self.layout.aggregation.clone().expect("aggregated layout");
        let p_len = tps.period_length;
        let mut intra = Vec::with_capacity(tps.k);
        for j in 0..tps.k {
            let states: Vec<usize> = (0..=p_len)
                .map(|tau| {
                    let bounds = if tau == 0 { (0.0, 0.0) } else { (f64::NEG_INFINITY, f64::INFINITY) };
                    self.var(VarKind::SocIntra, &st.name, loc, Some(j), Some(tau), bounds, 0.0, false)
                })
                .collect();
            for tau in 0..p_len {
                let s = j * p_len + tau;
                self.evolution(format!("socev[{},{loc},{j},{tau}]", st.name), st, states[tau], states[tau + 1], ch[s], dis[s]);
            }
            intra.push(states);
        }
        let inter: Vec<usize> = (0..=tps.num_periods)
            .map(|p| self.var(VarKind::SocInter, &st.name, loc, None, Some(p), (0.0, f64::INFINITY), 0.0, false))
            .collect();
        let period_ret = st.retention(p_len as f64 * self.dt);
        for p in 0..tps.num_periods {
            let j = tps.ordering_map[p];
            self.row(
                format!("interev[{},{loc},{p}]", st.name),
                Sense::Eq,
                0.0,
                vec![(inter[p + 1], 1.0), (inter[p], -period_ret), (intra[j][p_len], -1.0)],
            );
        }
        let last = tps.num_periods;
        if st.cyclic {
            self.row(format!("intercyc[{},{loc}]", st.name), Sense::Eq, 0.0, vec![(inter[0], 1.0), (inter[last], -1.0)]);
        } else {
            self.row(
                format!("socinit[{},{loc}]", st.name),
                Sense::Eq,
                0.0,
                vec![(inter[0], 1.0), (cap, -st.soc_min_fraction)],
            );
        }
        for p in 0..tps.num_periods {
            let j = tps.ordering_map[p];
            for tau in 0..=p_len {
                let decay = st.retention(tau as f64 * self.dt);
                let tag = format!("[{},{loc},{p},{tau}]", st.name);
                self.row(
                    format!("combmax{tag}"),
                    Sense::Le,
                    0.0,
                    vec![(inter[p], decay), (intra[j][tau], 1.0), (cap, -1.0)],
                );
                self.row(
                    format!("combmin{tag}"),
                    Sense::Ge,
                    0.0,
                    vec![(inter[p], decay), (intra[j][tau], 1.0), (cap, -st.soc_min_fraction)],
                );
            }
        }
    }

    fn transmission(&mut self, comp: &Component, t: &TransmissionSpec) {
        for e in &t.edges {
            let cap = self.capacity(comp, &e.label(), e.length);
            let keep = 1.0 - t.loss(e);
            let directions = [
                (e.forward_label(), &e.region_a, &e.region_b),
                (e.backward_label(), &e.region_b, &e.region_a),
            ];
            for step in 0..self.layout.num_steps {
                let w = self.step_weight(step);
                for (label, from, to) in &directions {
                    let f = self.var(
                        VarKind::Flow,
                        &t.name,
                        label,
                        None,
                        Some(step),
                        (0.0, f64::INFINITY),
                        w * t.economics.opex_per_operation,
                        false,
                    );
                    self.balance_term(from, &t.commodity, step, f, -1.0);
                    self.balance_term(to, &t.commodity, step, f, keep);
                    if let Some(cap) = cap {
                        self.row(
                            format!("flowmax[{},{label},{step}]", t.name),
                            Sense::Le,
                            0.0,
                            vec![(f, 1.0), (cap, -self.dt)],
                        );
                    }
                }
            }
        }
    }

    fn balance_rows(&mut self) -> Result<Vec<BalanceRow>, FormulationError> {
        let mut out = Vec::new();
        let entries = std::mem::take(&mut self.balance);
        for ((r, c, step), acc) in entries {
            let region = self.model.regions()[r].clone();
            let commodity = self.model.commodities()[c].label.clone();
            let name = format!("bal[{region},{commodity},{step}]");
            match self.pb.add_row(name.clone(), Sense::Eq, -acc.constant, acc.terms) {
                Some(row) => out.push(BalanceRow { row, region, commodity, step }),
                None if acc.constant.abs() > 1e-9 => {
                    return Err(FormulationError::TriviallyInfeasible { row: name, residual: acc.constant })
                }
                None => {}
            }
        }
        Ok(out)
    }

    fn limit_rows(&mut self) -> Result<Vec<LimitRow>, FormulationError> {
        let mut out = Vec::new();
        for limit in self.model.annual_limits() {
            if limit.limit.is_infinite() {
                continue;
            }
            let mut terms = Vec::new();
            let mut constant = 0.0;
            for m in &limit.members {
                for v in self.vars.iter().filter(|v| v.kind == VarKind::Operation && v.component == m.component) {
                    let s = v.time.expect("operation has a step");
                    terms.push((v.index, m.sign * self.step_weight(s)));
                }
                for f in self.fixed.iter().filter(|f| f.component == m.component) {
                    constant += m.sign * self.step_weight(f.step) * f.value;
                }
            }
            let name = format!("limit[{}]", limit.name);
            match self.pb.add_row(name.clone(), Sense::Le, limit.limit - constant, terms) {
                Some(row) => out.push(LimitRow { row, name: limit.name.clone() }),
                None if constant > limit.limit + 1e-9 * (1.0 + limit.limit.abs()) => {
                    return Err(FormulationError::TriviallyInfeasible {
                        row: name,
                        residual: constant - limit.limit,
                    })
                }
                None => {}
            }
        }
        Ok(out)
    }
}

fn col_prefix(kind: VarKind) -> &'static str {
    match kind {
        VarKind::Capacity => "cap",
        VarKind::Build => "build",
        VarKind::Operation => "op",
        VarKind::Charge => "ch",
        VarKind::Discharge => "dis",
        VarKind::Soc => "soc",
        VarKind::SocIntra => "socintra",
        VarKind::SocInter => "socinter",
        VarKind::Flow => "flow",
        VarKind::OnOff => "on",
    }
}

fn suffix(period: Option<usize>) -> String {
    period.map(|p| format!(",{p}")).unwrap_or_default()
}
