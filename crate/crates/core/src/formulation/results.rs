use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use minfine_solver::{Solution, Status};

use super::{Formulation, VarKind, VariableRef};
use crate::economics::crf;
use crate::error::ResultError;
use crate::model::{Component, EnergySystemModel};

/// Slack allowed on column bounds when checking a primal point.
pub const BOUND_TOL: f64 = 1e-7;
/// Row slack, scaled by `1 + |rhs|`.
pub const ROW_TOL: f64 = 1e-7;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CostBreakdown {
    pub component: String,
    pub annualized_invest: f64,
    pub fixed_opex: f64,
    pub variable_opex: f64,
    pub commodity_cost: f64,
}

impl CostBreakdown {
    pub fn total(&self) -> f64 {
        self.annualized_invest + self.fixed_opex + self.variable_opex + self.commodity_cost
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct CapacityValue {
    pub component: String,
    pub location: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct BuildDecision {
    pub component: String,
    pub location: String,
    pub built: bool,
}

/// One value of a time-indexed decision on the original horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ScheduleEntry {
    pub component: String,
    pub location: String,
    pub kind: String,
    pub t: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct StorageState {
    pub component: String,
    pub region: String,
    pub t: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct InterPeriodState {
    pub component: String,
    pub region: String,
    pub period: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct ShadowPrice {
    pub region: String,
    pub commodity: String,
    pub t: usize,
    pub value: f64,
}

/// Scarcity price of an annual limit, non-negative at optimality.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct LimitDual {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "camelCase")]
pub struct ResultSet {
    pub status: String,
    pub objective_tac: f64,
    pub capacities: Vec<CapacityValue>,
    pub build_decisions: Vec<BuildDecision>,
    pub schedules: Vec<ScheduleEntry>,
    pub storage_states: Vec<StorageState>,
    pub inter_period_states: Vec<InterPeriodState>,
    pub cost_breakdown: Vec<CostBreakdown>,
    /// Balance duals per original step; `None` for mixed-integer problems.
    pub shadow_prices: Option<Vec<ShadowPrice>>,
    pub limit_duals: Option<Vec<LimitDual>>,
}

fn check_point(f: &Formulation, x: &[f64]) -> Result<(), ResultError> {
    let p = &f.problem;
    if x.len() != p.num_vars() {
        return Err(ResultError::Length { got: x.len(), expected: p.num_vars() });
    }
    for j in 0..p.num_vars() {
        let (lo, hi) = (p.lower[j], p.upper[j]);
        if !(x[j] >= lo - BOUND_TOL && x[j] <= hi + BOUND_TOL) {
            return Err(ResultError::BoundViolation {
                column: p.col_names[j].clone(),
                value: x[j],
                lower: lo,
                upper: hi,
            });
        }
    }
    for row in &p.rows {
        let v = row.violation(x);
        if !(v <= ROW_TOL * (1.0 + row.rhs.abs())) {
            return Err(ResultError::RowViolation { row: row.name.clone(), amount: v });
        }
    }
    Ok(())
}

fn edge_length(comp: &Component, label: &str) -> f64 {
    match comp {
        Component::Transmission(t) => t.edges.iter().find(|e| e.label() == label).map_or(0.0, |e| e.length),
        _ => 1.0,
    }
}

/// Cost per component recomputed from the model's economic parameters, not from the
/// objective vector of the compiled problem.
pub fn cost_breakdown(model: &EnergySystemModel, f: &Formulation, x: &[f64]) -> Vec<CostBreakdown> {
    let omega = model.time().annual_scale();
    let mut out: Vec<CostBreakdown> = model
        .components()
        .iter()
        .map(|c| CostBreakdown {
            component: c.name().to_string(),
            annualized_invest: 0.0,
            fixed_opex: 0.0,
            variable_opex: 0.0,
            commodity_cost: 0.0,
        })
        .collect();
    let index: HashMap<&str, usize> =
        model.components().iter().enumerate().map(|(i, c)| (c.name(), i)).collect();
    let commodity_cost = |c: &Component| match c {
        Component::Source(s) | Component::Sink(s) => s.commodity_cost_per_unit,
        _ => 0.0,
    };
    for v in &f.variables {
        let i = index[v.component.as_str()];
        let comp = &model.components()[i];
        let e = comp.economics();
        let value = x[v.index];
        let entry = &mut out[i];
        let weight = || omega * f.layout.weights[v.time.expect("timed variable")];
        match v.kind {
            VarKind::Capacity => {
                let a = crf(e.interest_rate, e.economic_lifetime).unwrap_or(f64::NAN);
                entry.annualized_invest += value * e.invest_per_capacity * edge_length(comp, &v.location) * a;
                entry.fixed_opex += value * e.opex_per_capacity;
            }
            VarKind::Build => {
                let a = crf(e.interest_rate, e.economic_lifetime).unwrap_or(f64::NAN);
                entry.annualized_invest += value * e.invest_if_built * a;
                entry.fixed_opex += value * e.opex_if_built_per_year;
            }
            VarKind::Operation => {
                entry.variable_opex += weight() * value * e.opex_per_operation;
                entry.commodity_cost += weight() * value * commodity_cost(comp);
            }
            VarKind::Discharge | VarKind::Flow => {
                entry.variable_opex += weight() * value * e.opex_per_operation;
            }
            VarKind::Charge | VarKind::Soc | VarKind::SocIntra | VarKind::SocInter | VarKind::OnOff => {}
        }
    }
    for fo in &f.fixed_operations {
        let i = index[fo.component.as_str()];
        let comp = &model.components()[i];
        let w = omega * f.layout.weights[fo.step];
        out[i].variable_opex += w * fo.value * comp.economics().opex_per_operation;
        out[i].commodity_cost += w * fo.value * commodity_cost(comp);
    }
    out
}

/// Total annual cost of a primal point, after checking bounds and rows.
pub fn evaluate_solution(model: &EnergySystemModel, f: &Formulation, x: &[f64]) -> Result<f64, ResultError> {
    check_point(f, x)?;
    Ok(cost_breakdown(model, f, x).iter().map(CostBreakdown::total).sum())
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceResiduals {
    /// `activity - rhs` of every balance row, in row order.
    pub rows: Vec<f64>,
    /// Largest absolute residual per (region, commodity).
    pub max: BTreeMap<(String, String), f64>,
}

impl BalanceResiduals {
    pub fn worst(&self) -> f64 {
        self.max.values().copied().fold(0.0, f64::max)
    }
}

pub fn balance_residuals(f: &Formulation, x: &[f64]) -> BalanceResiduals {
    let mut rows = Vec::with_capacity(f.balance_rows.len());
    let mut max = BTreeMap::new();
    for b in &f.balance_rows {
        let row = &f.problem.rows[b.row];
        let r = row.activity(x) - row.rhs;
        rows.push(r);
        let e = max.entry((b.region.clone(), b.commodity.clone())).or_insert(0.0f64);
        *e = e.max(r.abs());
    }
    BalanceResiduals { rows, max }
}

/// Columns of one (kind, component, location) family indexed by modeled step.
fn families<'a>(f: &'a Formulation, kinds: &[VarKind]) -> Vec<(&'a VariableRef, Vec<usize>)> {
    let mut order: Vec<(&VariableRef, Vec<usize>)> = Vec::new();
    let mut pos: HashMap<(VarKind, &str, &str), usize> = HashMap::new();
    for v in f.variables.iter().filter(|v| kinds.contains(&v.kind)) {
        let key = (v.kind, v.component.as_str(), v.location.as_str());
        let i = *pos.entry(key).or_insert_with(|| {
            order.push((v, vec![usize::MAX; f.layout.num_steps]));
            order.len() - 1
        });
        order[i].1[v.time.expect("timed variable")] = v.index;
    }
    order
}

fn schedules(model: &EnergySystemModel, f: &Formulation, x: &[f64]) -> Vec<ScheduleEntry> {
    let n = model.time().num_steps();
    let mut out = Vec::new();
    let mut fixed: BTreeMap<(&str, &str), Vec<f64>> = BTreeMap::new();
    for fo in &f.fixed_operations {
        fixed
            .entry((fo.component.as_str(), fo.location.as_str()))
            .or_insert_with(|| vec![0.0; f.layout.num_steps])[fo.step] = fo.value;
    }
    for ((comp, loc), values) in &fixed {
        for t in 0..n {
            out.push(ScheduleEntry {
                component: comp.to_string(),
                location: loc.to_string(),
                kind: VarKind::Operation.as_str().to_string(),
                t,
                value: values[f.layout.modeled_step(t)],
            });
        }
    }
    let kinds = [VarKind::Operation, VarKind::Charge, VarKind::Discharge, VarKind::Flow, VarKind::OnOff];
    for (v, cols) in families(f, &kinds) {
        for t in 0..n {
            out.push(ScheduleEntry {
                component: v.component.clone(),
                location: v.location.clone(),
                kind: v.kind.as_str().to_string(),
                t,
                value: x[cols[f.layout.modeled_step(t)]],
            });
        }
    }
    let rank: HashMap<&str, usize> = model.components().iter().enumerate().map(|(i, c)| (c.name(), i)).collect();
    out.sort_by(|a, b| {
        (rank[a.component.as_str()], &a.location, &a.kind, a.t).cmp(&(rank[b.component.as_str()], &b.location, &b.kind, b.t))
    });
    out
}

fn storage_states(model: &EnergySystemModel, f: &Formulation, x: &[f64]) -> (Vec<StorageState>, Vec<InterPeriodState>) {
    let n = model.time().num_steps();
    let dt = model.time().hours_per_step();
    let mut states = Vec::new();
    let mut inter_states = Vec::new();
    for comp in model.components() {
        let Component::Storage(st) = comp else { continue };
        for region in &st.regions {
            let mine = |kind: VarKind| {
                f.variables_of(kind, &st.name).filter(move |v| &v.location == region)
            };
            let mut soc = vec![f64::NAN; n + 1];
            match &f.layout.aggregation {
                None => {
                    for v in mine(VarKind::Soc) {
                        soc[v.time.unwrap()] = x[v.index];
                    }
                }
                Some(tps) => {
                    let p_len = tps.period_length;
                    let mut local: HashMap<(usize, usize), f64> = HashMap::new();
                    for v in mine(VarKind::Soc).chain(mine(VarKind::SocIntra)) {
                        local.insert((v.period.unwrap(), v.time.unwrap()), x[v.index]);
                    }
                    let mut inter = vec![f64::NAN; tps.num_periods + 1];
                    for v in mine(VarKind::SocInter) {
                        inter[v.time.unwrap()] = x[v.index];
                    }
                    let linked = !inter.iter().any(|v| v.is_nan());
                    for t in 0..=n {
                        let (p, tau) = if t == n { (tps.num_periods - 1, p_len) } else { (t / p_len, t % p_len) };
                        let j = tps.ordering_map[p];
                        let within = local[&(j, tau)];
                        soc[t] = if linked {
                            if t == n {
                                inter[tps.num_periods]
                            } else {
                                inter[p] * st.retention(tau as f64 * dt) + within
                            }
                        } else {
                            within
                        };
                    }
                    if linked {
                        for (period, &value) in inter.iter().enumerate() {
                            inter_states.push(InterPeriodState {
                                component: st.name.clone(),
                                region: region.clone(),
                                period,
                                value,
                            });
                        }
                    }
                }
            }
            for (t, value) in soc.into_iter().enumerate() {
                states.push(StorageState { component: st.name.clone(), region: region.clone(), t, value });
            }
        }
    }
    (states, inter_states)
}

/// Maps an optimal solution back onto components, regions and original time steps.
pub fn extract_results(
    model: &EnergySystemModel,
    f: &Formulation,
    solution: &Solution,
) -> Result<ResultSet, ResultError> {
    if solution.status != Status::Optimal {
        return Err(ResultError::NotOptimal(solution.status));
    }
    let x = &solution.primal;
    check_point(f, x)?;
    let capacities = f
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Capacity)
        .map(|v| CapacityValue { component: v.component.clone(), location: v.location.clone(), value: x[v.index] })
        .collect();
    let build_decisions = f
        .variables
        .iter()
        .filter(|v| v.kind == VarKind::Build)
        .map(|v| BuildDecision { component: v.component.clone(), location: v.location.clone(), built: x[v.index] > 0.5 })
        .collect();
    let (storage_states, inter_period_states) = storage_states(model, f, x);
    let lp_duals = if f.is_mip() { None } else { solution.duals.as_ref() };
    let shadow_prices = lp_duals.map(|y| {
        let by_step: HashMap<(&str, &str, usize), f64> = f
            .balance_rows
            .iter()
            .map(|b| ((b.region.as_str(), b.commodity.as_str(), b.step), y[b.row] / f.layout.weights[b.step]))
            .collect();
        let mut out = Vec::new();
        for region in model.regions() {
            for c in model.commodities() {
                for t in 0..model.time().num_steps() {
                    if let Some(&value) = by_step.get(&(region.as_str(), c.label.as_str(), f.layout.modeled_step(t))) {
                        out.push(ShadowPrice { region: region.clone(), commodity: c.label.clone(), t, value });
                    }
                }
            }
        }
        out
    });
    let limit_duals = lp_duals.map(|y| {
        f.limit_rows.iter().map(|l| LimitDual { name: l.name.clone(), value: -y[l.row] }).collect()
    });
    Ok(ResultSet {
        status: solution.status.as_str().to_string(),
        objective_tac: solution.objective,
        capacities,
        build_decisions,
        schedules: schedules(model, f, x),
        storage_states,
        inter_period_states,
        cost_breakdown: cost_breakdown(model, f, x),
        shadow_prices,
        limit_duals,
    })
}
