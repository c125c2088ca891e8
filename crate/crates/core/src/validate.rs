//! Value-level checks on a model whose structure `add_component` already accepted.

use std::collections::BTreeSet;
use std::fmt;

use serde::Serialize;

use crate::model::{
    CapacityPolicy, Component, ComponentKind, ConversionSpec, Economics, EnergySystemModel,
    RegionSeries, SourceSinkSpec, StorageSpec, TransmissionSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Diagnostic {
    pub severity: Severity,
    pub component: Option<String>,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        match &self.component {
            Some(c) => write!(f, "{sev}: {c}: {}", self.message),
            None => write!(f, "{sev}: {}", self.message),
        }
    }
}

struct Sink<'a> {
    component: Option<&'a str>,
    out: &'a mut Vec<Diagnostic>,
}

impl Sink<'_> {
    fn error(&mut self, message: impl Into<String>) {
        self.out.push(Diagnostic {
            severity: Severity::Error,
            component: self.component.map(str::to_string),
            message: message.into(),
        });
    }

    fn check(&mut self, ok: bool, message: impl FnOnce() -> String) {
        if !ok {
            self.error(message());
        }
    }
}

fn non_negative(v: f64) -> bool {
    v.is_finite() && v >= 0.0
}

/// Checks every value invariant of the model. An empty result means the model compiles.
///
/// Diagnostics come in component order, model-wide findings last.
pub fn validate_model(model: &EnergySystemModel) -> Vec<Diagnostic> {
    let mut out = Vec::new();
    for c in model.components() {
        let mut sink = Sink { component: Some(c.name()), out: &mut out };
        check_economics(&mut sink, c.economics());
        check_capacity(&mut sink, c.capacity(), &c.locations());
        match c {
            Component::Source(s) => check_source_sink(&mut sink, s, false),
            Component::Sink(s) => check_source_sink(&mut sink, s, true),
            Component::Conversion(cv) => check_conversion(&mut sink, cv),
            Component::Storage(st) => check_storage(&mut sink, st),
            Component::Transmission(t) => check_transmission(&mut sink, t),
        }
    }
    let mut sink = Sink { component: None, out: &mut out };
    if model.components().is_empty() {
        sink.error("no components");
    }
    for limit in model.annual_limits() {
        sink.check(!limit.limit.is_nan(), || format!("annual limit {}: limit is NaN", limit.name));
        sink.check(!limit.members.is_empty(), || format!("annual limit {} has no members", limit.name));
        for m in &limit.members {
            match model.component_by_name(&m.component).map(Component::kind) {
                None => sink.error(format!(
                    "annual limit {}: unknown component {}",
                    limit.name, m.component
                )),
                Some(ComponentKind::Storage | ComponentKind::Transmission) => sink.error(format!(
                    "annual limit {}: member {} must be a source, sink or conversion",
                    limit.name, m.component
                )),
                Some(_) => {}
            }
            sink.check(m.sign == 1.0 || m.sign == -1.0, || {
                format!("annual limit {}: sign of {} must be +1 or -1", limit.name, m.component)
            });
        }
    }
    out
}

fn check_economics(sink: &mut Sink, e: &Economics) {
    for (name, v) in [
        ("investPerCapacity", e.invest_per_capacity),
        ("opexPerCapacity", e.opex_per_capacity),
        ("opexPerOperation", e.opex_per_operation),
        ("investIfBuilt", e.invest_if_built),
        ("opexIfBuiltPerYear", e.opex_if_built_per_year),
    ] {
        sink.check(non_negative(v), || format!("{name} must be finite and non-negative, got {v}"));
    }
    sink.check((0.0..1.0).contains(&e.interest_rate), || {
        format!("interestRate {} outside [0, 1)", e.interest_rate)
    });
    sink.check(e.economic_lifetime >= 1, || "economicLifetime must be at least 1".to_string());
}

fn check_capacity(sink: &mut Sink, cap: &CapacityPolicy, locations: &[String]) {
    let known: BTreeSet<&str> = locations.iter().map(String::as_str).collect();
    for (field, value) in cap.region_values() {
        for key in value.keys() {
            sink.check(known.contains(key), || format!("{field} names unknown location {key}"));
        }
        for v in value.values() {
            sink.check(non_negative(v), || format!("{field} must be finite and non-negative, got {v}"));
        }
    }
    if !cap.has_capacity() {
        let stray = cap.region_values().map(|(f, _)| f).collect::<Vec<_>>();
        sink.check(stray.is_empty(), || {
            format!("{} given without a capacity variable", stray.join(", "))
        });
        sink.check(!cap.has_build_binary, || {
            "hasBuildBinary requires a capacity variable or capacityFix".to_string()
        });
        return;
    }
    for loc in locations {
        let (lo, hi) = (cap.min(loc), cap.max(loc));
        sink.check(lo <= hi, || format!("{loc}: capacityMin {lo} exceeds capacityMax {hi}"));
        if cap.capacity_fix.is_some() {
            match cap.fix(loc) {
                None => sink.error(format!("capacityFix missing for {loc}")),
                Some(f) => sink.check(lo <= f && f <= hi, || {
                    format!("{loc}: capacityFix {f} outside [{lo}, {hi}]")
                }),
            }
        }
        if cap.has_build_binary {
            sink.check(cap.fix(loc).is_some() || hi.is_finite(), || {
                format!("{loc}: hasBuildBinary needs a finite capacityMax or capacityFix")
            });
            let m = cap.min_if_built(loc);
            let upper = cap.fix(loc).unwrap_or(hi);
            sink.check(m <= upper, || {
                format!("{loc}: minCapacityIfBuilt {m} exceeds the capacity limit {upper}")
            });
        }
    }
    if !cap.has_build_binary {
        sink.check(cap.min_capacity_if_built.is_none(), || {
            "minCapacityIfBuilt requires hasBuildBinary".to_string()
        });
    }
}

fn check_series(
    sink: &mut Sink,
    name: &str,
    series: &RegionSeries,
    ok: impl Fn(f64) -> bool,
    range: &str,
) {
    for (region, values) in series {
        if let Some((t, v)) = values.iter().enumerate().find(|(_, v)| !ok(**v)) {
            sink.error(format!("{name}[{region}][{t}] = {v} outside {range}"));
        }
    }
}

fn check_source_sink(sink: &mut Sink, s: &SourceSinkSpec, is_sink: bool) {
    let has_cap = s.capacity.has_capacity();
    sink.check(s.commodity_cost_per_unit.is_finite(), || {
        "commodityCostPerUnit must be finite".to_string()
    });
    if s.operation_rate_max.is_some() && s.operation_rate_fix.is_some() {
        sink.error("operationRateMax and operationRateFix are mutually exclusive");
    }
    if let Some(m) = &s.operation_rate_max {
        check_series(sink, "operationRateMax", m, |v| (0.0..=1.0).contains(&v), "[0, 1]");
        sink.check(has_cap, || "operationRateMax requires a capacity variable".to_string());
    }
    if let Some(f) = &s.operation_rate_fix {
        check_series(sink, "operationRateFix", f, non_negative, "[0, ∞)");
    }
    if is_sink && s.operation_rate_fix.is_none() && !has_cap {
        sink.error("sink needs operationRateFix or a capacity variable");
    }
}

fn check_conversion(sink: &mut Sink, c: &ConversionSpec) {
    match c.conversion_factors.get(&c.reference_commodity) {
        None => sink.error(format!(
            "conversionFactors lacks the reference commodity {}",
            c.reference_commodity
        )),
        Some(&g) => sink.check(g == 1.0 || g == -1.0, || {
            format!("reference conversion factor must be +1 or -1, got {g}")
        }),
    }
    sink.check(c.conversion_factors.len() >= 2, || {
        "conversionFactors needs at least 2 commodities".to_string()
    });
    for (commodity, g) in &c.conversion_factors {
        sink.check(g.is_finite(), || format!("conversion factor of {commodity} must be finite"));
    }
    for (name, v) in [("rampUpMax", c.ramp_up_max), ("rampDownMax", c.ramp_down_max)] {
        if let Some(v) = v {
            sink.check(v > 0.0 && v <= 1.0, || format!("{name} {v} outside (0, 1]"));
            sink.check(c.capacity.has_capacity(), || format!("{name} requires a capacity variable"));
        }
    }
    if let Some(p) = c.part_load_min {
        sink.check(p > 0.0 && p < 1.0, || format!("partLoadMin {p} outside (0, 1)"));
        sink.check(c.capacity.capacity_fix.is_some(), || {
            "partLoadMin requires capacityFix".to_string()
        });
    }
}

fn check_storage(sink: &mut Sink, s: &StorageSpec) {
    let in_unit = |v: f64| v > 0.0 && v <= 1.0;
    sink.check(in_unit(s.charge_efficiency), || {
        format!("chargeEfficiency {} outside (0, 1]", s.charge_efficiency)
    });
    sink.check(in_unit(s.discharge_efficiency), || {
        format!("dischargeEfficiency {} outside (0, 1]", s.discharge_efficiency)
    });
    sink.check((0.0..1.0).contains(&s.self_discharge_per_hour), || {
        format!("selfDischargePerHour {} outside [0, 1)", s.self_discharge_per_hour)
    });
    for (name, v) in [("chargeRateMax", s.charge_rate_max), ("dischargeRateMax", s.discharge_rate_max)] {
        sink.check(v.is_finite() && v > 0.0, || format!("{name} must be positive, got {v}"));
    }
    sink.check((0.0..1.0).contains(&s.soc_min_fraction), || {
        format!("socMinFraction {} outside [0, 1)", s.soc_min_fraction)
    });
    sink.check(s.capacity.has_capacity(), || "storage requires a capacity variable".to_string());
}

fn check_transmission(sink: &mut Sink, t: &TransmissionSpec) {
    sink.check(!t.edges.is_empty(), || "transmission needs at least one edge".to_string());
    sink.check(non_negative(t.loss_per_length), || {
        format!("lossPerLength must be finite and non-negative, got {}", t.loss_per_length)
    });
    let mut pairs = BTreeSet::new();
    for e in &t.edges {
        sink.check(e.region_a != e.region_b, || format!("edge {} connects a region to itself", e.label()));
        sink.check(non_negative(e.length), || format!("edge {}: length must be non-negative", e.label()));
        let key = if e.region_a <= e.region_b {
            (e.region_a.as_str(), e.region_b.as_str())
        } else {
            (e.region_b.as_str(), e.region_a.as_str())
        };
        sink.check(pairs.insert(key), || format!("duplicate edge {}", e.label()));
    }
}
