//! Energy system data model: the container, the five component archetypes and their
//! shared economic and capacity parameters.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::economics::HOURS_PER_YEAR;
use crate::error::ModelError;

/// Number of steps and their length. The annual scale is always derived from both.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, try_from = "RawTime")]
pub struct TimeStructure {
    num_steps: usize,
    hours_per_step: f64,
}

#[derive(Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
struct RawTime {
    num_steps: usize,
    hours_per_step: f64,
}

impl TryFrom<RawTime> for TimeStructure {
    type Error = ModelError;
    fn try_from(raw: RawTime) -> Result<Self, ModelError> {
        TimeStructure::new(raw.num_steps, raw.hours_per_step)
    }
}

impl TimeStructure {
    pub fn new(num_steps: usize, hours_per_step: f64) -> Result<Self, ModelError> {
        if num_steps < 2 {
            return Err(ModelError::InvalidTime(format!("need at least 2 steps, got {num_steps}")));
        }
        if !(hours_per_step.is_finite() && hours_per_step > 0.0) {
            return Err(ModelError::InvalidTime(format!(
                "hours per step must be positive, got {hours_per_step}"
            )));
        }
        Ok(TimeStructure { num_steps, hours_per_step })
    }

    pub fn num_steps(&self) -> usize {
        self.num_steps
    }

    pub fn hours_per_step(&self) -> f64 {
        self.hours_per_step
    }

    /// `8760 / (steps * hours per step)`.
    pub fn annual_scale(&self) -> f64 {
        HOURS_PER_YEAR / (self.num_steps as f64 * self.hours_per_step)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Commodity {
    pub label: String,
    pub unit: String,
}

/// A scalar applying to every region (or edge), or one value per region.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionValue {
    Uniform(f64),
    PerRegion(BTreeMap<String, f64>),
}

impl RegionValue {
    pub fn get(&self, location: &str) -> Option<f64> {
        match self {
            RegionValue::Uniform(v) => Some(*v),
            RegionValue::PerRegion(m) => m.get(location).copied(),
        }
    }

    pub fn values(&self) -> Vec<f64> {
        match self {
            RegionValue::Uniform(v) => vec![*v],
            RegionValue::PerRegion(m) => m.values().copied().collect(),
        }
    }

    pub fn keys(&self) -> Vec<&str> {
        match self {
            RegionValue::Uniform(_) => Vec::new(),
            RegionValue::PerRegion(m) => m.keys().map(String::as_str).collect(),
        }
    }
}

/// Per-region time series, each of length `num_steps`.
pub type RegionSeries = BTreeMap<String, Vec<f64>>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct Economics {
    pub invest_per_capacity: f64,
    /// Absolute yearly cost per installed capacity unit.
    pub opex_per_capacity: f64,
    pub opex_per_operation: f64,
    pub interest_rate: f64,
    pub economic_lifetime: u32,
    pub invest_if_built: f64,
    pub opex_if_built_per_year: f64,
}

impl Default for Economics {
    fn default() -> Self {
        Economics {
            invest_per_capacity: 0.0,
            opex_per_capacity: 0.0,
            opex_per_operation: 0.0,
            interest_rate: 0.0,
            economic_lifetime: 1,
            invest_if_built: 0.0,
            opex_if_built_per_year: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields, default)]
pub struct CapacityPolicy {
    pub has_capacity_variable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacity_min: Option<RegionValue>,
    /// Absent means unbounded.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacity_max: Option<RegionValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub capacity_fix: Option<RegionValue>,
    pub has_build_binary: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub min_capacity_if_built: Option<RegionValue>,
}

impl CapacityPolicy {
    /// A free capacity variable in every location.
    pub fn variable() -> Self {
        CapacityPolicy { has_capacity_variable: true, ..Default::default() }
    }

    /// Capacity fixed to `value` everywhere.
    pub fn fixed(value: f64) -> Self {
        CapacityPolicy {
            has_capacity_variable: true,
            capacity_fix: Some(RegionValue::Uniform(value)),
            ..Default::default()
        }
    }

    /// Whether the component carries a capacity column (free or fixed).
    pub fn has_capacity(&self) -> bool {
        self.has_capacity_variable || self.capacity_fix.is_some()
    }

    pub fn min(&self, loc: &str) -> f64 {
        self.capacity_min.as_ref().and_then(|v| v.get(loc)).unwrap_or(0.0)
    }

    pub fn max(&self, loc: &str) -> f64 {
        self.capacity_max.as_ref().and_then(|v| v.get(loc)).unwrap_or(f64::INFINITY)
    }

    pub fn fix(&self, loc: &str) -> Option<f64> {
        self.capacity_fix.as_ref().and_then(|v| v.get(loc))
    }

    pub fn min_if_built(&self, loc: &str) -> f64 {
        self.min_capacity_if_built.as_ref().and_then(|v| v.get(loc)).unwrap_or(0.0)
    }

    pub(crate) fn region_values(&self) -> impl Iterator<Item = (&'static str, &RegionValue)> {
        [
            ("capacityMin", &self.capacity_min),
            ("capacityMax", &self.capacity_max),
            ("capacityFix", &self.capacity_fix),
            ("minCapacityIfBuilt", &self.min_capacity_if_built),
        ]
        .into_iter()
        .filter_map(|(k, v)| v.as_ref().map(|v| (k, v)))
    }
}

/// Source or sink of a single commodity. Sinks enter revenue as a negative commodity cost.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct SourceSinkSpec {
    pub name: String,
    pub commodity: String,
    #[serde(default)]
    pub regions: Vec<String>,
    #[serde(default)]
    pub economics: Economics,
    #[serde(default)]
    pub capacity: CapacityPolicy,
    /// Upper bound relative to capacity, in [0, 1].
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operation_rate_max: Option<RegionSeries>,
    /// Fixed operation: absolute per step without capacity, relative to capacity otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub operation_rate_fix: Option<RegionSeries>,
    #[serde(default)]
    pub commodity_cost_per_unit: f64,
}

impl SourceSinkSpec {
    pub fn new(name: impl Into<String>, commodity: impl Into<String>) -> Self {
        SourceSinkSpec {
            name: name.into(),
            commodity: commodity.into(),
            regions: Vec::new(),
            economics: Economics::default(),
            capacity: CapacityPolicy::default(),
            operation_rate_max: None,
            operation_rate_fix: None,
            commodity_cost_per_unit: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct ConversionSpec {
    pub name: String,
    #[serde(default)]
    pub regions: Vec<String>,
    pub reference_commodity: String,
    /// Negative factors are consumed, positive produced, per unit of reference operation.
    pub conversion_factors: BTreeMap<String, f64>,
    #[serde(default)]
    pub economics: Economics,
    #[serde(default)]
    pub capacity: CapacityPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_up_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ramp_down_max: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub part_load_min: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct StorageSpec {
    pub name: String,
    #[serde(default)]
    pub regions: Vec<String>,
    pub commodity: String,
    #[serde(default)]
    pub economics: Economics,
    #[serde(default)]
    pub capacity: CapacityPolicy,
    #[serde(default = "one")]
    pub charge_efficiency: f64,
    #[serde(default = "one")]
    pub discharge_efficiency: f64,
    #[serde(default)]
    pub self_discharge_per_hour: f64,
    /// Fraction of energy capacity per hour.
    #[serde(default = "one")]
    pub charge_rate_max: f64,
    #[serde(default = "one")]
    pub discharge_rate_max: f64,
    #[serde(default)]
    pub soc_min_fraction: f64,
    #[serde(default = "yes")]
    pub cyclic: bool,
}

fn one() -> f64 {
    1.0
}

fn yes() -> bool {
    true
}

impl StorageSpec {
    pub fn new(name: impl Into<String>, commodity: impl Into<String>) -> Self {
        StorageSpec {
            name: name.into(),
            regions: Vec::new(),
            commodity: commodity.into(),
            economics: Economics::default(),
            capacity: CapacityPolicy::variable(),
            charge_efficiency: 1.0,
            discharge_efficiency: 1.0,
            self_discharge_per_hour: 0.0,
            charge_rate_max: 1.0,
            discharge_rate_max: 1.0,
            soc_min_fraction: 0.0,
            cyclic: true,
        }
    }

    /// Fraction of the state of charge retained over `hours`.
    pub fn retention(&self, hours: f64) -> f64 {
        (1.0 - self.self_discharge_per_hour).powf(hours)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Edge {
    pub region_a: String,
    pub region_b: String,
    /// Kilometres.
    pub length: f64,
}

impl Edge {
    /// Location label used for the edge's capacity.
    pub fn label(&self) -> String {
        format!("{}-{}", self.region_a, self.region_b)
    }

    pub fn forward_label(&self) -> String {
        format!("{}->{}", self.region_a, self.region_b)
    }

    pub fn backward_label(&self) -> String {
        format!("{}->{}", self.region_b, self.region_a)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct TransmissionSpec {
    pub name: String,
    pub commodity: String,
    pub edges: Vec<Edge>,
    /// `investPerCapacity` is per capacity unit and kilometre.
    #[serde(default)]
    pub economics: Economics,
    /// Keyed by edge label `A-B`.
    #[serde(default)]
    pub capacity: CapacityPolicy,
    /// Fraction lost per kilometre.
    #[serde(default)]
    pub loss_per_length: f64,
}

impl TransmissionSpec {
    /// Fraction of the sent flow lost on `edge`, clamped to at most 1.
    pub fn loss(&self, edge: &Edge) -> f64 {
        (self.loss_per_length * edge.length).min(1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "camelCase")]
pub enum Component {
    Source(SourceSinkSpec),
    Sink(SourceSinkSpec),
    Conversion(ConversionSpec),
    Storage(StorageSpec),
    Transmission(TransmissionSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ComponentKind {
    Source,
    Sink,
    Conversion,
    Storage,
    Transmission,
}

impl ComponentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ComponentKind::Source => "source",
            ComponentKind::Sink => "sink",
            ComponentKind::Conversion => "conversion",
            ComponentKind::Storage => "storage",
            ComponentKind::Transmission => "transmission",
        }
    }
}

impl Component {
    pub fn name(&self) -> &str {
        match self {
            Component::Source(s) | Component::Sink(s) => &s.name,
            Component::Conversion(c) => &c.name,
            Component::Storage(s) => &s.name,
            Component::Transmission(t) => &t.name,
        }
    }

    pub fn kind(&self) -> ComponentKind {
        match self {
            Component::Source(_) => ComponentKind::Source,
            Component::Sink(_) => ComponentKind::Sink,
            Component::Conversion(_) => ComponentKind::Conversion,
            Component::Storage(_) => ComponentKind::Storage,
            Component::Transmission(_) => ComponentKind::Transmission,
        }
    }

    pub fn economics(&self) -> &Economics {
        match self {
            Component::Source(s) | Component::Sink(s) => &s.economics,
            Component::Conversion(c) => &c.economics,
            Component::Storage(s) => &s.economics,
            Component::Transmission(t) => &t.economics,
        }
    }

    pub fn capacity(&self) -> &CapacityPolicy {
        match self {
            Component::Source(s) | Component::Sink(s) => &s.capacity,
            Component::Conversion(c) => &c.capacity,
            Component::Storage(s) => &s.capacity,
            Component::Transmission(t) => &t.capacity,
        }
    }

    /// Locations carrying a capacity: regions, or edge labels for transmission.
    pub fn locations(&self) -> Vec<String> {
        match self {
            Component::Source(s) | Component::Sink(s) => s.regions.clone(),
            Component::Conversion(c) => c.regions.clone(),
            Component::Storage(s) => s.regions.clone(),
            Component::Transmission(t) => t.edges.iter().map(Edge::label).collect(),
        }
    }

    /// Named time series of the component in a fixed attribute order.
    pub fn series(&self) -> Vec<(SeriesAttribute, &RegionSeries)> {
        match self {
            Component::Source(s) | Component::Sink(s) => {
                let mut out = Vec::new();
                if let Some(m) = &s.operation_rate_max {
                    out.push((SeriesAttribute::OperationRateMax, m));
                }
                if let Some(m) = &s.operation_rate_fix {
                    out.push((SeriesAttribute::OperationRateFix, m));
                }
                out
            }
            _ => Vec::new(),
        }
    }

    fn regions_mut(&mut self) -> Option<&mut Vec<String>> {
        match self {
            Component::Source(s) | Component::Sink(s) => Some(&mut s.regions),
            Component::Conversion(c) => Some(&mut c.regions),
            Component::Storage(s) => Some(&mut s.regions),
            Component::Transmission(_) => None,
        }
    }

    fn commodities(&self) -> Vec<&str> {
        match self {
            Component::Source(s) | Component::Sink(s) => vec![&s.commodity],
            Component::Conversion(c) => std::iter::once(c.reference_commodity.as_str())
                .chain(c.conversion_factors.keys().map(String::as_str))
                .collect(),
            Component::Storage(s) => vec![&s.commodity],
            Component::Transmission(t) => vec![&t.commodity],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum SeriesAttribute {
    OperationRateMax,
    OperationRateFix,
}

impl SeriesAttribute {
    pub fn as_str(self) -> &'static str {
        match self {
            SeriesAttribute::OperationRateMax => "operationRateMax",
            SeriesAttribute::OperationRateFix => "operationRateFix",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LimitMember {
    pub component: String,
    pub sign: f64,
}

/// Yearly cap on a signed sum of component operation. `limit = ∞` disables the row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnnualLimit {
    pub name: String,
    #[serde(serialize_with = "ser_limit", deserialize_with = "de_limit")]
    pub limit: f64,
    pub members: Vec<LimitMember>,
}

fn ser_limit<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn de_limit<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

/// Index of a component inside its model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ComponentHandle(pub usize);

/// The model container. Iteration order of every set is insertion order.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergySystemModel {
    name: String,
    regions: Vec<String>,
    commodities: Vec<Commodity>,
    time: TimeStructure,
    components: Vec<Component>,
    annual_limits: Vec<AnnualLimit>,
}

fn check_label(label: &str, what: &'static str) -> Result<(), ModelError> {
    if label.is_empty() {
        return Err(ModelError::EmptyLabel(what));
    }
    if label.chars().any(char::is_whitespace) {
        return Err(ModelError::InvalidLabel(label.to_string()));
    }
    Ok(())
}

impl EnergySystemModel {
    pub fn new(
        regions: Vec<String>,
        commodities: Vec<Commodity>,
        time: TimeStructure,
    ) -> Result<Self, ModelError> {
        if regions.is_empty() {
            return Err(ModelError::EmptySet("region"));
        }
        if commodities.is_empty() {
            return Err(ModelError::EmptySet("commodity"));
        }
        let mut seen = BTreeSet::new();
        for r in &regions {
            check_label(r, "region")?;
            if !seen.insert(r.as_str()) {
                return Err(ModelError::DuplicateRegion(r.clone()));
            }
        }
        let mut seen = BTreeSet::new();
        for c in &commodities {
            check_label(&c.label, "commodity")?;
            if !seen.insert(c.label.as_str()) {
                return Err(ModelError::DuplicateCommodity(c.label.clone()));
            }
        }
        Ok(EnergySystemModel {
            name: "model".to_string(),
            regions,
            commodities,
            time,
            components: Vec::new(),
            annual_limits: Vec::new(),
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn regions(&self) -> &[String] {
        &self.regions
    }

    pub fn commodities(&self) -> &[Commodity] {
        &self.commodities
    }

    pub fn time(&self) -> &TimeStructure {
        &self.time
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn component(&self, handle: ComponentHandle) -> &Component {
        &self.components[handle.0]
    }

    pub fn component_by_name(&self, name: &str) -> Option<&Component> {
        self.components.iter().find(|c| c.name() == name)
    }

    pub fn annual_limits(&self) -> &[AnnualLimit] {
        &self.annual_limits
    }

    pub fn has_region(&self, r: &str) -> bool {
        self.regions.iter().any(|x| x == r)
    }

    pub fn has_commodity(&self, c: &str) -> bool {
        self.commodities.iter().any(|x| x.label == c)
    }

    /// Adds a component after checking its references and series lengths.
    ///
    /// Source, sink, conversion and storage components with an empty region list are placed
    /// in every model region. Parameter ranges are checked by [`crate::validate_model`].
    pub fn add_component(&mut self, mut component: Component) -> Result<ComponentHandle, ModelError> {
        let name = component.name().to_string();
        check_label(&name, "component")?;
        if self.components.iter().any(|c| c.name() == name) {
            return Err(ModelError::DuplicateComponent(name));
        }
        for c in component.commodities() {
            if !self.has_commodity(c) {
                return Err(ModelError::UnknownCommodity { component: name, commodity: c.to_string() });
            }
        }
        let all_regions = self.regions.clone();
        if let Some(regions) = component.regions_mut() {
            if regions.is_empty() {
                *regions = all_regions;
            }
        }
        let unknown = |region: &str| ModelError::UnknownRegion {
            component: name.clone(),
            region: region.to_string(),
        };
        match &component {
            Component::Transmission(t) => {
                for e in &t.edges {
                    for r in [&e.region_a, &e.region_b] {
                        if !self.has_region(r) {
                            return Err(unknown(r));
                        }
                    }
                }
            }
            _ => {
                let regions = component.locations();
                let mut seen = BTreeSet::new();
                for r in &regions {
                    if !self.has_region(r) || !seen.insert(r.as_str()) {
                        return Err(unknown(r));
                    }
                }
                let n = self.time.num_steps();
                for (_, series) in component.series() {
                    for key in series.keys() {
                        if !seen.contains(key.as_str()) {
                            return Err(unknown(key));
                        }
                    }
                    for r in &regions {
                        let values = series.get(r).ok_or_else(|| ModelError::MissingSeries {
                            component: name.clone(),
                            region: r.clone(),
                        })?;
                        if values.len() != n {
                            return Err(ModelError::SeriesLength {
                                component: name.clone(),
                                got: values.len(),
                                expected: n,
                            });
                        }
                    }
                }
            }
        }
        self.components.push(component);
        Ok(ComponentHandle(self.components.len() - 1))
    }

    pub fn add_annual_limit(&mut self, limit: AnnualLimit) -> Result<(), ModelError> {
        check_label(&limit.name, "annual limit")?;
        if self.annual_limits.iter().any(|l| l.name == limit.name) {
            return Err(ModelError::DuplicateLimit(limit.name));
        }
        self.annual_limits.push(limit);
        Ok(())
    }

    pub fn annual_limit_mut(&mut self, name: &str) -> Option<&mut AnnualLimit> {
        self.annual_limits.iter_mut().find(|l| l.name == name)
    }

    pub fn component_mut(&mut self, name: &str) -> Option<&mut Component> {
        self.components.iter_mut().find(|c| c.name() == name)
    }
}

/// Convenience for building a model from string slices.
pub fn new_model(
    regions: &[&str],
    commodities: &[(&str, &str)],
    time: TimeStructure,
) -> Result<EnergySystemModel, ModelError> {
    EnergySystemModel::new(
        regions.iter().map(|r| r.to_string()).collect(),
        commodities
            .iter()
            .map(|(l, u)| Commodity { label: l.to_string(), unit: u.to_string() })
            .collect(),
        time,
    )
}

/// A series equal to `values` in every listed region.
pub fn uniform_series(regions: &[&str], values: Vec<f64>) -> RegionSeries {
    regions.iter().map(|r| (r.to_string(), values.clone())).collect()
}
