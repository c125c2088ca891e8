//! Small energy systems shared by the integration and acceptance tests.
#![allow(dead_code)]

use minfine_core::{
    new_model, uniform_series, AnnualLimit, CapacityPolicy, Component, ConversionSpec, Economics,
    EnergySystemModel, LimitMember, SourceSinkSpec, StorageSpec, TimeStructure,
};

pub fn invest(per_capacity: f64, lifetime: u32) -> Economics {
    Economics { invest_per_capacity: per_capacity, economic_lifetime: lifetime, ..Default::default() }
}

pub fn demand(name: &str, values: Vec<f64>) -> Component {
    let mut d = SourceSinkSpec::new(name, "electricity");
    d.operation_rate_fix = Some(uniform_series(&["R1"], values));
    Component::Sink(d)
}

/// One region, two steps, demand 10 per step, one source costing 100 per capacity unit over
/// 10 years at zero interest. Optimal capacity 10, total annual cost 100.
pub fn micro() -> EnergySystemModel {
    let mut m = new_model(&["R1"], &[("electricity", "MWh")], TimeStructure::new(2, 1.0).unwrap()).unwrap();
    m.set_name("micro");
    let mut s = SourceSinkSpec::new("source", "electricity");
    s.capacity = CapacityPolicy::variable();
    s.economics = invest(100.0, 10);
    m.add_component(Component::Source(s)).unwrap();
    m.add_component(demand("demand", vec![10.0, 10.0])).unwrap();
    m
}

pub fn micro_with_storage() -> EnergySystemModel {
    let mut m = micro();
    let mut st = StorageSpec::new("battery", "electricity");
    st.economics = invest(10.0, 10);
    m.add_component(Component::Storage(st)).unwrap();
    m
}

/// Cheap source (cost 5, capacity 10) and expensive source (cost 9, capacity 100) against
/// demand alternating 5 and 15; the expensive unit is marginal in the peak steps.
pub fn two_generator_dispatch() -> EnergySystemModel {
    let mut m = new_model(&["R1"], &[("electricity", "MWh")], TimeStructure::new(4, 1.0).unwrap()).unwrap();
    m.set_name("dispatch");
    for (name, cost, cap) in [("cheap", 5.0, 10.0), ("peaker", 9.0, 100.0)] {
        let mut s = SourceSinkSpec::new(name, "electricity");
        s.capacity = CapacityPolicy::fixed(cap);
        s.commodity_cost_per_unit = cost;
        m.add_component(Component::Source(s)).unwrap();
    }
    m.add_component(demand("demand", vec![5.0, 15.0, 5.0, 15.0])).unwrap();
    m
}

/// Fourteen days of hourly steps; the only source delivers in the first week, demand is
/// constant, so a cyclic storage has to carry energy from the first week into the second.
pub fn seasonal() -> EnergySystemModel {
    let n = 336;
    let mut m = new_model(&["R1"], &[("electricity", "MWh")], TimeStructure::new(n, 1.0).unwrap()).unwrap();
    m.set_name("seasonal");
    let mut s = SourceSinkSpec::new("summer", "electricity");
    s.capacity = CapacityPolicy::variable();
    s.economics = invest(50.0, 20);
    s.commodity_cost_per_unit = 1.0;
    s.operation_rate_max = Some(uniform_series(&["R1"], (0..n).map(|t| if t < 168 { 1.0 } else { 0.0 }).collect()));
    m.add_component(Component::Source(s)).unwrap();
    m.add_component(demand("demand", vec![1.0; n])).unwrap();
    let mut st = StorageSpec::new("store", "electricity");
    st.economics = invest(5.0, 20);
    st.charge_efficiency = 0.9;
    st.discharge_efficiency = 0.9;
    m.add_component(Component::Storage(st)).unwrap();
    m
}

/// Four distinct days of hourly data with solar, a peaker and a battery.
pub fn four_days() -> EnergySystemModel {
    let (p, days) = (24, 4);
    let n = p * days;
    let mut m = new_model(&["R1"], &[("electricity", "MWh")], TimeStructure::new(n, 1.0).unwrap()).unwrap();
    m.set_name("fourdays");
    let scale = [1.0, 0.6, 0.3, 0.8];
    let solar: Vec<f64> = (0..n)
        .map(|t| {
            let h = (t % p) as f64;
            let shape = ((h - 6.0) / 12.0 * std::f64::consts::PI).sin().max(0.0);
            (shape * scale[t / p] * 1000.0).round() / 1000.0
        })
        .collect();
    let mut pv = SourceSinkSpec::new("solar", "electricity");
    pv.capacity = CapacityPolicy::variable();
    pv.economics = invest(40.0, 20);
    pv.operation_rate_max = Some(uniform_series(&["R1"], solar));
    m.add_component(Component::Source(pv)).unwrap();
    let mut peaker = SourceSinkSpec::new("peaker", "electricity");
    peaker.capacity = CapacityPolicy::variable();
    peaker.economics = invest(20.0, 20);
    peaker.commodity_cost_per_unit = 0.5;
    m.add_component(Component::Source(peaker)).unwrap();
    let load: Vec<f64> = (0..n).map(|t| 5.0 + ((t * 7 + t / p * 3) % 5) as f64).collect();
    m.add_component(demand("load", load)).unwrap();
    let mut st = StorageSpec::new("battery", "electricity");
    st.economics = invest(8.0, 15);
    st.charge_efficiency = 0.95;
    st.discharge_efficiency = 0.95;
    st.self_discharge_per_hour = 0.001;
    m.add_component(Component::Storage(st)).unwrap();
    m
}

/// Gas plant emitting CO2 into a vent against wind; the annual limit caps vented CO2.
pub fn co2_capped(limit: f64) -> EnergySystemModel {
    let n = 6;
    let commodities = [("electricity", "MWh"), ("gas", "MWh"), ("co2", "t")];
    let mut m = new_model(&["R1"], &commodities, TimeStructure::new(n, 1.0).unwrap()).unwrap();
    m.set_name("co2");
    let mut gas = SourceSinkSpec::new("gas", "gas");
    gas.commodity_cost_per_unit = 0.01;
    m.add_component(Component::Source(gas)).unwrap();
    let plant = ConversionSpec {
        name: "plant".into(),
        regions: vec![],
        reference_commodity: "electricity".into(),
        conversion_factors: [("electricity".to_string(), 1.0), ("gas".to_string(), -2.0), ("co2".to_string(), 0.4)]
            .into_iter()
            .collect(),
        economics: invest(10.0, 20),
        capacity: CapacityPolicy::variable(),
        ramp_up_max: None,
        ramp_down_max: None,
        part_load_min: None,
    };
    m.add_component(Component::Conversion(plant)).unwrap();
    let mut vent = SourceSinkSpec::new("vent", "co2");
    vent.capacity = CapacityPolicy::variable();
    m.add_component(Component::Sink(vent)).unwrap();
    let mut wind = SourceSinkSpec::new("wind", "electricity");
    wind.capacity = CapacityPolicy::variable();
    wind.economics = invest(300.0, 1);
    wind.operation_rate_max = Some(uniform_series(&["R1"], vec![0.9, 0.2, 0.5, 0.7, 0.1, 0.6]));
    m.add_component(Component::Source(wind)).unwrap();
    m.add_component(demand("demand", vec![4.0, 6.0, 5.0, 7.0, 6.0, 5.0])).unwrap();
    m.add_annual_limit(AnnualLimit {
        name: "co2cap".into(),
        limit,
        members: vec![LimitMember { component: "vent".into(), sign: 1.0 }],
    })
    .unwrap();
    m
}
