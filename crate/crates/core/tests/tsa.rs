mod support {
    pub mod systems;
}

use minfine_core::tsa::{aggregate, kmedoids, segment};
use minfine_core::{
    build_problem, extract_results, new_model, uniform_series, AggregationError, Component, SourceSinkSpec,
    TimeStructure, VarKind,
};
use minfine_solver::MilpOptions;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use support::systems::*;

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum()
}

/// Best total distance over every k-subset of rows as medoids.
fn exhaustive(rows: &[Vec<f64>], k: usize) -> (f64, Vec<usize>) {
    let n = rows.len();
    let mut best = (f64::INFINITY, Vec::new());
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != k {
            continue;
        }
        let med: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let cost: f64 = rows
            .iter()
            .map(|r| med.iter().map(|&m| dist(&rows[m], r)).fold(f64::INFINITY, f64::min))
            .sum();
        if cost < best.0 {
            best = (cost, med);
        }
    }
    best
}

fn random_rows(seed: u64, n: usize, width: usize) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (0..width).map(|_| rng.gen_range(0.0..1.0)).collect()).collect()
}

#[test]
fn six_points_two_clusters() {
    let rows: Vec<Vec<f64>> = [0., 0., 0., 10., 10., 10.].iter().map(|&v| vec![v]).collect();
    let c = kmedoids(&rows, 2, 0, 100).unwrap();
    let (best, _) = exhaustive(&rows, 2);
    assert_eq!(c.total_distance, best);
    assert_eq!(c.assignment, vec![0, 0, 0, 1, 1, 1]);
}

#[test]
fn single_cluster_picks_the_brute_force_medoid() {
    for seed in 0..20 {
        let rows = random_rows(seed, 9, 4);
        let c = kmedoids(&rows, 1, seed, 100).unwrap();
        let (best, med) = exhaustive(&rows, 1);
        assert_eq!(c.medoids, med, "seed {seed}");
        assert!((c.total_distance - best).abs() < 1e-12);
    }
}

fn cost(rows: &[Vec<f64>], med: &[usize]) -> f64 {
    rows.iter().map(|r| med.iter().map(|&m| dist(&rows[m], r)).fold(f64::INFINITY, f64::min)).sum()
}

#[test]
fn pam_ends_in_a_swap_local_optimum() {
    for seed in 0..30 {
        let rows = random_rows(100 + seed, 10, 3);
        for k in 2..=4 {
            let c = kmedoids(&rows, k, seed, 1000).unwrap();
            let (best, _) = exhaustive(&rows, k);
            assert!(c.total_distance >= best - 1e-12);
            assert!((cost(&rows, &c.medoids) - c.total_distance).abs() < 1e-12);
            for slot in 0..k {
                for o in (0..rows.len()).filter(|o| !c.medoids.contains(o)) {
                    let mut m = c.medoids.clone();
                    m[slot] = o;
                    assert!(cost(&rows, &m) >= c.total_distance - 1e-9, "seed {seed} k {k}");
                }
            }
        }
    }
}

#[test]
fn distance_does_not_increase_with_k() {
    let rows = random_rows(7, 40, 6);
    let mut prev = f64::INFINITY;
    for k in [1, 2, 4, 8] {
        let d = kmedoids(&rows, k, 0, 1000).unwrap().total_distance;
        assert!(d <= prev);
        prev = d;
    }
}

#[test]
fn same_seed_same_clusters() {
    let rows = random_rows(11, 30, 5);
    assert_eq!(kmedoids(&rows, 5, 3, 100).unwrap(), kmedoids(&rows, 5, 3, 100).unwrap());
}

#[test]
fn segmentation_examples() {
    let year = TimeStructure::new(8760, 1.0).unwrap();
    let mut m = new_model(&["R1"], &[("electricity", "MWh")], year).unwrap();
    let mut d = SourceSinkSpec::new("demand", "electricity");
    d.operation_rate_fix = Some(uniform_series(&["R1"], vec![3.0; 8760]));
    m.add_component(Component::Sink(d)).unwrap();
    let seg = segment(&m, 24).unwrap();
    assert_eq!(seg.profiles.len(), 365);
    assert!(seg.profiles.iter().flatten().all(|&v| v == 0.0));

    let ten = TimeStructure::new(10, 1.0).unwrap();
    let mut m = new_model(&["R1"], &[("electricity", "MWh")], ten).unwrap();
    let err = segment(&m, 3).unwrap_err();
    assert_eq!(err.to_string(), "10 not divisible by 3");
    assert_eq!(segment(&m, 5).unwrap_err(), AggregationError::NoSeries);
    let mut d = SourceSinkSpec::new("demand", "electricity");
    d.operation_rate_fix = Some(uniform_series(&["R1"], (0..10).map(f64::from).collect()));
    m.add_component(Component::Sink(d)).unwrap();
    let seg = segment(&m, 5).unwrap();
    assert!(seg.profiles.iter().flatten().all(|v| (0.0..=1.0).contains(v)));
    assert_eq!(seg.profiles[1][4], 1.0);
}

#[test]
fn aggregation_keeps_medoid_values_and_weights() {
    let m = four_days();
    for k in 1..=4 {
        let tps = aggregate(&m, 24, k, 42).unwrap();
        assert_eq!(tps.weights.iter().sum::<u64>(), 4);
        for (j, &med) in tps.medoid_indices.iter().enumerate() {
            assert_eq!(tps.ordering_map[med], j);
        }
        for ts in &tps.typical_series {
            let comp = m.component_by_name(&ts.component).unwrap();
            let (_, series) = comp.series().into_iter().find(|(a, _)| *a == ts.attribute).unwrap();
            let original = &series[&ts.region];
            for (s, v) in ts.values.iter().enumerate() {
                assert_eq!(v.to_bits(), original[tps.source_step(s)].to_bits());
            }
        }
    }
    let tps = aggregate(&m, 24, 4, 0).unwrap();
    assert_eq!(tps.ordering_map, vec![0, 1, 2, 3]);
}

#[test]
fn two_seasons_get_one_medoid_each() {
    let m = seasonal();
    let tps = aggregate(&m, 24, 2, 5).unwrap();
    let seg = segment(&m, 24).unwrap();
    let (best, _) = exhaustive(&seg.profiles, 2);
    assert_eq!(tps.within_cluster_distance, best);
    assert!(tps.medoid_indices[0] < 7 && tps.medoid_indices[1] >= 7);
}

#[test]
fn idle_storage_keeps_inter_states_equal() {
    // Flat demand leaves the storage nothing to shift, so it never charges.
    let mut m = micro();
    let mut st = minfine_core::StorageSpec::new("battery", "electricity");
    st.economics = invest(10.0, 10);
    m.add_component(Component::Storage(st)).unwrap();
    let tps = aggregate(&m, 1, 1, 0).unwrap();
    let f = build_problem(&m, Some(&tps)).unwrap();
    let s = f.solve(&MilpOptions::default()).unwrap();
    let r = extract_results(&m, &f, &s).unwrap();
    assert!(r.schedules.iter().filter(|e| e.kind == "charge").all(|e| e.value == 0.0));
    let first = r.inter_period_states[0].value;
    assert!(r.inter_period_states.iter().all(|s| s.value == first));
}

#[test]
fn self_discharge_loss_matches_net_charging() {
    let m = four_days();
    let f = build_problem(&m, None).unwrap();
    let s = f.solve(&MilpOptions::default()).unwrap();
    let st = match m.component_by_name("battery").unwrap() {
        Component::Storage(st) => st.clone(),
        _ => unreachable!(),
    };
    let val = |k| f.variables_of(k, "battery").map(|v| s.primal[v.index]).collect::<Vec<_>>();
    let (ch, dis, soc) = (val(VarKind::Charge), val(VarKind::Discharge), val(VarKind::Soc));
    let net: f64 = ch.iter().zip(&dis).map(|(c, d)| st.charge_efficiency * c - d / st.discharge_efficiency).sum();
    let loss: f64 = soc[..soc.len() - 1].iter().map(|v| v * (1.0 - st.retention(1.0))).sum();
    assert!((net - loss).abs() <= 1e-7, "{net} vs {loss}");
}
