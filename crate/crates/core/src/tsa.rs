//! Typical-period aggregation: period segmentation, PAM k-medoids and the resulting
//! typical period set.

use serde::{Deserialize, Serialize};

use crate::error::AggregationError;
use crate::model::{EnergySystemModel, SeriesAttribute};

/// Swap passes allowed by [`aggregate`].
pub const DEFAULT_MAX_ITER: usize = 1000;

/// One clustered attribute: a (component, region, attribute) series.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AttributeKey {
    pub component: String,
    pub region: String,
    pub attribute: SeriesAttribute,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSegmentation {
    pub period_length: usize,
    pub num_periods: usize,
    pub attributes: Vec<AttributeKey>,
    /// `num_periods` rows; column `a * period_length + tau` holds attribute `a` at step `tau`.
    pub profiles: Vec<Vec<f64>>,
}

/// Cuts every series into periods of `period_length` steps and min-max normalizes each
/// attribute over the whole horizon. Attributes with zero range normalize to 0.
pub fn segment(model: &EnergySystemModel, period_length: usize) -> Result<PeriodSegmentation, AggregationError> {
    if period_length == 0 {
        return Err(AggregationError::ZeroPeriod);
    }
    let steps = model.time().num_steps();
    if steps % period_length != 0 {
        return Err(AggregationError::Indivisible { steps, period: period_length });
    }
    let num_periods = steps / period_length;
    let mut attributes = Vec::new();
    let mut columns: Vec<&[f64]> = Vec::new();
    for c in model.components() {
        let mut series = c.series();
        series.sort_by_key(|(a, _)| a.as_str());
        for region in c.locations() {
            for (attr, s) in &series {
                if let Some(values) = s.get(&region) {
                    attributes.push(AttributeKey {
                        component: c.name().to_string(),
                        region: region.clone(),
                        attribute: *attr,
                    });
                    columns.push(values);
                }
            }
        }
    }
    if attributes.is_empty() {
        return Err(AggregationError::NoSeries);
    }
    let width = period_length * attributes.len();
    let mut profiles = vec![vec![0.0; width]; num_periods];
    for (a, values) in columns.iter().enumerate() {
        let lo = values.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let range = hi - lo;
        for (t, v) in values.iter().enumerate() {
            let norm = if range > 0.0 { (v - lo) / range } else { 0.0 };
            profiles[t / period_length][a * period_length + t % period_length] = norm;
        }
    }
    Ok(PeriodSegmentation { period_length, num_periods, attributes, profiles })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    /// Ascending; cluster `j` is represented by period `medoids[j]`.
    pub medoids: Vec<usize>,
    /// Cluster id of every period.
    pub assignment: Vec<usize>,
    /// Sum over periods of the squared distance to their medoid.
    pub total_distance: f64,
    /// Improving swaps performed.
    pub swaps: usize,
}

fn squared_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn total_cost(dist: &[Vec<f64>], medoids: &[usize]) -> f64 {
    (0..dist.len())
        .map(|i| medoids.iter().map(|&m| dist[m][i]).fold(f64::INFINITY, f64::min))
        .sum()
}

/// PAM k-medoids on squared Euclidean distances between rows.
///
/// BUILD picks the row with least total distance, then repeatedly the row with the largest
/// cost reduction. SWAP applies the best improving (medoid, non-medoid) exchange until none
/// is left or `max_iter` swaps were made. Ties go to the lowest index throughout. The
/// algorithm is deterministic; `seed` is accepted for interface stability and not consumed.
pub fn kmedoids(rows: &[Vec<f64>], k: usize, seed: u64, max_iter: usize) -> Result<Clustering, AggregationError> {
    let _ = seed;
    let n = rows.len();
    if k == 0 || k > n {
        return Err(AggregationError::ClusterRange { k, periods: n });
    }
    let mut dist = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = squared_distance(&rows[i], &rows[j]);
            dist[i][j] = d;
            dist[j][i] = d;
        }
    }

    let mut medoids = Vec::with_capacity(k);
    let first = (0..n)
        .map(|i| (i, dist[i].iter().sum::<f64>()))
        .fold((0, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
        .0;
    medoids.push(first);
    let mut nearest: Vec<f64> = dist[first].clone();
    while medoids.len() < k {
        let mut best = (usize::MAX, f64::NEG_INFINITY);
        for c in (0..n).filter(|c| !medoids.contains(c)) {
            let gain: f64 = (0..n).map(|j| (nearest[j] - dist[c][j]).max(0.0)).sum();
            if gain > best.1 {
                best = (c, gain);
            }
        }
        medoids.push(best.0);
        for j in 0..n {
            nearest[j] = nearest[j].min(dist[best.0][j]);
        }
    }

    let mut cost = total_cost(&dist, &medoids);
    let mut swaps = 0;
    while swaps < max_iter {
        // Nearest and second-nearest medoid distance per row, by medoid slot.
        let mut d1 = vec![(usize::MAX, f64::INFINITY); n];
        let mut d2 = vec![f64::INFINITY; n];
        for (slot, &m) in medoids.iter().enumerate() {
            for i in 0..n {
                let d = dist[m][i];
                if d < d1[i].1 {
                    d2[i] = d1[i].1;
                    d1[i] = (slot, d);
                } else if d < d2[i] {
                    d2[i] = d;
                }
            }
        }
        let mut best: Option<(usize, usize, f64)> = None;
        let mut order: Vec<usize> = (0..k).collect();
        order.sort_by_key(|&s| medoids[s]);
        for &slot in &order {
            for o in (0..n).filter(|o| !medoids.contains(o)) {
                let new_cost: f64 = (0..n)
                    .map(|i| {
                        let keep = if d1[i].0 == slot { d2[i] } else { d1[i].1 };
                        keep.min(dist[o][i])
                    })
                    .sum();
                if best.is_none_or(|b| new_cost < b.2) {
                    best = Some((slot, o, new_cost));
                }
            }
        }
        match best {
            Some((slot, o, new_cost)) if new_cost < cost - 1e-12 * cost.max(1.0) => {
                medoids[slot] = o;
                cost = new_cost;
                swaps += 1;
            }
            _ => break,
        }
    }

    medoids.sort_unstable();
    let mut assignment = vec![0; n];
    for i in 0..n {
        assignment[i] = match medoids.iter().position(|&m| m == i) {
            Some(j) => j,
            None => {
                let mut best = 0;
                for j in 1..k {
                    if dist[medoids[j]][i] < dist[medoids[best]][i] {
                        best = j;
                    }
                }
                best
            }
        };
    }
    let total_distance = (0..n).map(|i| dist[medoids[assignment[i]]][i]).sum();
    Ok(Clustering { medoids, assignment, total_distance, swaps })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TypicalSeries {
    pub component: String,
    pub region: String,
    pub attribute: SeriesAttribute,
    /// `k * periodLength` values, medoid periods in cluster order.
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub struct TypicalPeriodSet {
    pub k: usize,
    pub period_length: usize,
    pub num_periods: usize,
    pub medoid_indices: Vec<usize>,
    pub weights: Vec<u64>,
    pub ordering_map: Vec<usize>,
    pub within_cluster_distance: f64,
    pub seed: u64,
    pub typical_series: Vec<TypicalSeries>,
}

impl TypicalPeriodSet {
    /// Original step whose data typical step `s = j * P + tau` uses.
    pub fn source_step(&self, s: usize) -> usize {
        self.medoid_indices[s / self.period_length] * self.period_length + s % self.period_length
    }

    pub fn num_typical_steps(&self) -> usize {
        self.k * self.period_length
    }
}

/// Segments the model, clusters the periods and takes medoid periods verbatim as profiles.
pub fn aggregate(
    model: &EnergySystemModel,
    period_length: usize,
    k: usize,
    seed: u64,
) -> Result<TypicalPeriodSet, AggregationError> {
    aggregate_with(model, period_length, k, seed, DEFAULT_MAX_ITER)
}

pub fn aggregate_with(
    model: &EnergySystemModel,
    period_length: usize,
    k: usize,
    seed: u64,
    max_iter: usize,
) -> Result<TypicalPeriodSet, AggregationError> {
    let seg = segment(model, period_length)?;
    let cl = kmedoids(&seg.profiles, k, seed, max_iter)?;
    let mut weights = vec![0u64; k];
    for &j in &cl.assignment {
        weights[j] += 1;
    }
    let typical_series = seg
        .attributes
        .iter()
        .map(|key| {
            let comp = model.component_by_name(&key.component).expect("segmented component");
            let original = comp
                .series()
                .into_iter()
                .find(|(a, _)| *a == key.attribute)
                .and_then(|(_, s)| s.get(&key.region))
                .expect("segmented series");
            let values = cl
                .medoids
                .iter()
                .flat_map(|&m| original[m * period_length..(m + 1) * period_length].iter().copied())
                .collect();
            TypicalSeries {
                component: key.component.clone(),
                region: key.region.clone(),
                attribute: key.attribute,
                values,
            }
        })
        .collect();
    Ok(TypicalPeriodSet {
        k,
        period_length,
        num_periods: seg.num_periods,
        medoid_indices: cl.medoids,
        weights,
        ordering_map: cl.assignment,
        within_cluster_distance: cl.total_distance,
        seed,
        typical_series,
    })
}
