use serde::{Deserialize, Serialize};

use super::ClusterAssignment;
use crate::error::{Error, Result};
use crate::instance::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KMedoidsCost {
    /// Member-to-medoid distances, plus the penalty once per overloaded cluster.
    MedoidDistance,
    /// Sum over all ordered member pairs, plus `|Q - load| * P` for every
    /// nonempty cluster.
    PairwiseDeviation,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KMedoidsParams {
    pub max_iters: usize,
    pub penalty: f64,
    pub cost: KMedoidsCost,
}

impl Default for KMedoidsParams {
    fn default() -> Self {
        Self {
            max_iters: 200,
            penalty: 10_000.0,
            cost: KMedoidsCost::MedoidDistance,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMedoidsFit {
    pub assignment: ClusterAssignment,
    /// Outer passes over the swap neighbourhood, including the final pass without a swap.
    pub iterations: usize,
    pub cost: f64,
}

struct Model<'a> {
    dist: &'a DistanceMatrix,
    demands: &'a [u64],
    capacity: u64,
    params: KMedoidsParams,
}

impl Model<'_> {
    fn assign(&self, medoids: &[usize]) -> Vec<usize> {
        (0..self.dist.size())
            .map(|p| {
                let row = self.dist.row(p);
                let mut best = 0;
                for (c, &m) in medoids.iter().enumerate().skip(1) {
                    if row[m] < row[medoids[best]] {
                        best = c;
                    }
                }
                best
            })
            .collect()
    }

    fn cost(&self, medoids: &[usize], labels: &[usize]) -> f64 {
        let k = medoids.len();
        let mut loads = vec![0u64; k];
        for (p, &c) in labels.iter().enumerate() {
            loads[c] += self.demands[p];
        }
        match self.params.cost {
            KMedoidsCost::MedoidDistance => {
                let mut cost = 0.0;
                for (p, &c) in labels.iter().enumerate() {
                    cost += self.dist[(p, medoids[c])];
                }
                cost + loads.iter().filter(|&&l| l > self.capacity).count() as f64
                    * self.params.penalty
            }
            KMedoidsCost::PairwiseDeviation => {
                let mut members = vec![Vec::new(); k];
                for (p, &c) in labels.iter().enumerate() {
                    members[c].push(p);
                }
                let mut cost = 0.0;
                for (c, m) in members.iter().enumerate() {
                    if m.is_empty() {
                        continue;
                    }
                    for &a in m {
                        for &b in m {
                            cost += self.dist[(a, b)];
                        }
                    }
                    cost += (self.capacity as f64 - loads[c] as f64).abs() * self.params.penalty;
                }
                cost
            }
        }
    }
}

/// Capacity-aware PAM seeded with the `k` highest-demand customers.
///
/// Swaps are scanned medoid-major, candidate-minor and accepted as soon as
/// they lower the cost.
pub fn kmedoids_fit(
    dist: &DistanceMatrix,
    k: usize,
    demands: &[u64],
    capacity: u64,
    params: &KMedoidsParams,
) -> Result<KMedoidsFit> {
    let n = dist.size();
    if k < 1 || k > n {
        return Err(Error::Clustering(format!("k = {k} must lie in 1..={n}")));
    }
    if demands.len() != n {
        return Err(Error::Clustering(format!(
            "{} demands for {n} points",
            demands.len()
        )));
    }
    if params.penalty.is_nan() || params.penalty < 0.0 {
        return Err(Error::Clustering("penalty must be nonnegative".into()));
    }
    if params.max_iters == 0 {
        return Err(Error::Clustering("max_iters must be positive".into()));
    }
    let model = Model {
        dist,
        demands,
        capacity,
        params: *params,
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| demands[b].cmp(&demands[a]).then(a.cmp(&b)));
    let mut medoids: Vec<usize> = order[..k].to_vec();
    let mut labels = model.assign(&medoids);
    let mut cost = model.cost(&medoids, &labels);
    let mut is_medoid = vec![false; n];
    for &m in &medoids {
        is_medoid[m] = true;
    }

    let mut iterations = 0;
    loop {
        let mut swapped = false;
        for slot in 0..k {
            for cand in 0..n {
                if is_medoid[cand] {
                    continue;
                }
                let mut trial = medoids.clone();
                trial[slot] = cand;
                let trial_labels = model.assign(&trial);
                let trial_cost = model.cost(&trial, &trial_labels);
                if trial_cost < cost {
                    is_medoid[medoids[slot]] = false;
                    is_medoid[cand] = true;
                    medoids = trial;
                    labels = trial_labels;
                    cost = trial_cost;
                    swapped = true;
                }
            }
        }
        iterations += 1;
        if !swapped || iterations >= params.max_iters {
            break;
        }
    }

    let labels: Vec<i64> = labels.into_iter().map(|c| c as i64).collect();
    let mut assignment = ClusterAssignment::from_labels(labels, k, demands);
    assignment.medoids = Some(medoids);
    Ok(KMedoidsFit {
        assignment,
        iterations,
        cost,
    })
}
