use serde::{Deserialize, Serialize};

use super::{ClusterAssignment, UNASSIGNED};
use crate::error::{Error, Result};
use crate::instance::{customer_distance_matrix, DistanceMatrix, Instance};
use crate::qubo::{BinaryPolynomial, QuboCompiled, VariableRegistry};
use crate::sampler::SamplerConfig;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ClusteringMultipliers {
    /// Weight of the one-cluster-per-customer penalty.
    pub m1: f64,
    /// Weight of the capacity penalty.
    pub m2: f64,
    /// Weight of the intra-cluster distance objective.
    pub m3: f64,
}

impl Default for ClusteringMultipliers {
    fn default() -> Self {
        Self {
            m1: 50_000.0,
            m2: 20.0,
            m3: 200.0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ClusteringQubo {
    pub registry: VariableRegistry,
    pub hamiltonian: BinaryPolynomial,
    pub num_customers: usize,
    pub k: usize,
}

impl ClusteringQubo {
    pub fn compile(&self) -> Result<QuboCompiled> {
        self.hamiltonian.compile(&self.registry)
    }

    pub fn variable_count(&self) -> usize {
        self.registry.total_count()
    }
}

fn slack_bits(capacity: u64, min_demand: u64) -> usize {
    capacity.saturating_sub(1).div_ceil(min_demand) as usize
}

/// `n * k + k * ceil((q - 1) / d_min)`.
pub fn clustering_variable_count(n: usize, k: usize, capacity: u64, min_demand: u64) -> usize {
    n * k + k * slack_bits(capacity, min_demand)
}

/// Builds `M3 * sum d_ij x_ik x_jk + M1 * sum_i (1 - sum_k x_ik)^2 + M2 * sum_k (sum_i d_i x_ik - Q + slack_k)^2`,
/// where `slack_k` is a unary slack in steps of the smallest demand.
pub fn qubo_clustering_build(
    dist: &DistanceMatrix,
    k: usize,
    demands: &[u64],
    capacity: u64,
    mult: &ClusteringMultipliers,
) -> Result<ClusteringQubo> {
    let n = dist.size();
    if k < 1 {
        return Err(Error::Clustering("k must be at least 1".into()));
    }
    if demands.len() != n {
        return Err(Error::Clustering(format!(
            "{} demands for {n} customers",
            demands.len()
        )));
    }
    let d_min = demands.iter().copied().min().unwrap_or(0);
    if d_min < 1 {
        return Err(Error::Clustering("every demand must be at least 1".into()));
    }
    let mut reg = VariableRegistry::new();
    let x0 = reg.register_binary_array("x", &[n, k])?;
    let x = |i: usize, c: usize| x0 + i * k + c;
    let bits = slack_bits(capacity, d_min);
    let mut slacks = Vec::with_capacity(k);
    for c in 0..k {
        slacks.push(if bits > 0 {
            Some(reg.add_slack_unary(
                &format!("slack_{c}"),
                (bits as u64 * d_min) as f64,
                d_min as f64,
            )?)
        } else {
            None
        });
    }

    let mut h = reg.zero();
    for c in 0..k {
        for i in 0..n {
            for j in (i + 1)..n {
                h.add_term(&[x(i, c), x(j, c)], mult.m3 * dist[(i, j)]);
            }
        }
    }
    for i in 0..n {
        let mut form = reg.constant(-1.0);
        for c in 0..k {
            form.add_term(&[x(i, c)], 1.0);
        }
        h.add_scaled(&form.square(), mult.m1)?;
    }
    for (c, slack) in slacks.iter().enumerate() {
        let mut form = reg.constant(-(capacity as f64));
        for (i, &d) in demands.iter().enumerate() {
            form.add_term(&[x(i, c)], d as f64);
        }
        if let Some(s) = slack {
            form.add_scaled(s, 1.0)?;
        }
        h.add_scaled(&form.square(), mult.m2)?;
    }
    Ok(ClusteringQubo {
        registry: reg,
        hamiltonian: h,
        num_customers: n,
        k,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DecodedClusters {
    pub assignment: ClusterAssignment,
    /// Customers with more than one cluster bit set; they keep the lowest cluster.
    pub multi_assigned: Vec<usize>,
}

/// Reads `x[i][k]` from the first `n * k` bits of a sample.
pub fn qubo_clustering_decode(
    sample: &[bool],
    n: usize,
    k: usize,
    demands: &[u64],
) -> Result<DecodedClusters> {
    if sample.len() < n * k {
        return Err(Error::SampleLength {
            expected: n * k,
            got: sample.len(),
        });
    }
    let mut labels = vec![UNASSIGNED; n];
    let mut multi = Vec::new();
    for (i, label) in labels.iter_mut().enumerate() {
        let row = &sample[i * k..(i + 1) * k];
        if let Some(c) = row.iter().position(|&b| b) {
            *label = c as i64;
        }
        if row.iter().filter(|&&b| b).count() > 1 {
            multi.push(i);
        }
    }
    Ok(DecodedClusters {
        assignment: ClusterAssignment::from_labels(labels, k, demands),
        multi_assigned: multi,
    })
}

/// Builds, samples and decodes the clustering QUBO for an instance with one
/// cluster per vehicle. Returns the decoded best sample and its energy.
pub fn qubo_cluster(
    inst: &Instance,
    mult: &ClusteringMultipliers,
    sampler: &SamplerConfig,
) -> Result<(DecodedClusters, f64)> {
    let dist = customer_distance_matrix(inst);
    let k = inst.num_vehicles();
    let model = qubo_clustering_build(&dist, k, &inst.demands, inst.capacity(), mult)?;
    let q = model.compile()?;
    let set = sampler.sample(&q)?;
    let best = set.first().ok_or(Error::EmptyQubo)?;
    let decoded = qubo_clustering_decode(&best.sample, model.num_customers, k, &inst.demands)?;
    Ok((decoded, best.energy))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::NodeOrdering;

    #[test]
    fn census_formula() {
        assert_eq!(clustering_variable_count(50, 5, 160, 3), 515);
        assert_eq!(clustering_variable_count(120, 7, 200, 2), 1540);
    }

    #[test]
    fn build_matches_census() {
        let pts: Vec<(f64, f64)> = (0..6).map(|i| (i as f64, (i * i) as f64)).collect();
        let dist = DistanceMatrix::from_points(&pts, NodeOrdering::Customers);
        let model = qubo_clustering_build(
            &dist,
            2,
            &[3, 4, 5, 3, 6, 3],
            10,
            &ClusteringMultipliers::default(),
        )
        .unwrap();
        assert_eq!(
            model.variable_count(),
            clustering_variable_count(6, 2, 10, 3)
        );
        assert!(model.hamiltonian.degree() <= 2);
    }

    #[test]
    fn single_customer_assigned() {
        let dist = DistanceMatrix::from_points(&[(0.0, 0.0)], NodeOrdering::Customers);
        let model =
            qubo_clustering_build(&dist, 1, &[2], 5, &ClusteringMultipliers::default()).unwrap();
        let q = model.compile().unwrap();
        let n = q.variable_count();
        let mut best = (f64::INFINITY, 0u32);
        for mask in 0u32..(1 << n) {
            let s: Vec<bool> = (0..n).map(|b| mask >> b & 1 == 1).collect();
            let e = q.energy(&s).unwrap();
            if e < best.0 {
                best = (e, mask);
            }
        }
        assert_eq!(best.1 & 1, 1);
    }

    #[test]
    fn decode_rules() {
        let s = [true, false, false, false, true, true];
        let d = qubo_clustering_decode(&s, 3, 2, &[1, 1, 1]).unwrap();
        assert_eq!(d.assignment.labels, vec![0, -1, 0]);
        assert_eq!(d.multi_assigned, vec![2]);
    }
}
