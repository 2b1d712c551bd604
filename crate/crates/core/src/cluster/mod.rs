//! Capacity-aware clustering and clusterability metrics.

mod dip;
mod kmedoids;
mod metrics;
mod qubo;

pub use dip::{
    dip_bootstrap_pvalue, dip_clusterability, dip_sorted, dip_statistic, pairwise_distance_sample,
    DipResult,
};
pub use kmedoids::{kmedoids_fit, KMedoidsCost, KMedoidsFit, KMedoidsParams};
pub use metrics::{count_demand_errors, silhouette_score};
pub use qubo::{
    clustering_variable_count, qubo_cluster, qubo_clustering_build, qubo_clustering_decode,
    ClusteringMultipliers, ClusteringQubo, DecodedClusters,
};

use serde::{Deserialize, Serialize};

/// Label for customers without a cluster.
pub const UNASSIGNED: i64 = -1;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterAssignment {
    /// Cluster per customer, or [`UNASSIGNED`].
    pub labels: Vec<i64>,
    pub k: usize,
    /// Demand per cluster; unassigned customers add nothing.
    pub loads: Vec<u64>,
    pub medoids: Option<Vec<usize>>,
}

impl ClusterAssignment {
    pub fn from_labels(labels: Vec<i64>, k: usize, demands: &[u64]) -> Self {
        let mut loads = vec![0u64; k];
        for (&l, &d) in labels.iter().zip(demands) {
            if l >= 0 && (l as usize) < k {
                loads[l as usize] += d;
            }
        }
        Self {
            labels,
            k,
            loads,
            medoids: None,
        }
    }

    /// Member customer indices per cluster, ascending.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.k];
        for (i, &l) in self.labels.iter().enumerate() {
            if l >= 0 && (l as usize) < self.k {
                out[l as usize].push(i);
            }
        }
        out
    }

    pub fn unassigned(&self) -> usize {
        self.labels.iter().filter(|&&l| l < 0).count()
    }
}
