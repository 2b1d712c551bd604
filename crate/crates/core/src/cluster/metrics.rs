use super::ClusterAssignment;
use crate::error::{Error, Result};
use crate::instance::DistanceMatrix;

/// Number of clusters whose load exceeds `capacity`.
pub fn count_demand_errors(assign: &ClusterAssignment, demands: &[u64], capacity: u64) -> usize {
    ClusterAssignment::from_labels(assign.labels.clone(), assign.k, demands)
        .loads
        .iter()
        .filter(|&&l| l > capacity)
        .count()
}

/// Mean silhouette over assigned points. Singletons score 0, as does a point
/// with `a = b = 0`. Needs at least two nonempty clusters.
pub fn silhouette_score(labels: &[i64], dist: &DistanceMatrix) -> Result<f64> {
    if labels.len() != dist.size() {
        return Err(Error::Clustering(format!(
            "{} labels for a {}x{} matrix",
            labels.len(),
            dist.size(),
            dist.size()
        )));
    }
    let k = labels.iter().copied().max().unwrap_or(-1);
    if k < 0 {
        return Err(Error::Clustering("no assigned points".into()));
    }
    let k = k as usize + 1;
    let mut sizes = vec![0usize; k];
    for &l in labels.iter().filter(|&&l| l >= 0) {
        sizes[l as usize] += 1;
    }
    if sizes.iter().filter(|&&s| s > 0).count() < 2 {
        return Err(Error::Clustering(
            "silhouette needs at least two nonempty clusters".into(),
        ));
    }
    let mut total = 0.0;
    let mut count = 0usize;
    let mut sums = vec![0.0; k];
    for (i, &li) in labels.iter().enumerate() {
        if li < 0 {
            continue;
        }
        count += 1;
        let own = li as usize;
        if sizes[own] == 1 {
            continue;
        }
        sums.iter_mut().for_each(|s| *s = 0.0);
        for (j, &lj) in labels.iter().enumerate() {
            if lj >= 0 && j != i {
                sums[lj as usize] += dist[(i, j)];
            }
        }
        let a = sums[own] / (sizes[own] - 1) as f64;
        let b = (0..k)
            .filter(|&c| c != own && sizes[c] > 0)
            .map(|c| sums[c] / sizes[c] as f64)
            .fold(f64::INFINITY, f64::min);
        let m = a.max(b);
        if m > 0.0 {
            total += (b - a) / m;
        }
    }
    Ok(total / count as f64)
}
