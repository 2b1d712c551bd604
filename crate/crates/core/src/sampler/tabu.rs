use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{require_nonempty, SampleSet};
use crate::error::{Error, Result};
use crate::qubo::QuboCompiled;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct TabuParams {
    pub iters: usize,
    pub tenure: usize,
    pub seed: u64,
}

impl Default for TabuParams {
    fn default() -> Self {
        Self {
            iters: 2000,
            tenure: 5,
            seed: 0,
        }
    }
}

/// Steepest-descent single-flip tabu search from a random start.
///
/// Flipped variables stay tabu for `tenure` iterations unless the move beats the
/// incumbent. When every move is tabu and none aspirates, the best move overall
/// is taken so the search never stalls. Returns every incumbent along the
/// trajectory.
pub fn tabu_search(q: &QuboCompiled, params: &TabuParams) -> Result<SampleSet> {
    require_nonempty(q)?;
    if params.iters == 0 || params.tenure == 0 {
        return Err(Error::InvalidParams(
            "tabu iters and tenure must be positive".into(),
        ));
    }
    let n = q.variable_count();
    let adj = q.adjacency();
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut x: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
    let mut field: Vec<f64> = (0..n).map(|i| q.local_field(&x, i)).collect();
    let mut energy = q.energy_unchecked(&x);
    let mut best_energy = energy;
    let mut trajectory = vec![x.clone()];
    let mut tabu_until = vec![0usize; n];

    for it in 0..params.iters {
        let mut chosen: Option<(usize, f64)> = None;
        let mut fallback: Option<(usize, f64)> = None;
        for i in 0..n {
            let delta = if x[i] { -field[i] } else { field[i] };
            if fallback.is_none_or(|(_, d)| delta < d) {
                fallback = Some((i, delta));
            }
            let admissible = tabu_until[i] <= it || energy + delta < best_energy;
            if admissible && chosen.is_none_or(|(_, d)| delta < d) {
                chosen = Some((i, delta));
            }
        }
        let Some((i, delta)) = chosen.or(fallback) else {
            break;
        };
        x[i] = !x[i];
        energy += delta;
        let sign = if x[i] { 1.0 } else { -1.0 };
        for &(j, w) in &adj[i] {
            field[j] += sign * w;
        }
        tabu_until[i] = it + 1 + params.tenure;
        if energy < best_energy {
            best_energy = energy;
            trajectory.push(x.clone());
        }
    }
    Ok(SampleSet::from_samples(q, trajectory))
}
