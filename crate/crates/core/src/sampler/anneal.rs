use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{require_nonempty, SampleSet};
use crate::error::{Error, Result};
use crate::qubo::QuboCompiled;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AnnealParams {
    pub num_reads: usize,
    pub sweeps: usize,
    /// `(beta_hot, beta_cold)`; `None` picks [`default_beta_range`].
    pub beta_range: Option<(f64, f64)>,
    pub seed: u64,
}

impl Default for AnnealParams {
    fn default() -> Self {
        Self {
            num_reads: 100,
            sweeps: 1000,
            beta_range: None,
            seed: 0,
        }
    }
}

impl AnnealParams {
    pub fn new(num_reads: usize, sweeps: usize, seed: u64) -> Self {
        Self {
            num_reads,
            sweeps,
            beta_range: None,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.num_reads == 0 {
            return Err(Error::InvalidParams("num_reads must be at least 1".into()));
        }
        if self.sweeps == 0 {
            return Err(Error::InvalidParams("sweeps must be at least 1".into()));
        }
        if let Some((hot, cold)) = self.beta_range {
            if !(hot > 0.0 && hot.is_finite() && cold.is_finite() && hot <= cold) {
                return Err(Error::InvalidParams(format!(
                    "bad beta range ({hot}, {cold})"
                )));
            }
        }
        Ok(())
    }
}

/// `beta_hot = ln 2 / max_i (|h_i| + sum_j |J_ij|)`, `beta_cold = ln 100 / min |w|`
/// over nonzero coefficients.
pub fn default_beta_range(q: &QuboCompiled) -> Result<(f64, f64)> {
    require_nonempty(q)?;
    if q.is_zero() {
        return Err(Error::ZeroQubo);
    }
    let mut max_field = 0.0f64;
    let mut min_coef = f64::INFINITY;
    for (i, &h) in q.linear().iter().enumerate() {
        let total = h.abs() + q.adjacency()[i].iter().map(|&(_, w)| w.abs()).sum::<f64>();
        max_field = max_field.max(total);
        if h != 0.0 {
            min_coef = min_coef.min(h.abs());
        }
    }
    for &w in q.quadratic().values() {
        min_coef = min_coef.min(w.abs());
    }
    Ok((2f64.ln() / max_field, 100f64.ln() / min_coef))
}

pub(crate) fn beta_schedule(hot: f64, cold: f64, sweeps: usize) -> Vec<f64> {
    if sweeps == 1 {
        return vec![cold];
    }
    let ratio = cold / hot;
    (0..sweeps)
        .map(|k| hot * ratio.powf(k as f64 / (sweeps - 1) as f64))
        .collect()
}

/// One annealing read. Returns the final sample and the energy tracked by
/// incremental updates.
pub(crate) fn anneal_read(q: &QuboCompiled, betas: &[f64], seed: u64) -> (Vec<bool>, f64) {
    let n = q.variable_count();
    let adj = q.adjacency();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
    let mut field: Vec<f64> = (0..n).map(|i| q.local_field(&x, i)).collect();
    let mut energy = q.energy_unchecked(&x);
    let mut order: Vec<usize> = (0..n).collect();
    for &beta in betas {
        order.shuffle(&mut rng);
        for &i in &order {
            let delta = if x[i] { -field[i] } else { field[i] };
            let accept = delta <= 0.0 || rng.random::<f64>() < (-beta * delta).exp();
            if !accept {
                continue;
            }
            x[i] = !x[i];
            energy += delta;
            let sign = if x[i] { 1.0 } else { -1.0 };
            for &(j, w) in &adj[i] {
                field[j] += sign * w;
            }
        }
    }
    (x, energy)
}

/// Metropolis single-flip annealing with a geometric beta schedule. Read `r`
/// draws from its own stream seeded with `seed ^ r`.
pub fn simulated_annealing(q: &QuboCompiled, params: &AnnealParams) -> Result<SampleSet> {
    require_nonempty(q)?;
    params.validate()?;
    let (hot, cold) = match params.beta_range {
        Some(r) => r,
        None => default_beta_range(q)?,
    };
    let betas = beta_schedule(hot, cold, params.sweeps);
    let samples: Vec<Vec<bool>> = (0..params.num_reads as u64)
        .into_par_iter()
        .map(|r| anneal_read(q, &betas, params.seed ^ r).0)
        .collect();
    Ok(SampleSet::from_samples(q, samples))
}
