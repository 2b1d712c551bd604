use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{
    derive_seed, require_nonempty, simulated_annealing, tabu_search, AnnealParams, SampleSet,
    TabuParams,
};
use crate::error::{Error, Result};
use crate::qubo::QuboCompiled;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InnerSampler {
    Anneal { num_reads: usize, sweeps: usize },
    Tabu { iters: usize, tenure: usize },
}

impl Default for InnerSampler {
    fn default() -> Self {
        InnerSampler::Tabu {
            iters: 500,
            tenure: 5,
        }
    }
}

impl InnerSampler {
    /// Best sample of one inner solve.
    pub fn solve(&self, q: &QuboCompiled, seed: u64) -> Result<Vec<bool>> {
        let set = match *self {
            InnerSampler::Anneal { num_reads, sweeps } => {
                simulated_annealing(q, &AnnealParams::new(num_reads, sweeps, seed))?
            }
            InnerSampler::Tabu { iters, tenure } => tabu_search(
                q,
                &TabuParams {
                    iters,
                    tenure,
                    seed,
                },
            )?,
        };
        Ok(set
            .first()
            .expect("samplers return at least one record")
            .sample
            .clone())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DecomposeParams {
    pub subsize: usize,
    pub rounds: usize,
    pub inner: InnerSampler,
    pub seed: u64,
}

impl Default for DecomposeParams {
    fn default() -> Self {
        Self {
            subsize: 40,
            rounds: 20,
            inner: InnerSampler::default(),
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub samples: SampleSet,
    /// Incumbent energy before the first round and after each round.
    pub incumbent_energies: Vec<f64>,
}

/// Restricts `q` to `vars`, fixing every other variable at its value in
/// `sample`. Variable `k` of the result is `vars[k]`; energies agree with the
/// full model for any completion of the clamped assignment.
pub fn clamp_subqubo(q: &QuboCompiled, vars: &[usize], sample: &[bool]) -> Result<QuboCompiled> {
    let n = q.variable_count();
    if sample.len() != n {
        return Err(Error::SampleLength {
            expected: n,
            got: sample.len(),
        });
    }
    let mut local = vec![usize::MAX; n];
    for (k, &v) in vars.iter().enumerate() {
        if v >= n {
            return Err(Error::FlatIndexOutOfRange(v));
        }
        local[v] = k;
    }
    let free = |i: usize| local[i] != usize::MAX;
    let mut linear = vec![0.0; vars.len()];
    let mut offset = q.offset();
    for (i, &h) in q.linear().iter().enumerate() {
        if free(i) {
            linear[local[i]] += h;
        } else if sample[i] {
            offset += h;
        }
    }
    let mut quad = BTreeMap::new();
    for (&(i, j), &w) in q.quadratic() {
        match (free(i), free(j)) {
            (true, true) => {
                let (a, b) = (local[i].min(local[j]), local[i].max(local[j]));
                quad.insert((a, b), w);
            }
            (true, false) => {
                if sample[j] {
                    linear[local[i]] += w;
                }
            }
            (false, true) => {
                if sample[i] {
                    linear[local[j]] += w;
                }
            }
            (false, false) => {
                if sample[i] && sample[j] {
                    offset += w;
                }
            }
        }
    }
    QuboCompiled::from_terms(vars.len(), &linear, quad, offset)
}

/// QBSolv-style loop: repeatedly re-optimise the `subsize` variables with the
/// largest local-field magnitude under the incumbent, keeping the result when
/// the energy does not increase.
pub fn decompose_solve(q: &QuboCompiled, params: &DecomposeParams) -> Result<SampleSet> {
    Ok(decompose_solve_traced(q, params)?.samples)
}

pub fn decompose_solve_traced(q: &QuboCompiled, params: &DecomposeParams) -> Result<Decomposition> {
    require_nonempty(q)?;
    let n = q.variable_count();
    if params.subsize == 0 {
        return Err(Error::InvalidParams("subsize must be at least 1".into()));
    }
    if params.subsize > n {
        return Err(Error::InvalidParams(format!(
            "subsize {} exceeds {n} variables",
            params.subsize
        )));
    }
    if params.rounds == 0 {
        return Err(Error::InvalidParams("rounds must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut incumbent: Vec<bool> = (0..n).map(|_| rng.random::<bool>()).collect();
    let mut energy = q.energy_unchecked(&incumbent);
    let mut trajectory = vec![incumbent.clone()];
    let mut energies = vec![energy];

    for round in 0..params.rounds {
        let mut impact: Vec<(f64, usize)> = (0..n)
            .map(|i| (q.local_field(&incumbent, i).abs(), i))
            .collect();
        impact.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let mut vars: Vec<usize> = impact[..params.subsize].iter().map(|&(_, i)| i).collect();
        vars.sort_unstable();
        let sub = clamp_subqubo(q, &vars, &incumbent)?;
        if !sub.is_zero() {
            let sub_best = params
                .inner
                .solve(&sub, derive_seed(params.seed, round as u64))?;
            let mut candidate = incumbent.clone();
            for (k, &v) in vars.iter().enumerate() {
                candidate[v] = sub_best[k];
            }
            let e = q.energy_unchecked(&candidate);
            if e <= energy {
                incumbent = candidate;
                energy = e;
            }
        }
        trajectory.push(incumbent.clone());
        energies.push(energy);
    }
    Ok(Decomposition {
        samples: SampleSet::from_samples(q, trajectory),
        incumbent_energies: energies,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn random_qubo(n: usize, seed: u64) -> QuboCompiled {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let lin: Vec<f64> = (0..n).map(|_| rng.random_range(-10..=10) as f64).collect();
        let mut quad = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.random::<f64>() < 0.3 {
                    quad.push(((i, j), rng.random_range(-10..=10) as f64));
                }
            }
        }
        QuboCompiled::from_terms(n, &lin, quad, 0.0).unwrap()
    }

    #[test]
    fn clamp_preserves_energy() {
        let q = random_qubo(20, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let base: Vec<bool> = (0..20).map(|_| rng.random()).collect();
        let vars = vec![1, 4, 5, 11, 19];
        let sub = clamp_subqubo(&q, &vars, &base).unwrap();
        for mask in 0u32..32 {
            let s: Vec<bool> = (0..5).map(|b| mask >> b & 1 == 1).collect();
            let mut full = base.clone();
            for (k, &v) in vars.iter().enumerate() {
                full[v] = s[k];
            }
            assert_eq!(sub.energy(&s).unwrap(), q.energy(&full).unwrap());
        }
    }

    #[test]
    fn monotone_incumbent() {
        let q = random_qubo(40, 5);
        let params = DecomposeParams {
            subsize: 15,
            rounds: 20,
            inner: InnerSampler::Anneal {
                num_reads: 10,
                sweeps: 100,
            },
            seed: 11,
        };
        let d = decompose_solve_traced(&q, &params).unwrap();
        assert!(d.incumbent_energies.windows(2).all(|w| w[1] <= w[0]));
        assert_eq!(
            d.samples.first().unwrap().energy,
            *d.incumbent_energies.last().unwrap()
        );
    }

    #[test]
    fn bad_subsize() {
        let q = random_qubo(5, 0);
        let mut p = DecomposeParams {
            subsize: 0,
            ..Default::default()
        };
        assert!(decompose_solve(&q, &p).is_err());
        p.subsize = 6;
        assert!(decompose_solve(&q, &p).is_err());
    }
}
