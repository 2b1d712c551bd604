//! QUBO samplers: simulated annealing, tabu search and subproblem decomposition.

mod anneal;
mod decompose;
mod sampleset;
mod tabu;

pub use anneal::{default_beta_range, simulated_annealing, AnnealParams};
pub use decompose::{
    clamp_subqubo, decompose_solve, decompose_solve_traced, DecomposeParams, Decomposition,
    InnerSampler,
};
pub use sampleset::{SampleRecord, SampleSet};
pub use tabu::{tabu_search, TabuParams};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubo::QuboCompiled;

/// Any of the samplers with its parameters, including the seed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SamplerConfig {
    Anneal(AnnealParams),
    Tabu(TabuParams),
    Decompose(DecomposeParams),
}

impl Default for SamplerConfig {
    fn default() -> Self {
        SamplerConfig::Anneal(AnnealParams::default())
    }
}

impl SamplerConfig {
    pub fn sample(&self, q: &QuboCompiled) -> Result<SampleSet> {
        match self {
            SamplerConfig::Anneal(p) => simulated_annealing(q, p),
            SamplerConfig::Tabu(p) => tabu_search(q, p),
            SamplerConfig::Decompose(p) => decompose_solve(q, p),
        }
    }

    pub fn seed(&self) -> u64 {
        match self {
            SamplerConfig::Anneal(p) => p.seed,
            SamplerConfig::Tabu(p) => p.seed,
            SamplerConfig::Decompose(p) => p.seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        match &mut self {
            SamplerConfig::Anneal(p) => p.seed = seed,
            SamplerConfig::Tabu(p) => p.seed = seed,
            SamplerConfig::Decompose(p) => p.seed = seed,
        }
        self
    }
}

/// SplitMix64 step; used to derive independent stream seeds from one master seed.
pub fn derive_seed(seed: u64, stream: u64) -> u64 {
    let mut z = seed ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub(crate) fn require_nonempty(q: &QuboCompiled) -> Result<()> {
    if q.variable_count() == 0 {
        return Err(Error::EmptyQubo);
    }
    Ok(())
}
