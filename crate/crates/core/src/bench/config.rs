use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cluster::{ClusteringMultipliers, KMedoidsCost, KMedoidsParams};
use crate::error::{Error, Result};
use crate::full::CvrpParams;
use crate::routing::{GlsParams, TspQuboParams};
use crate::sampler::SamplerConfig;

pub const SEED_ENV: &str = "QROUTE_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    HybridKmedoidsGls,
    HybridKmedoidsQubo,
    HybridQuboGls,
    HybridQuboQubo,
    FullQubo,
}

impl Pipeline {
    pub const ALL: [Pipeline; 5] = [
        Pipeline::HybridKmedoidsGls,
        Pipeline::HybridKmedoidsQubo,
        Pipeline::HybridQuboGls,
        Pipeline::HybridQuboQubo,
        Pipeline::FullQubo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Pipeline::HybridKmedoidsGls => "hybrid-kmedoids-gls",
            Pipeline::HybridKmedoidsQubo => "hybrid-kmedoids-qubo",
            Pipeline::HybridQuboGls => "hybrid-qubo-gls",
            Pipeline::HybridQuboQubo => "hybrid-qubo-qubo",
            Pipeline::FullQubo => "full-qubo",
        }
    }
}

impl std::str::FromStr for Pipeline {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Pipeline::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown pipeline `{s}`")))
    }
}

impl std::fmt::Display for Pipeline {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub first: Vec<f64>,
    pub second: Vec<f64>,
}

impl Grid {
    pub fn cells(&self) -> Vec<(f64, f64)> {
        self.first
            .iter()
            .flat_map(|&a| self.second.iter().map(move |&b| (a, b)))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub instances: Vec<PathBuf>,
    pub pipeline: Pipeline,
    pub sampler: SamplerConfig,
    pub kmedoids: KMedoidsParams,
    pub gls: GlsParams,
    pub clustering: ClusteringMultipliers,
    pub tsp: TspQuboParams,
    pub cvrp: CvrpParams,
    /// `(M1, M2)` values for the clustering grid.
    pub clustering_grid: Grid,
    /// `(m_A, m_B)` values for the routing grid.
    pub routing_grid: Grid,
    pub reads: Vec<usize>,
    pub output_dir: PathBuf,
    pub seed: u64,
    /// Write measured wall time; off gives byte-identical outputs across runs.
    pub record_timing: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            instances: Vec::new(),
            pipeline: Pipeline::HybridKmedoidsGls,
            sampler: SamplerConfig::default(),
            kmedoids: KMedoidsParams {
                cost: KMedoidsCost::PairwiseDeviation,
                penalty: 1.0,
                ..Default::default()
            },
            gls: GlsParams::default(),
            clustering: ClusteringMultipliers::default(),
            tsp: TspQuboParams {
                double_penalty: true,
                ..Default::default()
            },
            cvrp: CvrpParams::default(),
            clustering_grid: Grid {
                first: vec![1000.0, 5000.0, 10000.0, 50000.0, 100000.0],
                second: vec![1.0, 5.0, 10.0, 20.0, 50.0],
            },
            routing_grid: Grid {
                first: vec![50.0, 100.0, 150.0, 300.0, 500.0],
                second: vec![100.0, 300.0, 700.0, 1000.0, 2000.0],
            },
            reads: vec![10, 100, 1000, 10000],
            output_dir: PathBuf::from("out"),
            seed: 0,
            record_timing: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: &Path) -> Result<Self> {
        if !path.exists() {
            return Err(Error::Config(format!(
                "config {} does not exist",
                path.display()
            )));
        }
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Applies `QROUTE_SEED` if set.
    pub fn apply_env(&mut self) -> Result<()> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.seed = v
                .trim()
                .parse()
                .map_err(|_| Error::Config(format!("{SEED_ENV}=`{v}` is not a u64")))?;
        }
        Ok(())
    }

    /// Checks grids and that every instance file exists.
    pub fn validate(&self) -> Result<()> {
        if self.instances.is_empty() {
            return Err(Error::Config("no instances given".into()));
        }
        for p in &self.instances {
            if !p.exists() {
                return Err(Error::MissingInstance(p.clone()));
            }
        }
        for (name, g) in [
            ("clustering_grid", &self.clustering_grid),
            ("routing_grid", &self.routing_grid),
        ] {
            if g.first.is_empty() || g.second.is_empty() {
                return Err(Error::Config(format!("{name} is empty")));
            }
        }
        if self.reads.is_empty() || self.reads.contains(&0) {
            return Err(Error::Config(
                "reads must be a nonempty list of positive counts".into(),
            ));
        }
        Ok(())
    }
}
