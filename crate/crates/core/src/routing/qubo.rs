use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::ClusterAssignment;
use crate::error::{Error, Result};
use crate::instance::{cluster_distance_matrix_closed, DistanceMatrix, Instance};
use crate::qubo::{BinaryPolynomial, QuboCompiled, VariableRegistry};
use crate::sampler::{derive_seed, SamplerConfig};
use crate::solution::RoutedSolution;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TspQuboParams {
    /// Weight of the Hamiltonian-cycle constraints.
    pub m_a: f64,
    /// Weight of the tour length.
    pub m_b: f64,
    /// Charge the arc from the last position back to the depot.
    pub closing_arc: bool,
    /// Apply `m_a` twice to the cycle constraints, as the reference script did.
    pub double_penalty: bool,
}

impl Default for TspQuboParams {
    fn default() -> Self {
        Self {
            m_a: 150.0,
            m_b: 700.0,
            closing_arc: true,
            double_penalty: false,
        }
    }
}

#[derive(Debug, Clone)]
pub struct TspQubo {
    pub registry: VariableRegistry,
    pub hamiltonian: BinaryPolynomial,
    /// Customers in the cluster; the model has `(n + 1)^2` variables.
    pub n: usize,
}

impl TspQubo {
    pub fn compile(&self) -> Result<QuboCompiled> {
        self.hamiltonian.compile(&self.registry)
    }

    pub fn variable_count(&self) -> usize {
        self.registry.total_count()
    }
}

/// `x[j][v]`: node `v` sits at position `j`.
pub fn tsp_index(n: usize, position: usize, node: usize) -> usize {
    position * (n + 1) + node
}

/// `H = m_A (C1 + C2 + C3) + m_B H_B` over a closed cluster matrix.
pub fn tsp_qubo_build(dist: &DistanceMatrix, params: &TspQuboParams) -> Result<TspQubo> {
    let size = dist.size();
    if size < 2 {
        return Err(Error::Routing(
            "tsp model needs at least one customer".into(),
        ));
    }
    if !(params.m_a > 0.0 && params.m_b > 0.0) {
        return Err(Error::InvalidParams(format!(
            "multipliers must be positive, got m_A={} m_B={}",
            params.m_a, params.m_b
        )));
    }
    let n = size - 1;
    let mut reg = VariableRegistry::new();
    let x0 = reg.register_binary_array("x", &[size, size])?;
    let x = |j: usize, v: usize| x0 + tsp_index(n, j, v);

    let mut h_a = reg.zero();
    for v in 0..size {
        let mut c = reg.constant(1.0);
        for j in 0..size {
            c.add_term(&[x(j, v)], -1.0);
        }
        h_a.add_scaled(&c.square(), 1.0)?;
    }
    for j in 0..size {
        let mut c = reg.constant(1.0);
        for v in 0..size {
            c.add_term(&[x(j, v)], -1.0);
        }
        h_a.add_scaled(&c.square(), 1.0)?;
    }
    let mut c3 = reg.constant(1.0);
    c3.add_term(&[x(0, 0)], -1.0);
    h_a.add_scaled(&c3.square(), 1.0)?;

    let mut h_b = reg.zero();
    for h in 0..size {
        for i in 0..size {
            if h == i {
                continue;
            }
            let d = dist[(h, i)];
            for j in 0..n {
                h_b.add_term(&[x(j, h), x(j + 1, i)], d);
            }
        }
    }
    if params.closing_arc {
        for h in 1..size {
            h_b.add_term(&[x(n, h)], dist[(h, 0)]);
        }
    }

    let a = if params.double_penalty {
        params.m_a * params.m_a
    } else {
        params.m_a
    };
    let mut hamiltonian = h_a.scaled(a);
    hamiltonian.add_scaled(&h_b, params.m_b)?;
    Ok(TspQubo {
        registry: reg,
        hamiltonian,
        n,
    })
}

/// One-hot position matrix for a local cycle order (`order[0]` should be 0).
pub fn tsp_encode(order: &[usize]) -> Vec<bool> {
    let n = order.len() - 1;
    let mut s = vec![false; order.len() * order.len()];
    for (j, &v) in order.iter().enumerate() {
        s[tsp_index(n, j, v)] = true;
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TspDecoded {
    /// Local node per position; does not repeat the closing depot.
    pub local: Vec<usize>,
    /// Global node path closed with the depot.
    pub path: Vec<usize>,
    pub arcs: Vec<(usize, usize)>,
}

impl TspDecoded {
    /// Positions hold a permutation of the cluster nodes with the depot first.
    pub fn is_valid_cycle(&self) -> bool {
        let mut seen = vec![false; self.local.len()];
        for &v in &self.local {
            if seen[v] {
                return false;
            }
            seen[v] = true;
        }
        self.local.first() == Some(&0)
    }
}

pub fn tsp_qubo_decode(sample: &[bool], n: usize, cluster: &[usize]) -> Result<TspDecoded> {
    let size = n + 1;
    if sample.len() < size * size {
        return Err(Error::SampleLength {
            expected: size * size,
            got: sample.len(),
        });
    }
    if cluster.len() != n {
        return Err(Error::Routing(format!(
            "cluster has {} members but the model has {n} customers",
            cluster.len()
        )));
    }
    let mut local = Vec::with_capacity(size);
    let mut bad = Vec::new();
    for j in 0..size {
        let row = &sample[j * size..(j + 1) * size];
        let set: Vec<usize> = (0..size).filter(|&v| row[v]).collect();
        if set.len() == 1 {
            local.push(set[0]);
        } else {
            bad.push(j);
        }
    }
    if !bad.is_empty() {
        return Err(Error::InvalidTspSample { positions: bad });
    }
    let mut path: Vec<usize> = local
        .iter()
        .map(|&v| if v == 0 { 0 } else { cluster[v - 1] + 1 })
        .collect();
    path.push(0);
    let arcs = path.windows(2).map(|w| (w[0], w[1])).collect();
    Ok(TspDecoded { local, path, arcs })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuboRouting {
    pub solution: RoutedSolution,
    /// Clusters whose best sample is not a valid depot-anchored cycle.
    pub errors: usize,
    /// Best energy per nonempty cluster.
    pub energies: Vec<f64>,
}

/// Builds and samples one tour model per nonempty cluster. Cluster `c` is
/// sampled with seed `derive_seed(seed, c)`. Invalid samples emit no route.
pub fn qubo_route_clusters(
    inst: &Instance,
    assign: &ClusterAssignment,
    sampler: &SamplerConfig,
    params: &TspQuboParams,
) -> Result<QuboRouting> {
    let clusters: Vec<(usize, Vec<usize>)> = assign
        .clusters()
        .into_iter()
        .enumerate()
        .filter(|(_, c)| !c.is_empty())
        .collect();
    let results = clusters
        .par_iter()
        .map(|(c, members)| {
            let dist = cluster_distance_matrix_closed(inst, members)?;
            let model = tsp_qubo_build(&dist, params)?;
            let q = model.compile()?;
            let set = sampler
                .with_seed(derive_seed(sampler.seed(), *c as u64))
                .sample(&q)?;
            let best = set.first().ok_or(Error::EmptyQubo)?;
            let decoded = match tsp_qubo_decode(&best.sample, model.n, members) {
                Ok(d) if d.is_valid_cycle() => Some(d.path),
                Ok(_) | Err(Error::InvalidTspSample { .. }) => None,
                Err(e) => return Err(e),
            };
            Ok((decoded, best.energy))
        })
        .collect::<Result<Vec<_>>>()?;
    let errors = results.iter().filter(|r| r.0.is_none()).count();
    let energies = results.iter().map(|r| r.1).collect();
    let paths: Vec<Vec<usize>> = results.into_iter().filter_map(|r| r.0).collect();
    Ok(QuboRouting {
        solution: RoutedSolution::from_paths(inst.num_customers(), &paths),
        errors,
        energies,
    })
}
