use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cluster::ClusterAssignment;
use crate::error::{Error, Result};
use crate::instance::{cluster_distance_matrix_closed, DistanceMatrix, Instance};
use crate::solution::RoutedSolution;

const EPS: f64 = 1e-9;

/// Closed tour over a cluster matrix: `nodes` starts and ends at 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tour {
    pub nodes: Vec<usize>,
    pub length: f64,
}

impl Tour {
    /// Builds a tour from a cycle order that starts at 0 (closing 0 is appended).
    pub fn from_cycle(order: &[usize], dist: &DistanceMatrix) -> Self {
        let mut nodes = order.to_vec();
        nodes.push(order[0]);
        let length = nodes.windows(2).map(|w| dist[(w[0], w[1])]).sum();
        Self { nodes, length }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GlsParams {
    /// Number of augmented 2-opt steps.
    pub budget: usize,
    pub lambda: f64,
    /// Also try segment relocation (1 to 3 nodes) at 2-opt local optima.
    pub or_opt: bool,
}

impl Default for GlsParams {
    fn default() -> Self {
        Self {
            budget: 10_000,
            lambda: 0.3,
            or_opt: false,
        }
    }
}

/// Symmetric per-edge penalty counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Penalties {
    n: usize,
    p: Vec<u32>,
}

impl Penalties {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            p: vec![0; n * n],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.p[i * self.n + j]
    }

    pub fn increment(&mut self, i: usize, j: usize) {
        self.p[i * self.n + j] += 1;
        if i != j {
            self.p[j * self.n + i] += 1;
        }
    }
}

fn cycle_cost(order: &[usize], cost: impl Fn(usize, usize) -> f64) -> f64 {
    let n = order.len();
    (0..n).map(|i| cost(order[i], order[(i + 1) % n])).sum()
}

/// `sum d_ij + delta * sum p_ij * d_ij` over the arcs of a closed tour.
pub fn augmented_cost(tour: &[usize], dist: &DistanceMatrix, pen: &Penalties, delta: f64) -> f64 {
    tour.windows(2)
        .map(|w| {
            let d = dist[(w[0], w[1])];
            d + delta * pen.get(w[0], w[1]) as f64 * d
        })
        .sum()
}

/// One first-improvement 2-opt move on a cycle order with `order[0]` fixed.
/// Returns false at a local optimum.
pub fn two_opt_step(order: &mut [usize], cost: impl Fn(usize, usize) -> f64) -> bool {
    let n = order.len();
    if n < 4 {
        return false;
    }
    for i in 0..n - 2 {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            let (a, b) = (order[i], order[i + 1]);
            let (c, d) = (order[j], order[(j + 1) % n]);
            let delta = cost(a, c) + cost(b, d) - cost(a, b) - cost(c, d);
            if delta < -EPS {
                order[i + 1..=j].reverse();
                return true;
            }
        }
    }
    false
}

/// First-improvement relocation of a segment of 1 to 3 nodes, either direction.
pub fn or_opt_step(order: &mut Vec<usize>, cost: impl Fn(usize, usize) -> f64) -> bool {
    let n = order.len();
    if n < 5 {
        return false;
    }
    for len in 1..=3 {
        for s in 1..n - len + 1 {
            let e = s + len - 1;
            let prev = order[s - 1];
            let next = order[(e + 1) % n];
            let (first, last) = (order[s], order[e]);
            let removed = cost(prev, first) + cost(last, next) - cost(prev, next);
            for t in 0..n {
                // insert between order[t] and order[t + 1], outside the segment
                if t + 1 >= s && t <= e {
                    continue;
                }
                let (u, v) = (order[t], order[(t + 1) % n]);
                let fwd = cost(u, first) + cost(last, v) - cost(u, v);
                let rev = cost(u, last) + cost(first, v) - cost(u, v);
                let (gain, reversed) = if rev < fwd - EPS {
                    (removed - rev, true)
                } else {
                    (removed - fwd, false)
                };
                if gain > EPS {
                    let mut seg: Vec<usize> = order.drain(s..=e).collect();
                    if reversed {
                        seg.reverse();
                    }
                    let at = if t < s { t + 1 } else { t + 1 - len };
                    order.splice(at..at, seg);
                    return true;
                }
            }
        }
    }
    false
}

fn nearest_neighbour(dist: &DistanceMatrix) -> Vec<usize> {
    let n = dist.size();
    let mut seen = vec![false; n];
    let mut order = vec![0];
    seen[0] = true;
    let mut cur = 0;
    for _ in 1..n {
        let next = (0..n)
            .filter(|&v| !seen[v])
            .min_by(|&a, &b| dist[(cur, a)].total_cmp(&dist[(cur, b)]))
            .unwrap();
        seen[next] = true;
        order.push(next);
        cur = next;
    }
    order
}

fn check_square(dist: &DistanceMatrix) -> Result<()> {
    if dist.size() < 2 {
        return Err(Error::Routing(format!(
            "tour needs at least 2 nodes, got {}",
            dist.size()
        )));
    }
    Ok(())
}

/// Guided local search over a closed cluster matrix (node 0 is the depot).
pub fn gls_tsp(dist: &DistanceMatrix, params: &GlsParams) -> Result<Tour> {
    check_square(dist)?;
    if params.lambda.is_nan() || params.lambda < 0.0 {
        return Err(Error::InvalidParams("lambda must be nonnegative".into()));
    }
    let n = dist.size();
    let mut order = nearest_neighbour(dist);
    let true_cost = |a: usize, b: usize| dist[(a, b)];
    if n < 4 {
        return Ok(Tour::from_cycle(&order, dist));
    }

    let mut steps = 0;
    let local_search = |order: &mut Vec<usize>,
                        cost: &dyn Fn(usize, usize) -> f64,
                        steps: &mut usize,
                        best: &mut (Vec<usize>, f64)| {
        loop {
            if *steps >= params.budget {
                return;
            }
            *steps += 1;
            let moved = two_opt_step(order, cost) || (params.or_opt && or_opt_step(order, cost));
            let len = cycle_cost(order, true_cost);
            if len < best.1 - EPS {
                *best = (order.clone(), len);
            }
            if !moved {
                return;
            }
        }
    };

    let mut best = (order.clone(), cycle_cost(&order, true_cost));
    local_search(&mut order, &true_cost, &mut steps, &mut best);
    let delta = params.lambda * cycle_cost(&order, true_cost) / n as f64;

    let mut pen = Penalties::new(n);
    let mut aug = dist.to_rows().concat();
    while steps < params.budget {
        let utils: Vec<(usize, usize, f64)> = (0..n)
            .map(|i| {
                let (a, b) = (order[i], order[(i + 1) % n]);
                (a, b, dist[(a, b)] / (1.0 + pen.get(a, b) as f64))
            })
            .collect();
        let max_u = utils.iter().map(|u| u.2).fold(f64::NEG_INFINITY, f64::max);
        for &(a, b, u) in &utils {
            if u == max_u {
                pen.increment(a, b);
                let d = dist[(a, b)];
                aug[a * n + b] = d + delta * pen.get(a, b) as f64 * d;
                aug[b * n + a] = {
                    let d = dist[(b, a)];
                    d + delta * pen.get(b, a) as f64 * d
                };
            }
        }
        let aug_ref = &aug;
        let cost = move |a: usize, b: usize| aug_ref[a * n + b];
        local_search(&mut order, &cost, &mut steps, &mut best);
    }
    Ok(Tour::from_cycle(&best.0, dist))
}

/// Routes each nonempty cluster independently and returns a closed solution
/// in global node indices.
pub fn route_clusters(
    inst: &Instance,
    assign: &ClusterAssignment,
    params: &GlsParams,
) -> Result<RoutedSolution> {
    let clusters: Vec<Vec<usize>> = assign
        .clusters()
        .into_iter()
        .filter(|c| !c.is_empty())
        .collect();
    let paths = clusters
        .par_iter()
        .map(|members| {
            let dist = cluster_distance_matrix_closed(inst, members)?;
            let tour = gls_tsp(&dist, params)?;
            Ok(tour
                .nodes
                .iter()
                .map(|&v| if v == 0 { 0 } else { members[v - 1] + 1 })
                .collect::<Vec<usize>>())
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RoutedSolution::from_paths(inst.num_customers(), &paths))
}
