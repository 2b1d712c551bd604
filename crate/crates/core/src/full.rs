//! Single QUBO over arcs x vehicles with capacity and sub-tour slack.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::instance::{
    cluster_distance_matrix_open, full_distance_matrix, Instance, FORBIDDEN_ARC,
};
use crate::qubo::{
    binary_slack_weights, ArrayKind, BinaryPolynomial, QuboCompiled, VariableRegistry,
};
use crate::sampler::SamplerConfig;
use crate::solution::{DepotConvention, RoutedSolution};
use crate::validate::{check_solution, total_distance, ViolationReport};

pub const DEFAULT_SUBSET_LIMIT: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SlackEncoding {
    /// Bits weighted `1, 2, ..., Q - 1`.
    Unary,
    /// Bits weighted `1, 2, 4, ...` covering `0..=Q`.
    Binary,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CvrpMultipliers {
    pub cost: f64,
    /// Weights of C1 to C6.
    pub m: [f64; 6],
}

impl CvrpMultipliers {
    /// `cost = 1` and every constraint weight `10 * max distance * |C|`.
    pub fn for_instance(inst: &Instance) -> Self {
        let d = full_distance_matrix(inst).max_finite();
        let m = 10.0 * d * inst.num_customers().max(1) as f64;
        Self {
            cost: 1.0,
            m: [m; 6],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CvrpParams {
    /// `None` picks [`CvrpMultipliers::for_instance`].
    pub multipliers: Option<CvrpMultipliers>,
    pub subset_limit: usize,
    pub capacity_slack: SlackEncoding,
    /// Cost of arcs into the start depot, out of the end depot and of zero length.
    pub forbidden_cost: f64,
}

impl Default for CvrpParams {
    fn default() -> Self {
        Self {
            multipliers: None,
            subset_limit: DEFAULT_SUBSET_LIMIT,
            capacity_slack: SlackEncoding::Unary,
            forbidden_cost: FORBIDDEN_ARC,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VariableCensus {
    pub decision: usize,
    pub capacity_slack: usize,
    pub subtour_slack: usize,
    pub total: usize,
}

fn binomial(n: usize, k: usize) -> usize {
    (0..k).fold(1usize, |acc, i| acc * (n - i) / (i + 1))
}

/// Variable counts with unary capacity slack.
pub fn variable_census(customers: usize, vehicles: usize, capacity: u64) -> VariableCensus {
    let n = customers + 2;
    let decision = n * n * vehicles;
    let capacity_slack = vehicles * capacity.saturating_sub(1) as usize;
    let subtour_slack = (2..=customers)
        .map(|s| binomial(customers, s) * (s - 1))
        .sum();
    VariableCensus {
        decision,
        capacity_slack,
        subtour_slack,
        total: decision + capacity_slack + subtour_slack,
    }
}

/// Customer subsets (1-based node ids) of size at least 2, in bitmask order.
pub fn customer_subsets(customers: usize) -> impl Iterator<Item = Vec<usize>> {
    (0u64..1 << customers)
        .filter(|m| m.count_ones() >= 2)
        .map(move |m| {
            (0..customers)
                .filter(|i| m >> i & 1 == 1)
                .map(|i| i + 1)
                .collect()
        })
}

#[derive(Debug, Clone)]
pub struct CvrpQubo {
    pub registry: VariableRegistry,
    pub hamiltonian: BinaryPolynomial,
    pub num_customers: usize,
    pub num_vehicles: usize,
    pub multipliers: CvrpMultipliers,
    pub census: VariableCensus,
    cost: Vec<f64>,
    capacities: Vec<u64>,
    demands: Vec<u64>,
    capacity_weights: Vec<Vec<f64>>,
    subsets: Vec<Vec<usize>>,
}

/// `((i * N) + j) * K + k` with `N = |C| + 2`.
pub fn arc_index(customers: usize, vehicles: usize, i: usize, j: usize, k: usize) -> usize {
    ((i * (customers + 2)) + j) * vehicles + k
}

fn slack_weights(upper: u64, encoding: SlackEncoding) -> Vec<f64> {
    match encoding {
        SlackEncoding::Unary => (1..=upper.saturating_sub(1)).map(|w| w as f64).collect(),
        SlackEncoding::Binary => binary_slack_weights(upper)
            .into_iter()
            .map(|w| w as f64)
            .collect(),
    }
}

fn register_slack(
    reg: &mut VariableRegistry,
    name: &str,
    weights: &[f64],
) -> Result<BinaryPolynomial> {
    if weights.is_empty() {
        return Ok(reg.zero());
    }
    let offset = reg.register(name, &[weights.len()], ArrayKind::Slack)?;
    let mut form = reg.zero();
    for (l, &w) in weights.iter().enumerate() {
        form.add_term(&[offset + l], w);
    }
    Ok(form)
}

pub fn cvrp_qubo_build(inst: &Instance, params: &CvrpParams) -> Result<CvrpQubo> {
    let c = inst.num_customers();
    if c > params.subset_limit {
        return Err(Error::SubsetLimit {
            customers: c,
            limit: params.subset_limit,
        });
    }
    let mult = params
        .multipliers
        .unwrap_or_else(|| CvrpMultipliers::for_instance(inst));
    if mult.cost < 0.0 || mult.m.iter().any(|&m| m.is_nan() || m < 0.0) {
        return Err(Error::InvalidParams(
            "multipliers must be nonnegative".into(),
        ));
    }
    let kv = inst.num_vehicles();
    let n = c + 2;
    let members: Vec<usize> = (0..c).collect();
    let dist = cluster_distance_matrix_open(inst, &members)?;
    let mut cost = dist.to_rows().concat();
    for w in &mut cost {
        if *w >= FORBIDDEN_ARC {
            *w = params.forbidden_cost;
        }
    }

    let mut reg = VariableRegistry::new();
    let x0 = reg.register_binary_array("x", &[n, n, kv])?;
    let x = |i: usize, j: usize, k: usize| x0 + arc_index(c, kv, i, j, k);

    let mut h = reg.zero();
    for k in 0..kv {
        for i in 0..n {
            for j in 0..n {
                h.add_term(&[x(i, j, k)], mult.cost * cost[i * n + j]);
            }
        }
    }

    let mut c1 = reg.zero();
    for i in 1..=c {
        let mut t = reg.constant(1.0);
        for k in 0..kv {
            for j in (0..n).filter(|&j| j != i) {
                t.add_term(&[x(i, j, k)], -1.0);
            }
        }
        c1.add_scaled(&t.square(), 1.0)?;
    }
    let mut c2 = reg.zero();
    let mut c3 = reg.zero();
    for k in 0..kv {
        let mut t2 = reg.constant(1.0);
        let mut t3 = reg.constant(1.0);
        for j in 0..n {
            t2.add_term(&[x(0, j, k)], -1.0);
            t3.add_term(&[x(j, c + 1, k)], -1.0);
        }
        c2.add_scaled(&t2.square(), 1.0)?;
        c3.add_scaled(&t3.square(), 1.0)?;
    }
    let mut c4 = reg.zero();
    for hh in 1..=c {
        for k in 0..kv {
            let mut t = reg.zero();
            for i in (0..n).filter(|&i| i != hh) {
                t.add_term(&[x(i, hh, k)], 1.0);
                t.add_term(&[x(hh, i, k)], -1.0);
            }
            c4.add_scaled(&t.square(), 1.0)?;
        }
    }

    let mut c5 = reg.zero();
    let mut capacity_weights = Vec::with_capacity(kv);
    for k in 0..kv {
        let q = inst.capacities[k];
        let weights = slack_weights(q, params.capacity_slack);
        let slack = register_slack(&mut reg, &format!("capacity_slack_{k}"), &weights)?;
        capacity_weights.push(weights);
        let mut t = reg.constant(-(q as f64));
        for i in 1..=c {
            for j in (1..=c).filter(|&j| j != i) {
                t.add_term(&[x(i, j, k)], inst.demands[i - 1] as f64);
            }
        }
        t.add_scaled(&slack, 1.0)?;
        c5.add_scaled(&t.square(), 1.0)?;
    }

    let mut c6 = reg.zero();
    let subsets: Vec<Vec<usize>> = customer_subsets(c).collect();
    for (e, s) in subsets.iter().enumerate() {
        let bound = s.len() as u64 - 1;
        let weights = slack_weights(bound + 1, SlackEncoding::Unary);
        let slack = register_slack(&mut reg, &format!("subtour_slack_{e}"), &weights)?;
        let mut t = reg.constant(-(bound as f64));
        for k in 0..kv {
            for &i in s {
                for &j in s.iter().filter(|&&j| j != i) {
                    t.add_term(&[x(i, j, k)], 1.0);
                }
            }
        }
        t.add_scaled(&slack, 1.0)?;
        c6.add_scaled(&t.square(), 1.0)?;
    }

    for (poly, m) in [&c1, &c2, &c3, &c4, &c5, &c6].into_iter().zip(mult.m) {
        h.add_scaled(poly, m)?;
    }
    let decision = n * n * kv;
    let capacity_slack: usize = capacity_weights.iter().map(Vec::len).sum();
    let subtour_slack: usize = subsets.iter().map(|s| s.len() - 1).sum();
    Ok(CvrpQubo {
        hamiltonian: h,
        census: VariableCensus {
            decision,
            capacity_slack,
            subtour_slack,
            total: reg.total_count(),
        },
        registry: reg,
        num_customers: c,
        num_vehicles: kv,
        multipliers: mult,
        cost,
        capacities: inst.capacities.clone(),
        demands: inst.demands.clone(),
        capacity_weights,
        subsets,
    })
}

impl CvrpQubo {
    pub fn compile(&self) -> Result<QuboCompiled> {
        self.hamiltonian.compile(&self.registry)
    }

    pub fn variable_count(&self) -> usize {
        self.registry.total_count()
    }

    fn slack_offset(&self, name: &str) -> Option<usize> {
        self.registry.entry(name).map(|e| e.offset)
    }

    fn slack_value(&self, sample: &[bool], name: &str, weights: &[f64]) -> f64 {
        match self.slack_offset(name) {
            Some(off) => weights
                .iter()
                .enumerate()
                .filter(|&(l, _)| sample[off + l])
                .map(|(_, w)| w)
                .sum(),
            None => 0.0,
        }
    }

    /// Penalty values `C1..C6` and the weighted arc cost of a full sample,
    /// computed by counting arcs rather than through the polynomial.
    pub fn residuals(&self, sample: &[bool]) -> Result<([f64; 6], f64)> {
        if sample.len() != self.variable_count() {
            return Err(Error::SampleLength {
                expected: self.variable_count(),
                got: sample.len(),
            });
        }
        let (c, kv) = (self.num_customers, self.num_vehicles);
        let n = c + 2;
        let on = |i: usize, j: usize, k: usize| sample[arc_index(c, kv, i, j, k)];
        let count = |f: &dyn Fn(usize, usize, usize) -> bool| {
            let mut t = 0.0;
            for k in 0..kv {
                for i in 0..n {
                    for j in 0..n {
                        if on(i, j, k) && f(i, j, k) {
                            t += 1.0;
                        }
                    }
                }
            }
            t
        };
        let sq = |v: f64| v * v;
        let mut r = [0.0; 6];
        let mut arc_cost = 0.0;
        for k in 0..kv {
            for i in 0..n {
                for j in 0..n {
                    if on(i, j, k) {
                        arc_cost += self.cost[i * n + j];
                    }
                }
            }
        }
        for i in 1..=c {
            r[0] += sq(1.0 - count(&|a, b, _| a == i && b != i));
        }
        for k in 0..kv {
            r[1] += sq(1.0 - count(&|a, _, kk| a == 0 && kk == k));
            r[2] += sq(1.0 - count(&|_, b, kk| b == c + 1 && kk == k));
            for h in 1..=c {
                let inflow = count(&|a, b, kk| b == h && a != h && kk == k);
                let outflow = count(&|a, b, kk| a == h && b != h && kk == k);
                r[3] += sq(inflow - outflow);
            }
            let mut load = -(self.capacities[k] as f64);
            for i in 1..=c {
                for j in (1..=c).filter(|&j| j != i) {
                    if on(i, j, k) {
                        load += self.demands[i - 1] as f64;
                    }
                }
            }
            load += self.slack_value(
                sample,
                &format!("capacity_slack_{k}"),
                &self.capacity_weights[k],
            );
            r[4] += sq(load);
        }
        for (e, s) in self.subsets.iter().enumerate() {
            let inside = count(&|a, b, _| a != b && s.contains(&a) && s.contains(&b));
            let weights: Vec<f64> = (1..s.len()).map(|w| w as f64).collect();
            let slack = self.slack_value(sample, &format!("subtour_slack_{e}"), &weights);
            r[5] += sq(inside - (s.len() - 1) as f64 + slack);
        }
        Ok((r, arc_cost))
    }

    /// Sets the arcs of `sol` and picks each slack so its constraint residual
    /// is as small as the slack range allows.
    pub fn certifying_sample(&self, sol: &RoutedSolution) -> Result<Vec<bool>> {
        let (c, kv) = (self.num_customers, self.num_vehicles);
        let n = c + 2;
        let mut s = vec![false; self.variable_count()];
        for (k, route) in sol.routes.iter().enumerate().take(kv) {
            for &(i, j) in route {
                if i >= n || j >= n {
                    return Err(Error::FlatIndexOutOfRange(i.max(j)));
                }
                s[arc_index(c, kv, i, j, k)] = true;
            }
        }
        let on = |s: &[bool], i: usize, j: usize, k: usize| s[arc_index(c, kv, i, j, k)];
        for k in 0..kv {
            let mut load = 0.0;
            for i in 1..=c {
                for j in (1..=c).filter(|&j| j != i) {
                    if on(&s, i, j, k) {
                        load += self.demands[i - 1] as f64;
                    }
                }
            }
            let target = self.capacities[k] as f64 - load;
            if let Some(off) = self.slack_offset(&format!("capacity_slack_{k}")) {
                for (l, on_bit) in fit_slack(&self.capacity_weights[k], target)
                    .into_iter()
                    .enumerate()
                {
                    s[off + l] = on_bit;
                }
            }
        }
        for (e, set) in self.subsets.iter().enumerate() {
            let mut inside = 0.0;
            for k in 0..kv {
                for &i in set {
                    for &j in set.iter().filter(|&&j| j != i) {
                        if on(&s, i, j, k) {
                            inside += 1.0;
                        }
                    }
                }
            }
            let target = (set.len() - 1) as f64 - inside;
            let weights: Vec<f64> = (1..set.len()).map(|w| w as f64).collect();
            if let Some(off) = self.slack_offset(&format!("subtour_slack_{e}")) {
                for (l, on_bit) in fit_slack(&weights, target).into_iter().enumerate() {
                    s[off + l] = on_bit;
                }
            }
        }
        Ok(s)
    }
}

/// Greedy bit choice reaching `target` as closely as the weights allow. Exact
/// for `1..m` weights and for bounded binary weights.
fn fit_slack(weights: &[f64], target: f64) -> Vec<bool> {
    let mut bits = vec![false; weights.len()];
    let mut rest = target.max(0.0);
    let mut idx: Vec<usize> = (0..weights.len()).collect();
    idx.sort_by(|&a, &b| weights[b].total_cmp(&weights[a]));
    for i in idx {
        if weights[i] <= rest + 1e-9 {
            bits[i] = true;
            rest -= weights[i];
        }
    }
    bits
}

/// Per-vehicle arc lists of every set decision bit; slack bits are ignored.
pub fn cvrp_qubo_decode(
    sample: &[bool],
    customers: usize,
    vehicles: usize,
) -> Result<RoutedSolution> {
    let n = customers + 2;
    let need = n * n * vehicles;
    if sample.len() < need {
        return Err(Error::SampleLength {
            expected: need,
            got: sample.len(),
        });
    }
    let mut sol = RoutedSolution::new(customers, DepotConvention::Open);
    sol.routes = vec![Vec::new(); vehicles];
    for i in 0..n {
        for j in 0..n {
            for k in 0..vehicles {
                if sample[arc_index(customers, vehicles, i, j, k)] {
                    sol.routes[k].push((i, j));
                }
            }
        }
    }
    Ok(sol)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FullSolve {
    pub solution: RoutedSolution,
    pub energy: f64,
    pub distance: f64,
    pub violations: ViolationReport,
}

pub fn solve_full(
    inst: &Instance,
    sampler: &SamplerConfig,
    params: &CvrpParams,
) -> Result<FullSolve> {
    let model = cvrp_qubo_build(inst, params)?;
    let q = model.compile()?;
    let set = sampler.sample(&q)?;
    let best = set.first().ok_or(Error::EmptyQubo)?;
    let solution = cvrp_qubo_decode(&best.sample, model.num_customers, model.num_vehicles)?;
    let violations = check_solution(&solution, inst);
    let distance = total_distance(&solution, &full_distance_matrix(inst));
    Ok(FullSolve {
        solution,
        energy: best.energy,
        distance,
        violations,
    })
}
