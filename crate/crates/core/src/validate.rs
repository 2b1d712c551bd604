//! Constraint audit and distance accounting for routed solutions.

use serde::{Deserialize, Serialize};

use crate::instance::{DistanceMatrix, Instance};
use crate::solution::{Arc, RoutedSolution};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationReport {
    /// Customers visited zero times or more than once.
    pub visits: usize,
    /// Vehicles with no arc leaving the start depot.
    pub depot_start: usize,
    /// Arcs into a customer that is not left exactly once.
    pub dead_ends: usize,
    /// Arcs out of a customer that is not entered exactly once.
    pub impossible_departures: usize,
    /// Vehicles with no arc into the end depot.
    pub depot_end: usize,
    /// Extra connected components per vehicle.
    pub loops: usize,
    /// Vehicles loaded beyond capacity.
    pub capacity: usize,
    /// Arcs naming nodes outside the instance.
    pub malformed_arcs: usize,
    pub total: usize,
}

impl ViolationReport {
    fn finish(mut self) -> Self {
        self.total = self.visits
            + self.depot_start
            + self.dead_ends
            + self.impossible_departures
            + self.depot_end
            + self.loops
            + self.capacity
            + self.malformed_arcs;
        self
    }

    pub fn is_feasible(&self) -> bool {
        self.total == 0
    }
}

fn node_limit(sol: &RoutedSolution) -> usize {
    sol.num_customers.max(sol.ending_depot()) + 1
}

fn well_formed(sol: &RoutedSolution, route: &[Arc]) -> Vec<Arc> {
    let limit = node_limit(sol);
    route
        .iter()
        .copied()
        .filter(|&(a, b)| a < limit && b < limit)
        .collect()
}

struct Dsu(Vec<usize>);

impl Dsu {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.0[ra] = rb;
        }
    }
}

fn components(route: &[Arc], limit: usize) -> usize {
    let mut dsu = Dsu((0..limit).collect());
    let mut present = vec![false; limit];
    for &(a, b) in route {
        present[a] = true;
        present[b] = true;
        dsu.union(a, b);
    }
    (0..limit)
        .filter(|&v| present[v] && dsu.find(v) == v)
        .count()
}

/// Audits a solution. The number of vehicles is the number of routes; capacity
/// is checked against `inst.capacities[k]` (or the fleet capacity when the
/// solution has more routes than the fleet).
pub fn check_solution(sol: &RoutedSolution, inst: &Instance) -> ViolationReport {
    let n = sol.num_customers;
    let start = sol.starting_depot();
    let end = sol.ending_depot();
    let limit = node_limit(sol);
    let mut report = ViolationReport {
        malformed_arcs: sol.num_arcs()
            - sol
                .routes
                .iter()
                .map(|r| well_formed(sol, r).len())
                .sum::<usize>(),
        ..Default::default()
    };

    let mut visits = vec![0usize; n];
    for route in &sol.routes {
        for (_, b) in well_formed(sol, route) {
            if (1..=n).contains(&b) {
                visits[b - 1] += 1;
            }
        }
    }
    report.visits = visits.iter().filter(|&&v| v != 1).count();

    for (k, route) in sol.routes.iter().enumerate() {
        let arcs = well_formed(sol, route);
        if !arcs.iter().any(|&(a, _)| a == start) {
            report.depot_start += 1;
        }
        if !arcs.iter().any(|&(_, b)| b == end) {
            report.depot_end += 1;
        }
        for &(_, head) in &arcs {
            if head != end {
                let leaving = arcs.iter().filter(|&&(a, b)| a == head && a != b).count();
                if leaving != 1 {
                    report.dead_ends += 1;
                }
            }
        }
        for &(tail, _) in &arcs {
            if tail != start {
                let arriving = arcs.iter().filter(|&&(a, b)| b == tail && a != b).count();
                if arriving != 1 {
                    report.impossible_departures += 1;
                }
            }
        }
        report.loops += components(&arcs, limit).saturating_sub(1);
        let cap = inst
            .capacities
            .get(k)
            .copied()
            .unwrap_or_else(|| inst.capacity());
        if route_load(sol, &arcs, &inst.demands) > cap {
            report.capacity += 1;
        }
    }
    report.finish()
}

fn route_load(sol: &RoutedSolution, arcs: &[Arc], demands: &[u64]) -> u64 {
    arcs.iter()
        .filter(|&&(_, b)| !sol.is_depot(b))
        .filter_map(|&(_, b)| demands.get(b - 1))
        .sum()
}

/// Demand delivered by each vehicle: the sum over arc heads that are customers.
pub fn route_loads(sol: &RoutedSolution, demands: &[u64]) -> Vec<u64> {
    sol.routes
        .iter()
        .map(|r| route_load(sol, r, demands))
        .collect()
}

/// Sum of `dist[i][j]` over all arcs. Arcs outside the matrix are ignored.
pub fn total_distance(sol: &RoutedSolution, dist: &DistanceMatrix) -> f64 {
    let n = dist.size();
    sol.routes
        .iter()
        .flatten()
        .filter(|&&(a, b)| a < n && b < n)
        .map(|&(a, b)| dist[(a, b)])
        .fold(0.0, |acc, d| acc + d)
}
