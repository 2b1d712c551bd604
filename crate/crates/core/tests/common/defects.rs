use qroute::instance::Instance;
use qroute::solution::{DepotConvention, RoutedSolution};
use qroute::validate::ViolationReport;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::random_instance;

/// Instance plus customer sequences (1-based nodes) for at least two vehicles.
pub fn feasible(seed: u64) -> (Instance, Vec<Vec<usize>>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let n = rng.random_range(4..=12);
        let k = rng.random_range(2..=4);
        let base = random_instance(n, k, 1000, rng.random());
        let total = base.total_demand();
        let maxd = *base.demands.iter().max().unwrap();
        let cap = total.div_ceil(k as u64) + maxd;
        if cap >= total {
            continue;
        }
        let inst = Instance::new(
            "v",
            base.depot_coord,
            base.customer_coords.clone(),
            base.demands.clone(),
            cap,
            k,
        )
        .unwrap();
        let mut order: Vec<usize> = (1..=n).collect();
        order.shuffle(&mut rng);
        let mut bins: Vec<(u64, Vec<usize>)> = vec![(0, Vec::new()); k];
        for c in order {
            let d = inst.demands[c - 1];
            let bin = bins.iter_mut().find(|b| b.0 + d <= cap).unwrap();
            bin.0 += d;
            bin.1.push(c);
        }
        let seqs: Vec<Vec<usize>> = bins
            .into_iter()
            .map(|b| b.1)
            .filter(|s| !s.is_empty())
            .collect();
        if seqs.len() >= 2 {
            return (inst, seqs);
        }
    }
}

pub fn to_solution(n: usize, seqs: &[Vec<usize>], convention: DepotConvention) -> RoutedSolution {
    let mut sol = RoutedSolution::new(n, convention);
    let end = sol.ending_depot();
    sol.routes = seqs
        .iter()
        .map(|s| {
            let mut path = vec![0];
            path.extend(s);
            path.push(end);
            path.windows(2).map(|w| (w[0], w[1])).collect()
        })
        .collect();
    sol
}

#[derive(Debug, Clone, Copy)]
pub enum Defect {
    Visits,
    DepotStart,
    DeadEnd,
    ImpossibleDeparture,
    DepotEnd,
    Loop,
    Capacity,
}

pub const DEFECTS: [Defect; 7] = [
    Defect::Visits,
    Defect::DepotStart,
    Defect::DeadEnd,
    Defect::ImpossibleDeparture,
    Defect::DepotEnd,
    Defect::Loop,
    Defect::Capacity,
];

pub fn seed_defect(
    sol: &mut RoutedSolution,
    seqs: &[Vec<usize>],
    defect: Defect,
    rng: &mut ChaCha8Rng,
) {
    let end = sol.ending_depot();
    let eligible: Vec<usize> = match defect {
        // these need a route with at least two customers
        Defect::Visits | Defect::Loop => (0..seqs.len()).filter(|&r| seqs[r].len() >= 2).collect(),
        _ => (0..seqs.len()).collect(),
    };
    let r = eligible[rng.random_range(0..eligible.len())];
    let route = &mut sol.routes[r];
    match defect {
        Defect::Visits => {
            // skip one customer
            let i = rng.random_range(0..route.len() - 1);
            let (a, _) = route[i];
            let (_, c) = route[i + 1];
            route.splice(i..=i + 1, [(a, c)]);
        }
        Defect::DepotStart => route[0].0 = end,
        Defect::DepotEnd => route.last_mut().unwrap().1 = 0,
        Defect::DeadEnd => {
            let i = rng.random_range(1..route.len());
            let a = route[i].0;
            route.push((a, end));
        }
        Defect::ImpossibleDeparture => {
            let other = seqs[(r + 1) % seqs.len()][0];
            route.push((other, end));
        }
        Defect::Loop => {
            // detach two consecutive customers into a 2-cycle
            let seq = &seqs[r];
            let i = rng.random_range(0..seq.len() - 1);
            let (b, c) = (seq[i], seq[i + 1]);
            let prev = if i == 0 { 0 } else { seq[i - 1] };
            let next = seq.get(i + 2).copied().unwrap_or(end);
            route.retain(|&(x, y)| !(x == prev && y == b) && !(x == c && y == next));
            route.push((prev, next));
            route.push((c, b));
        }
        Defect::Capacity => {
            let mut path = vec![0];
            path.extend(seqs.iter().flatten());
            path.push(end);
            sol.routes = vec![path.windows(2).map(|w| (w[0], w[1])).collect()];
        }
    }
}

pub fn category(r: &ViolationReport, d: Defect) -> usize {
    match d {
        Defect::Visits => r.visits,
        Defect::DepotStart => r.depot_start,
        Defect::DeadEnd => r.dead_ends,
        Defect::ImpossibleDeparture => r.impossible_departures,
        Defect::DepotEnd => r.depot_end,
        Defect::Loop => r.loops,
        Defect::Capacity => r.capacity,
    }
}
