mod common;

use common::{exhaustive_minima, random_instance};
use proptest::prelude::*;
use qroute::full::*;
use qroute::instance::{full_distance_matrix, Instance};
use qroute::sampler::{AnnealParams, SamplerConfig};
use qroute::solution::{DepotConvention, RoutedSolution};
use qroute::validate::total_distance;

fn open_route(c: usize, nodes: &[usize]) -> RoutedSolution {
    let mut sol = RoutedSolution::new(c, DepotConvention::Open);
    sol.routes = vec![nodes.windows(2).map(|w| (w[0], w[1])).collect()];
    sol
}

fn brute_force_single_vehicle(inst: &Instance) -> f64 {
    let c = inst.num_customers();
    let d = full_distance_matrix(inst);
    let mut perm: Vec<usize> = (1..=c).collect();
    let mut best = f64::INFINITY;
    permute(&mut perm, 0, &mut |p| {
        let mut nodes = vec![0];
        nodes.extend_from_slice(p);
        nodes.push(c + 1);
        let len: f64 = nodes.windows(2).map(|w| d[(w[0], w[1])]).sum();
        best = best.min(len);
    });
    best
}

fn permute(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permute(v, k + 1, f);
        v.swap(k, i);
    }
}

#[test]
fn census_six_customers_two_vehicles() {
    let c = variable_census(6, 2, 50);
    assert_eq!(c.subtour_slack, 129);
    assert_eq!(c.decision, 128);
    assert_eq!(c.capacity_slack, 98);
    assert_eq!(c.total, 355);
}

#[test]
fn census_is_monotone() {
    for c in 0..8 {
        for k in 1..4 {
            for q in 1..20u64 {
                let base = variable_census(c, k, q).total;
                assert!(variable_census(c + 1, k, q).total >= base);
                assert!(variable_census(c, k + 1, q).total >= base);
                assert!(variable_census(c, k, q + 1).total >= base);
            }
        }
    }
}

#[test]
fn feasible_route_energy_is_its_length() {
    let inst = random_instance(3, 1, 40, 11);
    let m = cvrp_qubo_build(&inst, &CvrpParams::default()).unwrap();
    let q = m.compile().unwrap();
    let sol = open_route(3, &[0, 2, 1, 3, 4]);
    let s = m.certifying_sample(&sol).unwrap();
    let (res, cost) = m.residuals(&s).unwrap();
    assert_eq!(res, [0.0; 6]);
    let len = total_distance(&sol, &full_distance_matrix(&inst));
    assert!((cost - len).abs() < 1e-9);
    assert!((q.energy(&s).unwrap() - len * m.multipliers.cost).abs() < 1e-6 * len);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn residual_audit_matches_energy(seed in any::<u64>(), c in 1usize..4, k in 1usize..3) {
        let inst = random_instance(c, k, 30, seed);
        let m = cvrp_qubo_build(&inst, &CvrpParams::default()).unwrap();
        let q = m.compile().unwrap();
        let mut rng = seed;
        let s: Vec<bool> = (0..m.variable_count())
            .map(|_| {
                rng = rng.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                rng >> 61 == 0
            })
            .collect();
        let (res, cost) = m.residuals(&s).unwrap();
        let audit = m.multipliers.cost * cost
            + res.iter().zip(m.multipliers.m).map(|(r, w)| r * w).sum::<f64>();
        let e = q.energy(&s).unwrap();
        prop_assert!((audit - e).abs() <= 1e-6 * e.abs().max(1.0));
    }
}

#[test]
fn two_customer_ground_state_is_shorter_order() {
    let pts = common::random_points(3, 21);
    let inst = Instance::new("two", pts[0], pts[1..].to_vec(), vec![1, 2], 3, 1).unwrap();
    let p = CvrpParams {
        forbidden_cost: 1e4,
        ..Default::default()
    };
    let m = cvrp_qubo_build(&inst, &p).unwrap();
    assert!(m.variable_count() <= 22, "{}", m.variable_count());
    let q = m.compile().unwrap();
    let (_, minima) = exhaustive_minima(&q, 1e-6);
    let best = brute_force_single_vehicle(&inst);
    let d = full_distance_matrix(&inst);
    for s in minima {
        let sol = cvrp_qubo_decode(&s, 2, 1).unwrap();
        assert_eq!(sol.routes[0].len(), 3);
        assert!((total_distance(&sol, &d) - best).abs() < 1e-9);
    }
}

#[test]
fn toy_solve_is_optimal_and_deterministic() {
    let inst = random_instance(3, 1, 30, 5);
    let sampler = SamplerConfig::Anneal(AnnealParams::new(200, 1000, 3));
    let a = solve_full(&inst, &sampler, &CvrpParams::default()).unwrap();
    let b = solve_full(&inst, &sampler, &CvrpParams::default()).unwrap();
    assert_eq!(a, b);
    assert!(a.violations.is_feasible(), "{:?}", a.violations);
    assert!((a.distance - brute_force_single_vehicle(&inst)).abs() < 1e-9);
}

#[test]
fn starved_visit_penalty_leaves_customers_out() {
    let inst = random_instance(3, 1, 30, 5);
    let mut mult = CvrpMultipliers::for_instance(&inst);
    mult.m[0] = 1e-3;
    let p = CvrpParams {
        multipliers: Some(mult),
        ..Default::default()
    };
    let sampler = SamplerConfig::Anneal(AnnealParams::new(100, 1000, 3));
    let out = solve_full(&inst, &sampler, &p).unwrap();
    assert!(out.violations.visits >= 1, "{:?}", out.violations);
}
