mod common;

use common::data_path;
use common::defects::{category, feasible, seed_defect, to_solution, Defect, DEFECTS};
use proptest::prelude::*;
use qroute::cluster::{count_demand_errors, kmedoids_fit, KMedoidsParams};
use qroute::instance::{customer_distance_matrix, full_distance_matrix, load_instance, Instance};
use qroute::routing::{route_clusters, GlsParams};
use qroute::solution::{DepotConvention, RoutedSolution};
use qroute::validate::{check_solution, route_loads, total_distance, ViolationReport};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn random_feasible_solutions_pass() {
    for seed in 0..100 {
        let (inst, seqs) = feasible(seed);
        for conv in [DepotConvention::Closed, DepotConvention::Open] {
            let sol = to_solution(inst.num_customers(), &seqs, conv);
            let r = check_solution(&sol, &inst);
            assert_eq!(r, ViolationReport::default(), "seed {seed} {conv:?}");
            let loads: u64 = route_loads(&sol, &inst.demands).iter().sum();
            assert_eq!(loads, inst.total_demand());
        }
    }
}

#[test]
fn loop_example() {
    let inst = Instance::new(
        "v",
        (0.0, 0.0),
        vec![(1.0, 0.0), (2.0, 0.0), (3.0, 0.0)],
        vec![1, 1, 1],
        10,
        1,
    )
    .unwrap();
    let mut sol = RoutedSolution::new(3, DepotConvention::Open);
    sol.routes = vec![vec![(0, 1), (1, 4), (2, 3), (3, 2)]];
    let r = check_solution(&sol, &inst);
    assert!(r.loops >= 1);
    assert_eq!(r.total, r.loops);
}

#[test]
fn distance_accounting() {
    let (inst, seqs) = feasible(3);
    let d = full_distance_matrix(&inst);
    let sol = to_solution(inst.num_customers(), &seqs, DepotConvention::Open);
    let reversed = RoutedSolution {
        routes: sol
            .routes
            .iter()
            .map(|r| r.iter().rev().map(|&(a, b)| (b, a)).collect())
            .collect(),
        ..sol.clone()
    };
    assert!((total_distance(&sol, &d) - total_distance(&reversed, &d)).abs() < 1e-9);
    let single = RoutedSolution::from_paths(inst.num_customers(), &[vec![0, 1]]);
    assert_eq!(total_distance(&single, &d), d[(0, 1)]);
    let empty = RoutedSolution::new(inst.num_customers(), DepotConvention::Closed);
    assert_eq!(total_distance(&empty, &d), 0.0);
    let depot_only = RoutedSolution::from_paths(inst.num_customers(), &[vec![0, 0]]);
    assert_eq!(route_loads(&depot_only, &inst.demands), vec![0]);
}

#[test]
fn kmedoids_gls_pipeline_is_sound() {
    let inst = load_instance(&data_path("CMT01.xml")).unwrap();
    let dist = customer_distance_matrix(&inst);
    let mut checked = 0;
    for penalty in [1.0, 10.0, 1e4] {
        for cost in [
            qroute::cluster::KMedoidsCost::PairwiseDeviation,
            qroute::cluster::KMedoidsCost::MedoidDistance,
        ] {
            let p = KMedoidsParams {
                penalty,
                cost,
                ..Default::default()
            };
            let fit = kmedoids_fit(&dist, 5, &inst.demands, inst.capacity(), &p).unwrap();
            if count_demand_errors(&fit.assignment, &inst.demands, inst.capacity()) > 0 {
                continue;
            }
            let gls = GlsParams {
                budget: 2000,
                ..Default::default()
            };
            let sol = route_clusters(&inst, &fit.assignment, &gls).unwrap();
            assert!(check_solution(&sol, &inst).is_feasible());
            checked += 1;
        }
    }
    assert!(checked >= 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]
    #[test]
    fn seeded_defects_are_reported(seed in any::<u64>(), which in 0usize..7) {
        let (inst, seqs) = feasible(seed);
        let defect = DEFECTS[which];
        let mut sol = to_solution(inst.num_customers(), &seqs, DepotConvention::Open);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        if matches!(defect, Defect::Visits | Defect::Loop) {
            prop_assume!(seqs.iter().any(|s| s.len() >= 2));
        }
        seed_defect(&mut sol, &seqs, defect, &mut rng);
        let report = check_solution(&sol, &inst);
        prop_assert!(category(&report, defect) > 0, "{:?} {:?}", defect, report);
        for other in DEFECTS {
            if std::mem::discriminant(&other) != std::mem::discriminant(&defect) {
                prop_assert_eq!(category(&report, other), 0, "{:?} leaked into {:?}: {:?}", defect, other, report);
            }
        }
        prop_assert_eq!(check_solution(&sol, &inst), report);
    }
}
