#![allow(dead_code)]

pub mod defects;

use std::path::PathBuf;

use qroute::instance::{DistanceMatrix, Instance, NodeOrdering};
use qroute::qubo::QuboCompiled;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/data")
        .join(name)
}

pub fn random_points(n: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (rng.random_range(0.0..100.0), rng.random_range(0.0..100.0)))
        .collect()
}

pub fn random_matrix(n: usize, seed: u64) -> DistanceMatrix {
    DistanceMatrix::from_points(&random_points(n, seed), NodeOrdering::Customers)
}

pub fn random_instance(n: usize, k: usize, capacity: u64, seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xABCD);
    let pts = random_points(n + 1, seed);
    let mut demands: Vec<u64> = (0..n).map(|_| rng.random_range(1..=10)).collect();
    while demands.iter().sum::<u64>() > capacity * k as u64 {
        let i = demands.iter().position(|&d| d > 1).unwrap();
        demands[i] -= 1;
    }
    Instance::new("rand", pts[0], pts[1..].to_vec(), demands, capacity, k).unwrap()
}

/// Exact shortest closed tour through every node, starting at node 0.
pub fn held_karp(d: &DistanceMatrix) -> f64 {
    let n = d.size();
    if n == 1 {
        return 0.0;
    }
    let m = n - 1;
    let full = 1usize << m;
    let mut dp = vec![f64::INFINITY; full * m];
    for j in 0..m {
        dp[(1 << j) * m + j] = d[(0, j + 1)];
    }
    for mask in 1..full {
        for j in 0..m {
            let cur = dp[mask * m + j];
            if mask & (1 << j) == 0 || !cur.is_finite() {
                continue;
            }
            for k in 0..m {
                if mask & (1 << k) != 0 {
                    continue;
                }
                let next = (mask | (1 << k)) * m + k;
                let cand = cur + d[(j + 1, k + 1)];
                if cand < dp[next] {
                    dp[next] = cand;
                }
            }
        }
    }
    (0..m)
        .map(|j| dp[(full - 1) * m + j] + d[(j + 1, 0)])
        .fold(f64::INFINITY, f64::min)
}

pub fn bits(x: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| x >> i & 1 == 1).collect()
}

/// All samples attaining the minimum energy (within `tol`).
pub fn exhaustive_minima(q: &QuboCompiled, tol: f64) -> (f64, Vec<Vec<bool>>) {
    let n = q.variable_count();
    let energies: Vec<f64> = (0..1u64 << n)
        .map(|x| q.energy(&bits(x, n)).unwrap())
        .collect();
    let min = energies.iter().copied().fold(f64::INFINITY, f64::min);
    let argmin = (0..1u64 << n)
        .filter(|&x| energies[x as usize] <= min + tol)
        .map(|x| bits(x, n))
        .collect();
    (min, argmin)
}

/// Dense QUBO with integer weights in [-10, 10].
pub fn random_qubo(n: usize, seed: u64) -> QuboCompiled {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let linear: Vec<f64> = (0..n).map(|_| rng.random_range(-10..=10) as f64).collect();
    let mut quad = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            quad.push(((i, j), rng.random_range(-10..=10) as f64));
        }
    }
    QuboCompiled::from_terms(n, &linear, quad, 0.0).unwrap()
}
