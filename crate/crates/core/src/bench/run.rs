use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;

use super::config::{ExperimentConfig, Pipeline};
use super::records::*;
use crate::cluster::{
    count_demand_errors, kmedoids_fit, qubo_cluster, silhouette_score, ClusterAssignment,
    ClusteringMultipliers,
};
use crate::error::{Error, Result};
use crate::full::solve_full;
use crate::instance::{customer_distance_matrix, full_distance_matrix, load_instance, Instance};
use crate::routing::{qubo_route_clusters, route_clusters, TspQuboParams};
use crate::sampler::{derive_seed, InnerSampler, SamplerConfig};
use crate::solution::RoutedSolution;
use crate::validate::{check_solution, total_distance, ViolationReport};

const CLUSTER_STREAM: u64 = 0;
const ROUTE_STREAM: u64 = 1;

/// Outcome of one pipeline on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineRun {
    pub solution: RoutedSolution,
    pub distance: f64,
    pub violations: ViolationReport,
    pub clusters: usize,
    pub wall_s: f64,
}

fn kmedoids_clusters(inst: &Instance, cfg: &ExperimentConfig) -> Result<ClusterAssignment> {
    let d = customer_distance_matrix(inst);
    Ok(kmedoids_fit(
        &d,
        inst.num_vehicles(),
        &inst.demands,
        inst.capacity(),
        &cfg.kmedoids,
    )?
    .assignment)
}

fn qubo_clusters(
    inst: &Instance,
    mult: &ClusteringMultipliers,
    sampler: &SamplerConfig,
) -> Result<ClusterAssignment> {
    Ok(qubo_cluster(inst, mult, sampler)?.0.assignment)
}

/// Runs `pipeline` on `inst`. Clustering samples with `derive_seed(seed, 0)` and
/// routing with `derive_seed(seed, 1)`; the full model uses `seed` directly.
pub fn run_pipeline(
    inst: &Instance,
    pipeline: Pipeline,
    cfg: &ExperimentConfig,
    seed: u64,
) -> Result<PipelineRun> {
    let start = Instant::now();
    let cluster_sampler = cfg.sampler.with_seed(derive_seed(seed, CLUSTER_STREAM));
    let route_sampler = cfg.sampler.with_seed(derive_seed(seed, ROUTE_STREAM));
    let (solution, clusters) = match pipeline {
        Pipeline::FullQubo => {
            let out = solve_full(inst, &cfg.sampler.with_seed(seed), &cfg.cvrp)?;
            (out.solution, inst.num_vehicles())
        }
        _ => {
            let assign = match pipeline {
                Pipeline::HybridKmedoidsGls | Pipeline::HybridKmedoidsQubo => {
                    kmedoids_clusters(inst, cfg)?
                }
                _ => qubo_clusters(inst, &cfg.clustering, &cluster_sampler)?,
            };
            let sol = match pipeline {
                Pipeline::HybridKmedoidsGls | Pipeline::HybridQuboGls => {
                    route_clusters(inst, &assign, &cfg.gls)?
                }
                _ => qubo_route_clusters(inst, &assign, &route_sampler, &cfg.tsp)?.solution,
            };
            let used = assign.clusters().iter().filter(|c| !c.is_empty()).count();
            (sol, used)
        }
    };
    let wall_s = start.elapsed().as_secs_f64();
    let violations = check_solution(&solution, inst);
    let distance = total_distance(&solution, &full_distance_matrix(inst));
    Ok(PipelineRun {
        solution,
        distance,
        violations,
        clusters,
        wall_s,
    })
}

fn timing(cfg: &ExperimentConfig, secs: f64) -> f64 {
    if cfg.record_timing {
        round2(secs)
    } else {
        0.0
    }
}

fn load_all(cfg: &ExperimentConfig) -> Result<Vec<Instance>> {
    cfg.validate()?;
    cfg.instances.iter().map(|p| load_instance(p)).collect()
}

fn instance_seed(cfg: &ExperimentConfig, idx: usize) -> u64 {
    derive_seed(cfg.seed, idx as u64)
}

fn manifest(cfg: &ExperimentConfig, instances: &[Instance], cells: usize) -> SeedManifest {
    let mut streams = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let s = instance_seed(cfg, i);
        streams.push(SeedStream {
            label: inst.name.clone(),
            seed: s,
        });
        for (label, stream) in [("cluster", CLUSTER_STREAM), ("route", ROUTE_STREAM)] {
            streams.push(SeedStream {
                label: format!("{}/{label}", inst.name),
                seed: derive_seed(s, stream),
            });
        }
        for c in 0..cells {
            streams.push(SeedStream {
                label: format!("{}/cell{c}", inst.name),
                seed: derive_seed(s, 2 + c as u64),
            });
        }
    }
    SeedManifest {
        seed: cfg.seed,
        streams,
    }
}

fn prepare_output(cfg: &ExperimentConfig, instances: &[Instance], cells: usize) -> Result<()> {
    std::fs::create_dir_all(&cfg.output_dir)?;
    let m = manifest(cfg, instances, cells);
    std::fs::write(
        cfg.output_dir.join("seeds.json"),
        serde_json::to_string_pretty(&m)? + "\n",
    )?;
    Ok(())
}

/// `solve`: writes `<instance>.solution.json` per instance and appends to `summary.csv`.
pub fn solve(cfg: &ExperimentConfig) -> Result<Vec<(SolutionRecord, SummaryRow)>> {
    let instances = load_all(cfg)?;
    let results = instances
        .par_iter()
        .enumerate()
        .map(|(i, inst)| {
            let seed = instance_seed(cfg, i);
            let run = run_pipeline(inst, cfg.pipeline, cfg, seed)?;
            let record = SolutionRecord {
                instance: inst.name.clone(),
                pipeline: cfg.pipeline.name().to_string(),
                seed,
                routes: SolutionRecord::arcs(&run.solution),
                distance: run.distance,
                violations: run.violations,
                wall_s: timing(cfg, run.wall_s),
            };
            let row = SummaryRow {
                problem: inst.name.clone(),
                nodes: inst.num_customers(),
                clusters: run.clusters,
                time: timing(cfg, run.wall_s),
                errors: run.violations.total,
                distance: round2(run.distance),
            };
            Ok((record, row))
        })
        .collect::<Result<Vec<_>>>()?;
    prepare_output(cfg, &instances, 0)?;
    for (record, _) in &results {
        std::fs::write(
            solution_path(&cfg.output_dir, &record.instance),
            record.to_json()?,
        )?;
    }
    let rows: Vec<SummaryRow> = results.iter().map(|r| r.1.clone()).collect();
    append_csv(&cfg.output_dir.join("summary.csv"), SUMMARY_HEADER, &rows)?;
    Ok(results)
}

pub fn solution_path(dir: &Path, instance: &str) -> PathBuf {
    dir.join(format!("{instance}.solution.json"))
}

/// `grid-cluster`: QUBO clustering over every `(M1, M2)` cell.
pub fn grid_search_clustering(cfg: &ExperimentConfig) -> Result<Vec<ClusteringGridRow>> {
    let instances = load_all(cfg)?;
    let cells = cfg.clustering_grid.cells();
    let jobs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..cells.len()).map(move |c| (i, c)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(i, c)| {
            let inst = &instances[i];
            let (m1, m2) = cells[c];
            let mult = ClusteringMultipliers {
                m1,
                m2,
                ..cfg.clustering
            };
            let sampler = cfg
                .sampler
                .with_seed(derive_seed(instance_seed(cfg, i), 2 + c as u64));
            let assign = qubo_clusters(inst, &mult, &sampler)?;
            let d = customer_distance_matrix(inst);
            Ok(ClusteringGridRow {
                problem: inst.name.clone(),
                constraint_1: m1,
                constraint_2: m2,
                unassigned_nodes: assign.unassigned(),
                demand_errors: count_demand_errors(&assign, &inst.demands, inst.capacity()),
                silhouette: silhouette_score(&assign.labels, &d).ok(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    prepare_output(cfg, &instances, cells.len())?;
    write_csv(
        &cfg.output_dir.join("clustering_grid.csv"),
        CLUSTERING_GRID_HEADER,
        &rows,
    )?;
    Ok(rows)
}

/// `grid-route`: QUBO routing of the K-Medoids clusters over every `(m_A, m_B)` cell.
pub fn grid_search_routing(cfg: &ExperimentConfig) -> Result<Vec<RoutingGridRow>> {
    let instances = load_all(cfg)?;
    let cells = cfg.routing_grid.cells();
    let assigns = instances
        .iter()
        .map(|inst| kmedoids_clusters(inst, cfg))
        .collect::<Result<Vec<_>>>()?;
    let jobs: Vec<(usize, usize)> = (0..instances.len())
        .flat_map(|i| (0..cells.len()).map(move |c| (i, c)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(i, c)| {
            let inst = &instances[i];
            let (m_a, m_b) = cells[c];
            let params = TspQuboParams {
                m_a,
                m_b,
                ..cfg.tsp
            };
            let sampler = cfg
                .sampler
                .with_seed(derive_seed(instance_seed(cfg, i), 2 + c as u64));
            let out = qubo_route_clusters(inst, &assigns[i], &sampler, &params)?;
            Ok(RoutingGridRow {
                problem: inst.name.clone(),
                constraint_1: m_a,
                constraint_2: m_b,
                errors: out.errors,
                distance: round2(total_distance(&out.solution, &full_distance_matrix(inst))),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    prepare_output(cfg, &instances, cells.len())?;
    write_csv(
        &cfg.output_dir.join("routing_grid.csv"),
        ROUTING_GRID_HEADER,
        &rows,
    )?;
    Ok(rows)
}

/// Replaces the read count of an annealing sampler (directly or inside decomposition).
pub fn with_reads(sampler: &SamplerConfig, reads: usize) -> Result<SamplerConfig> {
    let mut s = *sampler;
    match &mut s {
        SamplerConfig::Anneal(p) => p.num_reads = reads,
        SamplerConfig::Decompose(p) => match &mut p.inner {
            InnerSampler::Anneal { num_reads, .. } => *num_reads = reads,
            InnerSampler::Tabu { .. } => {
                return Err(Error::Config(
                    "reads sweep needs an annealing sampler".into(),
                ))
            }
        },
        SamplerConfig::Tabu(_) => {
            return Err(Error::Config(
                "reads sweep needs an annealing sampler".into(),
            ))
        }
    }
    Ok(s)
}

/// `reads-sweep`: QUBO routing of the K-Medoids clusters for each read count.
/// Runs sequentially so the Time column is not distorted by sharing cores.
pub fn reads_sweep(cfg: &ExperimentConfig) -> Result<Vec<ReadsRow>> {
    let instances = load_all(cfg)?;
    let mut rows = Vec::new();
    for (i, inst) in instances.iter().enumerate() {
        let assign = kmedoids_clusters(inst, cfg)?;
        for (c, &reads) in cfg.reads.iter().enumerate() {
            let sampler = with_reads(&cfg.sampler, reads)?
                .with_seed(derive_seed(instance_seed(cfg, i), 2 + c as u64));
            let start = Instant::now();
            let out = qubo_route_clusters(inst, &assign, &sampler, &cfg.tsp)?;
            let secs = start.elapsed().as_secs_f64();
            rows.push(ReadsRow {
                problem: inst.name.clone(),
                nodes: inst.num_customers(),
                vehicles: inst.num_vehicles(),
                reads,
                time: timing(cfg, secs),
                errors: out.errors,
                distance: round2(total_distance(&out.solution, &full_distance_matrix(inst))),
            });
        }
    }
    prepare_output(cfg, &instances, cfg.reads.len())?;
    write_csv(&cfg.output_dir.join("reads_sweep.csv"), READS_HEADER, &rows)?;
    Ok(rows)
}
