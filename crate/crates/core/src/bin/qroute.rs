use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use qroute::bench::{self, ExperimentConfig, Pipeline, SolutionRecord};
use qroute::cluster::clustering_variable_count;
use qroute::full::variable_census;
use qroute::instance::load_instance;

#[derive(Parser)]
#[command(name = "qroute", version, about = "CVRP solvers and benchmark harness")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON experiment config; flags below override its keys.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Instance file (VRP-REP XML or text); repeatable.
    #[arg(long = "instance")]
    instances: Vec<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long = "out")]
    output_dir: Option<PathBuf>,
    /// Write zero instead of measured times.
    #[arg(long)]
    no_timing: bool,
}

impl Common {
    fn config(&self) -> qroute::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(p)?,
            None => ExperimentConfig::default(),
        };
        if !self.instances.is_empty() {
            cfg.instances = self.instances.clone();
        }
        if let Some(s) = self.seed {
            cfg.seed = s;
        }
        if let Some(o) = &self.output_dir {
            cfg.output_dir = o.clone();
        }
        if self.no_timing {
            cfg.record_timing = false;
        }
        cfg.apply_env()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Run one pipeline per instance; writes solution JSON and summary.csv.
    Solve {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        pipeline: Option<Pipeline>,
    },
    /// QUBO clustering grid over (M1, M2).
    GridCluster {
        #[command(flatten)]
        common: Common,
    },
    /// QUBO routing grid over (m_A, m_B).
    GridRoute {
        #[command(flatten)]
        common: Common,
    },
    /// QUBO routing for several read counts.
    ReadsSweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',')]
        reads: Vec<usize>,
    },
    /// Print variable counts of the full and clustering models.
    Census {
        #[arg(long)]
        customers: usize,
        #[arg(long)]
        vehicles: usize,
        #[arg(long)]
        capacity: u64,
        /// Smallest demand; adds the clustering model count.
        #[arg(long)]
        min_demand: Option<u64>,
    },
    /// Draw a solution JSON as SVG.
    Render {
        #[arg(long)]
        solution: PathBuf,
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
}

fn run(cli: Cli) -> qroute::Result<()> {
    match cli.command {
        Command::Solve { common, pipeline } => {
            let mut cfg = common.config()?;
            if let Some(p) = pipeline {
                cfg.pipeline = p;
            }
            for (_, row) in bench::solve(&cfg)? {
                println!(
                    "{} distance {:.2} errors {} time {:.2}",
                    row.problem, row.distance, row.errors, row.time
                );
            }
        }
        Command::GridCluster { common } => {
            let cfg = common.config()?;
            let rows = bench::grid_search_clustering(&cfg)?;
            println!(
                "{}",
                bench::csv_string(bench::CLUSTERING_GRID_HEADER, &rows)?
            );
        }
        Command::GridRoute { common } => {
            let cfg = common.config()?;
            let rows = bench::grid_search_routing(&cfg)?;
            println!("{}", bench::csv_string(bench::ROUTING_GRID_HEADER, &rows)?);
        }
        Command::ReadsSweep { common, reads } => {
            let mut cfg = common.config()?;
            if !reads.is_empty() {
                cfg.reads = reads;
            }
            cfg.validate()?;
            let rows = bench::reads_sweep(&cfg)?;
            println!("{}", bench::csv_string(bench::READS_HEADER, &rows)?);
        }
        Command::Census {
            customers,
            vehicles,
            capacity,
            min_demand,
        } => {
            let c = variable_census(customers, vehicles, capacity);
            println!("{}", serde_json::to_string_pretty(&c)?);
            if let Some(d) = min_demand {
                if d == 0 {
                    return Err(qroute::Error::Config("min demand must be positive".into()));
                }
                println!(
                    "clustering variables: {}",
                    clustering_variable_count(customers, vehicles, capacity, d)
                );
            }
        }
        Command::Render {
            solution,
            instance,
            out,
        } => {
            let inst = load_instance(&instance)?;
            let record = SolutionRecord::from_json(&std::fs::read_to_string(&solution)?)?;
            std::fs::write(&out, bench::render_routes_svg(&record.routes, &inst))?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
