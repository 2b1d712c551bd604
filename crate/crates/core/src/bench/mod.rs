//! Experiment harness: configs, pipelines, grid searches and output files.

mod config;
mod records;
mod render;
mod run;

pub use config::{ExperimentConfig, Grid, Pipeline, SEED_ENV};
pub use records::*;
pub use render::render_routes_svg;
pub use run::{
    grid_search_clustering, grid_search_routing, reads_sweep, run_pipeline, solution_path, solve,
    with_reads, PipelineRun,
};
