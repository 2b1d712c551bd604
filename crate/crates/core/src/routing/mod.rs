//! Per-cluster tour construction.

mod gls;
mod qubo;

pub use gls::{
    augmented_cost, gls_tsp, or_opt_step, route_clusters, two_opt_step, GlsParams, Penalties, Tour,
};
pub use qubo::{
    qubo_route_clusters, tsp_encode, tsp_index, tsp_qubo_build, tsp_qubo_decode, QuboRouting,
    TspDecoded, TspQubo, TspQuboParams,
};
