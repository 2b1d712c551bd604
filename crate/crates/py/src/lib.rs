//! Python bindings for the qroute CVRP toolkit.

use std::collections::HashMap;
use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use qroute::bench::{self, ExperimentConfig, Pipeline};
use qroute::cluster::{
    kmedoids_fit, silhouette_score, ClusterAssignment, KMedoidsCost, KMedoidsParams,
};
use qroute::instance::{customer_distance_matrix, full_distance_matrix};
use qroute::routing::{route_clusters, GlsParams};
use qroute::sampler::{simulated_annealing, tabu_search, AnnealParams, SampleSet, TabuParams};
use qroute::solution::{DepotConvention, RoutedSolution};
use qroute::validate::{check_solution, total_distance, ViolationReport};

fn to_py(e: qroute::Error) -> PyErr {
    match e {
        qroute::Error::Io(_) | qroute::Error::MissingInstance(_) => {
            PyIOError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

type Records = Vec<(Vec<bool>, f64, usize)>;

fn records(set: &SampleSet) -> Records {
    set.records()
        .iter()
        .map(|r| (r.sample.clone(), r.energy, r.occurrences))
        .collect()
}

fn report_dict<'py>(py: Python<'py>, r: &ViolationReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("visits", r.visits)?;
    d.set_item("depot_start", r.depot_start)?;
    d.set_item("dead_ends", r.dead_ends)?;
    d.set_item("impossible_departures", r.impossible_departures)?;
    d.set_item("depot_end", r.depot_end)?;
    d.set_item("loops", r.loops)?;
    d.set_item("capacity", r.capacity)?;
    d.set_item("malformed_arcs", r.malformed_arcs)?;
    d.set_item("total", r.total)?;
    Ok(d)
}

/// A CVRP instance with a homogeneous fleet.
#[pyclass(name = "Instance", frozen)]
struct PyInstance {
    inner: qroute::instance::Instance,
}

#[pymethods]
impl PyInstance {
    #[new]
    fn new(
        name: &str,
        depot: (f64, f64),
        coords: Vec<(f64, f64)>,
        demands: Vec<u64>,
        capacity: u64,
        num_vehicles: usize,
    ) -> PyResult<Self> {
        qroute::instance::Instance::new(name, depot, coords, demands, capacity, num_vehicles)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    /// Reads an XML or plain text instance file.
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        qroute::instance::load_instance(&path)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        qroute::instance::parse_instance_text(text)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[staticmethod]
    fn from_xml(data: &[u8]) -> PyResult<Self> {
        qroute::instance::parse_instance_xml(data)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn depot(&self) -> (f64, f64) {
        self.inner.depot_coord
    }

    #[getter]
    fn coords(&self) -> Vec<(f64, f64)> {
        self.inner.customer_coords.clone()
    }

    #[getter]
    fn demands(&self) -> Vec<u64> {
        self.inner.demands.clone()
    }

    #[getter]
    fn num_customers(&self) -> usize {
        self.inner.num_customers()
    }

    #[getter]
    fn num_vehicles(&self) -> usize {
        self.inner.num_vehicles()
    }

    #[getter]
    fn capacity(&self) -> u64 {
        self.inner.capacity()
    }

    #[getter]
    fn total_demand(&self) -> u64 {
        self.inner.total_demand()
    }

    /// Euclidean matrix over the depot (row 0) and the customers.
    fn distance_matrix(&self) -> Vec<Vec<f64>> {
        full_distance_matrix(&self.inner).to_rows()
    }

    fn __repr__(&self) -> String {
        format!(
            "Instance(name={:?}, customers={}, vehicles={}, capacity={})",
            self.inner.name,
            self.inner.num_customers(),
            self.inner.num_vehicles(),
            self.inner.capacity()
        )
    }
}

/// A compiled QUBO `offset + sum(linear[i] x_i) + sum(w_ij x_i x_j)`.
#[pyclass(name = "Qubo", frozen)]
struct PyQubo {
    inner: qroute::qubo::QuboCompiled,
}

#[pymethods]
impl PyQubo {
    #[new]
    #[pyo3(signature = (num_variables, linear, quadratic=HashMap::new(), offset=0.0))]
    fn new(
        num_variables: usize,
        linear: Vec<f64>,
        quadratic: HashMap<(usize, usize), f64>,
        offset: f64,
    ) -> PyResult<Self> {
        qroute::qubo::QuboCompiled::from_terms(num_variables, &linear, quadratic, offset)
            .map(|inner| Self { inner })
            .map_err(to_py)
    }

    #[getter]
    fn num_variables(&self) -> usize {
        self.inner.variable_count()
    }

    #[getter]
    fn offset(&self) -> f64 {
        self.inner.offset()
    }

    #[getter]
    fn linear(&self) -> Vec<f64> {
        self.inner.linear().to_vec()
    }

    #[getter]
    fn quadratic(&self) -> HashMap<(usize, usize), f64> {
        self.inner
            .quadratic()
            .iter()
            .map(|(&k, &w)| (k, w))
            .collect()
    }

    fn energy(&self, sample: Vec<bool>) -> PyResult<f64> {
        self.inner.energy(&sample).map_err(to_py)
    }

    /// Simulated annealing. Returns `(sample, energy, occurrences)` sorted by energy.
    #[pyo3(signature = (num_reads=100, sweeps=1000, seed=0))]
    fn anneal(
        &self,
        py: Python<'_>,
        num_reads: usize,
        sweeps: usize,
        seed: u64,
    ) -> PyResult<Records> {
        let params = AnnealParams::new(num_reads, sweeps, seed);
        py.detach(|| simulated_annealing(&self.inner, &params))
            .map(|s| records(&s))
            .map_err(to_py)
    }

    #[pyo3(signature = (iters=2000, tenure=5, seed=0))]
    fn tabu(&self, py: Python<'_>, iters: usize, tenure: usize, seed: u64) -> PyResult<Records> {
        let params = TabuParams {
            iters,
            tenure,
            seed,
        };
        py.detach(|| tabu_search(&self.inner, &params))
            .map(|s| records(&s))
            .map_err(to_py)
    }
}

/// Variable counts of the full CVRP model as a dict.
#[pyfunction]
fn variable_census(
    py: Python<'_>,
    customers: usize,
    vehicles: usize,
    capacity: u64,
) -> PyResult<Bound<'_, PyDict>> {
    let c = qroute::full::variable_census(customers, vehicles, capacity);
    let d = PyDict::new(py);
    d.set_item("decision", c.decision)?;
    d.set_item("capacity_slack", c.capacity_slack)?;
    d.set_item("subtour_slack", c.subtour_slack)?;
    d.set_item("total", c.total)?;
    Ok(d)
}

#[pyfunction]
fn clustering_variable_count(
    customers: usize,
    clusters: usize,
    capacity: u64,
    min_demand: u64,
) -> usize {
    qroute::cluster::clustering_variable_count(customers, clusters, capacity, min_demand)
}

/// Capacity-aware K-Medoids over the customers. Returns `(labels, iterations, cost)`.
#[pyfunction]
#[pyo3(signature = (instance, penalty=1.0, max_iters=200, pairwise=true))]
fn kmedoids(
    instance: &PyInstance,
    penalty: f64,
    max_iters: usize,
    pairwise: bool,
) -> PyResult<(Vec<i64>, usize, f64)> {
    let inst = &instance.inner;
    let params = KMedoidsParams {
        max_iters,
        penalty,
        cost: if pairwise {
            KMedoidsCost::PairwiseDeviation
        } else {
            KMedoidsCost::MedoidDistance
        },
    };
    let fit = kmedoids_fit(
        &customer_distance_matrix(inst),
        inst.num_vehicles(),
        &inst.demands,
        inst.capacity(),
        &params,
    )
    .map_err(to_py)?;
    Ok((fit.assignment.labels, fit.iterations, fit.cost))
}

#[pyfunction]
fn silhouette(instance: &PyInstance, labels: Vec<i64>) -> PyResult<f64> {
    silhouette_score(&labels, &customer_distance_matrix(&instance.inner)).map_err(to_py)
}

/// Dip test on pairwise distances. Returns `(dip, p_value)`.
#[pyfunction]
#[pyo3(signature = (coords, bootstrap=1000, seed=0))]
fn dip_test(
    py: Python<'_>,
    coords: Vec<(f64, f64)>,
    bootstrap: usize,
    seed: u64,
) -> PyResult<(f64, f64)> {
    py.detach(|| qroute::cluster::dip_clusterability(&coords, bootstrap, seed))
        .map(|r| (r.dip, r.p_value))
        .map_err(to_py)
}

/// Routes every cluster with guided local search. Returns closed node paths.
#[pyfunction]
#[pyo3(signature = (instance, labels, budget=10_000, lam=0.3))]
fn route(
    instance: &PyInstance,
    labels: Vec<i64>,
    budget: usize,
    lam: f64,
) -> PyResult<Vec<Vec<usize>>> {
    let inst = &instance.inner;
    let assign = ClusterAssignment::from_labels(labels, inst.num_vehicles(), &inst.demands);
    let params = GlsParams {
        budget,
        lambda: lam,
        ..Default::default()
    };
    let sol = route_clusters(inst, &assign, &params).map_err(to_py)?;
    Ok(sol
        .routes
        .iter()
        .map(|r| {
            let mut path: Vec<usize> = r.iter().map(|a| a.0).collect();
            path.extend(r.last().map(|a| a.1));
            path
        })
        .collect())
}

/// Audits arc lists, one per vehicle. Returns `(violations, distance)`.
#[pyfunction]
#[pyo3(signature = (instance, routes, open=false))]
fn check<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    routes: Vec<Vec<(usize, usize)>>,
    open: bool,
) -> PyResult<(Bound<'py, PyDict>, f64)> {
    let inst = &instance.inner;
    let sol = RoutedSolution {
        num_customers: inst.num_customers(),
        convention: if open {
            DepotConvention::Open
        } else {
            DepotConvention::Closed
        },
        routes,
    };
    let report = check_solution(&sol, inst);
    let end = sol.ending_depot();
    let closed = RoutedSolution {
        convention: DepotConvention::Closed,
        routes: sol
            .routes
            .iter()
            .map(|r| {
                r.iter()
                    .map(|&(a, b)| (a, if b == end { 0 } else { b }))
                    .collect()
            })
            .collect(),
        ..sol
    };
    let distance = total_distance(&closed, &full_distance_matrix(inst));
    Ok((report_dict(py, &report)?, distance))
}

/// Runs one pipeline. `config` is an experiment config as JSON text.
#[pyfunction]
#[pyo3(signature = (instance, pipeline="hybrid-kmedoids-gls", seed=0, config=None))]
fn solve<'py>(
    py: Python<'py>,
    instance: &PyInstance,
    pipeline: &str,
    seed: u64,
    config: Option<&str>,
) -> PyResult<Bound<'py, PyDict>> {
    let pipeline: Pipeline = pipeline.parse().map_err(to_py)?;
    let cfg = match config {
        Some(text) => ExperimentConfig::from_json(text).map_err(to_py)?,
        None => ExperimentConfig::default(),
    };
    let inst = instance.inner.clone();
    let run = py
        .detach(|| bench::run_pipeline(&inst, pipeline, &cfg, seed))
        .map_err(to_py)?;
    let d = PyDict::new(py);
    d.set_item("routes", bench::SolutionRecord::arcs(&run.solution))?;
    d.set_item("distance", run.distance)?;
    d.set_item("clusters", run.clusters)?;
    d.set_item("violations", report_dict(py, &run.violations)?)?;
    d.set_item("wall_s", run.wall_s)?;
    Ok(d)
}

#[pymodule]
fn qroute_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyInstance>()?;
    m.add_class::<PyQubo>()?;
    m.add_function(wrap_pyfunction!(variable_census, m)?)?;
    m.add_function(wrap_pyfunction!(clustering_variable_count, m)?)?;
    m.add_function(wrap_pyfunction!(kmedoids, m)?)?;
    m.add_function(wrap_pyfunction!(silhouette, m)?)?;
    m.add_function(wrap_pyfunction!(dip_test, m)?)?;
    m.add_function(wrap_pyfunction!(route, m)?)?;
    m.add_function(wrap_pyfunction!(check, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    Ok(())
}
