use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::Result;
use crate::solution::RoutedSolution;
use crate::validate::ViolationReport;

/// Rounds to two decimals so the written value parses back to the same float.
pub fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

fn two_decimals<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{x:.2}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    #[serde(rename = "Problem")]
    pub problem: String,
    #[serde(rename = "Nodes")]
    pub nodes: usize,
    #[serde(rename = "Clusters")]
    pub clusters: usize,
    #[serde(rename = "Time", serialize_with = "two_decimals")]
    pub time: f64,
    #[serde(rename = "Errors")]
    pub errors: usize,
    #[serde(rename = "Distance", serialize_with = "two_decimals")]
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusteringGridRow {
    #[serde(rename = "Problem")]
    pub problem: String,
    #[serde(rename = "Constraint 1")]
    pub constraint_1: f64,
    #[serde(rename = "Constraint 2")]
    pub constraint_2: f64,
    #[serde(rename = "Unassigned Nodes")]
    pub unassigned_nodes: usize,
    #[serde(rename = "Demand Errors")]
    pub demand_errors: usize,
    /// Empty when fewer than two clusters are populated.
    #[serde(rename = "Silhouette")]
    pub silhouette: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoutingGridRow {
    #[serde(rename = "Problem")]
    pub problem: String,
    #[serde(rename = "Constraint 1")]
    pub constraint_1: f64,
    #[serde(rename = "Constraint 2")]
    pub constraint_2: f64,
    #[serde(rename = "Errors")]
    pub errors: usize,
    #[serde(rename = "Distance", serialize_with = "two_decimals")]
    pub distance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReadsRow {
    #[serde(rename = "Problem")]
    pub problem: String,
    #[serde(rename = "Nodes")]
    pub nodes: usize,
    #[serde(rename = "Vehicles")]
    pub vehicles: usize,
    #[serde(rename = "# Reads")]
    pub reads: usize,
    #[serde(rename = "Time", serialize_with = "two_decimals")]
    pub time: f64,
    #[serde(rename = "Errors")]
    pub errors: usize,
    #[serde(rename = "Distance", serialize_with = "two_decimals")]
    pub distance: f64,
}

pub const SUMMARY_HEADER: &str = "Problem,Nodes,Clusters,Time,Errors,Distance";
pub const CLUSTERING_GRID_HEADER: &str =
    "Problem,Constraint 1,Constraint 2,Unassigned Nodes,Demand Errors,Silhouette";
pub const ROUTING_GRID_HEADER: &str = "Problem,Constraint 1,Constraint 2,Errors,Distance";
pub const READS_HEADER: &str = "Problem,Nodes,Vehicles,# Reads,Time,Errors,Distance";

/// Writes rows with a header line, even when `rows` is empty.
pub fn write_csv<T: Serialize>(path: &Path, header: &str, rows: &[T]) -> Result<()> {
    std::fs::write(path, csv_string(header, rows)?)?;
    Ok(())
}

pub fn csv_string<T: Serialize>(header: &str, rows: &[T]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for r in rows {
        w.serialize(r)?;
    }
    let body = w.into_inner().map_err(|e| e.into_error())?;
    let mut out = format!("{header}\n");
    out.push_str(&String::from_utf8_lossy(&body));
    Ok(out)
}

/// Appends rows, writing the header first when the file is new or empty.
pub fn append_csv<T: Serialize>(path: &Path, header: &str, rows: &[T]) -> Result<()> {
    let fresh = std::fs::metadata(path)
        .map(|m| m.len() == 0)
        .unwrap_or(true);
    let text = csv_string(header, rows)?;
    let text = if fresh {
        text
    } else {
        text.split_once('\n')
            .map(|x| x.1.to_string())
            .unwrap_or_default()
    };
    use std::io::Write;
    std::fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(path)?
        .write_all(text.as_bytes())?;
    Ok(())
}

pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    parse_csv(&std::fs::read_to_string(path)?)
}

pub fn parse_csv<T: DeserializeOwned>(text: &str) -> Result<Vec<T>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    Ok(r.deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()?)
}

/// Per-instance output of `solve`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionRecord {
    pub instance: String,
    pub pipeline: String,
    pub seed: u64,
    pub routes: Vec<Vec<[usize; 2]>>,
    pub distance: f64,
    pub violations: ViolationReport,
    pub wall_s: f64,
}

impl SolutionRecord {
    pub fn arcs(sol: &RoutedSolution) -> Vec<Vec<[usize; 2]>> {
        sol.routes
            .iter()
            .map(|r| r.iter().map(|&(a, b)| [a, b]).collect())
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        let mut s = serde_json::to_string_pretty(self)?;
        s.push('\n');
        Ok(s)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedStream {
    pub label: String,
    pub seed: u64,
}

/// Master seed and every stream seed derived from it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedManifest {
    pub seed: u64,
    pub streams: Vec<SeedStream>,
}
