//! CVRP instances and the distance matrices derived from them.

use std::ops::Index;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Cost used to forbid arcs in open cluster matrices.
pub const FORBIDDEN_ARC: f64 = 9_999_999.0;

pub type Point = (f64, f64);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub name: String,
    pub depot_coord: Point,
    pub customer_coords: Vec<Point>,
    pub demands: Vec<u64>,
    /// One entry per vehicle.
    pub capacities: Vec<u64>,
}

impl Instance {
    /// Homogeneous fleet of `num_vehicles` vehicles with capacity `capacity`.
    pub fn new(
        name: impl Into<String>,
        depot_coord: Point,
        customer_coords: Vec<Point>,
        demands: Vec<u64>,
        capacity: u64,
        num_vehicles: usize,
    ) -> Result<Self> {
        let inst = Self {
            name: name.into(),
            depot_coord,
            customer_coords,
            demands,
            capacities: vec![capacity; num_vehicles],
        };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<()> {
        if self.demands.is_empty() {
            return Err(Error::NoRequests);
        }
        if self.demands.len() != self.customer_coords.len() {
            return Err(Error::Parse(format!(
                "{} demands for {} customers",
                self.demands.len(),
                self.customer_coords.len()
            )));
        }
        if let Some(i) = self.demands.iter().position(|&d| d < 1) {
            return Err(Error::Parse(format!("customer {i} has demand below 1")));
        }
        if self.capacities.is_empty() || self.capacities.contains(&0) {
            return Err(Error::MissingCapacity);
        }
        let total: u64 = self.demands.iter().sum();
        let fleet: u64 = self.capacities.iter().sum();
        if total > fleet {
            return Err(Error::Parse(format!(
                "total demand {total} exceeds fleet capacity {fleet}"
            )));
        }
        Ok(())
    }

    pub fn num_customers(&self) -> usize {
        self.demands.len()
    }

    pub fn num_vehicles(&self) -> usize {
        self.capacities.len()
    }

    /// Vehicle capacity Q. For a mixed fleet this is the smallest capacity.
    pub fn capacity(&self) -> u64 {
        self.capacities.iter().copied().min().unwrap_or(0)
    }

    pub fn total_demand(&self) -> u64 {
        self.demands.iter().sum()
    }

    pub fn min_demand(&self) -> u64 {
        self.demands.iter().copied().min().unwrap_or(0)
    }

    /// Coordinates in global node order: depot first, then customers.
    pub fn node_coords(&self) -> Vec<Point> {
        std::iter::once(self.depot_coord)
            .chain(self.customer_coords.iter().copied())
            .collect()
    }
}

fn euclid(a: Point, b: Point) -> f64 {
    (a.0 - b.0).hypot(a.1 - b.1)
}

fn child<'a, 'i>(node: roxmltree::Node<'a, 'i>, tag: &str) -> Option<roxmltree::Node<'a, 'i>> {
    node.children().find(|c| c.has_tag_name(tag))
}

fn children<'a, 'i>(
    node: roxmltree::Node<'a, 'i>,
    tag: &'static str,
) -> impl Iterator<Item = roxmltree::Node<'a, 'i>> {
    node.children().filter(move |c| c.has_tag_name(tag))
}

fn number(node: roxmltree::Node, tag: &str) -> Result<f64> {
    let text = child(node, tag)
        .and_then(|c| c.text())
        .ok_or_else(|| Error::Parse(format!("missing <{tag}>")))?;
    text.trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("<{tag}> is not numeric: {text:?}")))
}

/// Parses a VRP-REP style XML document.
pub fn parse_instance_xml(bytes: &[u8]) -> Result<Instance> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::Parse(e.to_string()))?;
    let doc = roxmltree::Document::parse(text).map_err(|e| Error::Parse(e.to_string()))?;
    let root = doc.root_element();
    if !root.has_tag_name("instance") {
        return Err(Error::Parse("root element is not <instance>".into()));
    }

    let name = child(root, "info")
        .and_then(|i| child(i, "name"))
        .and_then(|n| n.text())
        .map(|s| s.trim().to_string())
        .unwrap_or_default();

    let mut demands = Vec::new();
    if let Some(reqs) = child(root, "requests") {
        for req in children(reqs, "request") {
            let q = number(req, "quantity")?;
            demands.push(q.floor().max(0.0) as u64);
        }
    }
    if demands.is_empty() {
        return Err(Error::NoRequests);
    }

    let fleet = child(root, "fleet").ok_or(Error::MissingCapacity)?;
    let profiles: Vec<_> = children(fleet, "vehicle_profile").collect();
    let mut capacities = Vec::new();
    for p in &profiles {
        let cap = number(*p, "capacity").map_err(|_| Error::MissingCapacity)?;
        capacities.push(cap.floor() as u64);
    }
    if capacities.is_empty() || capacities.contains(&0) {
        return Err(Error::MissingCapacity);
    }
    let departure = if profiles.len() == 1 {
        child(profiles[0], "departure_node")
            .and_then(|d| d.text())
            .map(|s| s.trim().to_string())
    } else {
        None
    };

    let nodes = child(root, "network")
        .and_then(|n| child(n, "nodes"))
        .ok_or_else(|| Error::Parse("missing <network><nodes>".into()))?;
    let mut depot = None;
    let mut customers = Vec::new();
    for node in children(nodes, "node") {
        let id = node.attribute("id").unwrap_or("").trim();
        let kind = node.attribute("type").unwrap_or("").trim();
        let is_departure = departure.as_deref() == Some(id);
        if kind == "1" && !is_departure {
            customers.push((number(node, "cx")?, number(node, "cy")?));
        }
        if kind == "0" || is_departure {
            depot = Some((number(node, "cx")?, number(node, "cy")?));
        }
    }
    let depot_coord = depot.ok_or(Error::MissingDepot)?;

    let total: u64 = demands.iter().sum();
    let per_round: u64 = capacities.iter().sum();
    let rounds = total.div_ceil(per_round).max(1) as usize;
    let capacities = capacities.repeat(rounds);

    let inst = Instance {
        name,
        depot_coord,
        customer_coords: customers,
        demands,
        capacities,
    };
    inst.validate()?;
    Ok(inst)
}

/// Plain-text format: `Q K`, then depot `x y`, then one `x y demand` line per customer.
pub fn parse_instance_text(text: &str) -> Result<Instance> {
    let mut lines = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'));
    let fields = |line: Option<&str>, want: usize, what: &str| -> Result<Vec<f64>> {
        let line = line.ok_or_else(|| Error::Parse(format!("missing {what} line")))?;
        let vals: std::result::Result<Vec<f64>, _> =
            line.split_whitespace().map(str::parse::<f64>).collect();
        let vals = vals.map_err(|_| Error::Parse(format!("non-numeric {what} line: {line:?}")))?;
        if vals.len() != want {
            return Err(Error::Parse(format!(
                "{what} line needs {want} fields: {line:?}"
            )));
        }
        Ok(vals)
    };
    let head = fields(lines.next(), 2, "header")?;
    let depot = fields(lines.next(), 2, "depot").map_err(|_| Error::MissingDepot)?;
    let mut coords = Vec::new();
    let mut demands = Vec::new();
    for line in lines {
        let v = fields(Some(line), 3, "customer")?;
        coords.push((v[0], v[1]));
        demands.push(v[2].floor().max(0.0) as u64);
    }
    if head[0] < 1.0 {
        return Err(Error::MissingCapacity);
    }
    Instance::new(
        String::new(),
        (depot[0], depot[1]),
        coords,
        demands,
        head[0] as u64,
        head[1] as usize,
    )
}

/// Loads `.xml` files as VRP-REP and anything else as the text format. An
/// unnamed instance takes the file stem as its name.
pub fn load_instance(path: &Path) -> Result<Instance> {
    if !path.exists() {
        return Err(Error::MissingInstance(path.to_path_buf()));
    }
    let bytes = std::fs::read(path)?;
    let is_xml = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("xml"));
    let mut inst = if is_xml {
        parse_instance_xml(&bytes)?
    } else {
        parse_instance_text(std::str::from_utf8(&bytes).map_err(|e| Error::Parse(e.to_string()))?)?
    };
    if inst.name.is_empty() {
        inst.name = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
    }
    Ok(inst)
}

/// Which nodes a matrix row/column refers to.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum NodeOrdering {
    /// `[depot, customers..., depot]`.
    DepotCustomersDepot,
    /// Customers only, in instance order.
    Customers,
    /// `[depot, members..., depot]` with forbidden-arc sentinels.
    OpenCluster(Vec<usize>),
    /// `[depot, members...]`.
    ClosedCluster(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
    ordering: NodeOrdering,
}

impl DistanceMatrix {
    pub fn from_points(points: &[Point], ordering: NodeOrdering) -> Self {
        let n = points.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                data[i * n + j] = euclid(points[i], points[j]);
            }
        }
        Self { n, data, ordering }
    }

    /// Wraps a square list of rows.
    pub fn from_rows(rows: Vec<Vec<f64>>, ordering: NodeOrdering) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::DegenerateMatrix("matrix is not square".into()));
        }
        Ok(Self {
            n,
            data: rows.into_iter().flatten().collect(),
            ordering,
        })
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn ordering(&self) -> &NodeOrdering {
        &self.ordering
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn max_finite(&self) -> f64 {
        self.data
            .iter()
            .copied()
            .filter(|&d| d < FORBIDDEN_ARC)
            .fold(0.0, f64::max)
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.n).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }
}

impl Index<(usize, usize)> for DistanceMatrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.n + j]
    }
}

pub fn full_distance_matrix(inst: &Instance) -> DistanceMatrix {
    let mut pts = inst.node_coords();
    pts.push(inst.depot_coord);
    DistanceMatrix::from_points(&pts, NodeOrdering::DepotCustomersDepot)
}

pub fn customer_distance_matrix(inst: &Instance) -> DistanceMatrix {
    DistanceMatrix::from_points(&inst.customer_coords, NodeOrdering::Customers)
}

/// Drops the first and last row and column of a `[depot, customers..., depot]` matrix.
pub fn distances_without_depots(m: &DistanceMatrix) -> Result<DistanceMatrix> {
    if m.ordering != NodeOrdering::DepotCustomersDepot {
        return Err(Error::DegenerateMatrix(format!(
            "expected depot-bracketed ordering, got {:?}",
            m.ordering
        )));
    }
    if m.n < 3 {
        return Err(Error::DegenerateMatrix(format!(
            "{0}x{0} matrix has no customers",
            m.n
        )));
    }
    let k = m.n - 2;
    let mut data = Vec::with_capacity(k * k);
    for i in 1..=k {
        data.extend_from_slice(&m.row(i)[1..=k]);
    }
    Ok(DistanceMatrix {
        n: k,
        data,
        ordering: NodeOrdering::Customers,
    })
}

fn cluster_points(inst: &Instance, cluster: &[usize]) -> Result<Vec<Point>> {
    let mut pts = vec![inst.depot_coord];
    for &c in cluster {
        let p = inst
            .customer_coords
            .get(c)
            .ok_or_else(|| Error::Clustering(format!("customer index {c} out of range")))?;
        pts.push(*p);
    }
    Ok(pts)
}

/// `[depot, members..., depot]` where arcs into the start depot, arcs out of the
/// end depot and zero-length arcs cost [`FORBIDDEN_ARC`].
pub fn cluster_distance_matrix_open(inst: &Instance, cluster: &[usize]) -> Result<DistanceMatrix> {
    let mut pts = cluster_points(inst, cluster)?;
    pts.push(inst.depot_coord);
    let mut m = DistanceMatrix::from_points(&pts, NodeOrdering::OpenCluster(cluster.to_vec()));
    let n = m.n;
    for i in 0..n {
        for j in 0..n {
            let d = &mut m.data[i * n + j];
            if j == 0 || i == n - 1 || *d == 0.0 {
                *d = FORBIDDEN_ARC;
            }
        }
    }
    Ok(m)
}

/// `[depot, members...]` with plain Euclidean distances.
pub fn cluster_distance_matrix_closed(
    inst: &Instance,
    cluster: &[usize],
) -> Result<DistanceMatrix> {
    let pts = cluster_points(inst, cluster)?;
    Ok(DistanceMatrix::from_points(
        &pts,
        NodeOrdering::ClosedCluster(cluster.to_vec()),
    ))
}
