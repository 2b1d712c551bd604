use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("variable array `{0}` is already registered")]
    DuplicateName(String),
    #[error("variable array `{0}` has an empty or zero-sized shape")]
    EmptyShape(String),
    #[error("unknown variable array `{0}`")]
    UnknownName(String),
    #[error("index {index:?} is out of range for `{name}` with shape {shape:?}")]
    IndexOutOfRange {
        name: String,
        index: Vec<usize>,
        shape: Vec<usize>,
    },
    #[error("flat variable index {0} is out of range")]
    FlatIndexOutOfRange(usize),
    #[error("polynomials belong to different variable registries")]
    RegistryMismatch,
    #[error("term {term:?} has degree {degree}; only degree <= 2 compiles to a QUBO")]
    UncompilableDegree { term: Vec<usize>, degree: usize },
    #[error("sample has {got} bits but the model has {expected} variables")]
    SampleLength { expected: usize, got: usize },
    #[error("invalid slack range: {0}")]
    InvalidSlack(String),

    #[error("QUBO has no variables")]
    EmptyQubo,
    #[error("QUBO has no nonzero coefficients")]
    ZeroQubo,
    #[error("invalid sampler parameters: {0}")]
    InvalidParams(String),

    #[error("instance parse error: {0}")]
    Parse(String),
    #[error("instance has no depot node")]
    MissingDepot,
    #[error("instance fleet has no vehicle capacity")]
    MissingCapacity,
    #[error("instance has no requests")]
    NoRequests,
    #[error("degenerate distance matrix: {0}")]
    DegenerateMatrix(String),

    #[error("clustering: {0}")]
    Clustering(String),
    #[error("dip test needs at least 4 points, got {0}")]
    TooFewPoints(usize),

    #[error("routing: {0}")]
    Routing(String),
    #[error("sample does not encode a tour; positions {positions:?} have zero or several nodes")]
    InvalidTspSample { positions: Vec<usize> },

    #[error("{customers} customers exceed the subset limit {limit}; sub-tour constraints grow exponentially")]
    SubsetLimit { customers: usize, limit: usize },

    #[error("config: {0}")]
    Config(String),
    #[error("instance file {0} does not exist")]
    MissingInstance(PathBuf),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}
