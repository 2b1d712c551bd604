pub mod bench;
pub mod cluster;
pub mod error;
pub mod full;
pub mod instance;
pub mod qubo;
pub mod routing;
pub mod sampler;
pub mod solution;
pub mod validate;

pub use error::{Error, Result};
