//! Binary polynomial modeling and QUBO compilation.

mod compiled;
mod poly;
mod registry;

pub use compiled::QuboCompiled;
pub use poly::BinaryPolynomial;
pub use registry::{binary_slack_weights, ArrayEntry, ArrayKind, VariableRegistry};
