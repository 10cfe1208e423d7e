//! Stability, effective-resistance and robustness analysis of weighted
//! consensus networks with signed and uncertain edge weights.
//!
//! The numerical core is generic over [`Real`] (`f32`, `f64`); the aliases at
//! the crate root fix the scalar to `f64`, which is what the command-line
//! tool and the acceptance suite use.

pub mod error;
pub mod experiment;
pub mod graph;
pub mod linalg;
pub mod resistance;
pub mod robustness;
pub mod scalar;
pub mod simulation;
pub mod spectral;
pub mod stability;

pub use error::{Error, Result};
pub use graph::{build_graph, Components, Edge, NegativeCut, SignedPartition};
pub use scalar::Real;
pub use spectral::Signature;

pub type Graph = graph::WeightedGraph<f64>;
pub type Forest = graph::ForestDecomposition<f64>;
