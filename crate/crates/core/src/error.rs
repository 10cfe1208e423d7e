use thiserror::Error;

use crate::spectral::Signature;

/// Errors produced by graph construction and analysis.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("graph must have at least one node")]
    EmptyGraph,

    #[error("edge {index} ({tail}, {head}) is a self-loop")]
    SelfLoop { index: usize, tail: usize, head: usize },

    #[error("edge {index} ({tail}, {head}) duplicates edge {first} on the same node pair")]
    DuplicateEdge {
        index: usize,
        first: usize,
        tail: usize,
        head: usize,
    },

    #[error("edge {index} ({tail}, {head}) references a node outside 0..{node_count}")]
    NodeOutOfRange {
        index: usize,
        tail: usize,
        head: usize,
        node_count: usize,
    },

    #[error("edge {index} ({tail}, {head}) has invalid weight {weight}: weights must be finite and nonzero")]
    InvalidWeight {
        index: usize,
        tail: usize,
        head: usize,
        weight: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("nodes {u} and {v} lie in different components: effective resistance is infinite")]
    InfiniteResistance { u: usize, v: usize },

    #[error("graph is disconnected ({components} components)")]
    Disconnected { components: usize },

    #[error("{what} is singular (smallest/largest singular value ratio {ratio:e})")]
    Singular { what: &'static str, ratio: f64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("network is not nominally stable: signature {signature}")]
    NotNominallyStable { signature: Signature },

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("step size {dt:e} violates the stability guard: dt must be below {bound:e}")]
    StepTooLarge { dt: f64, bound: f64 },

    #[error("could not generate a connected graph after {attempts} attempts; try a larger radius")]
    Generation { attempts: usize },

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error("graph file: {0}")]
    Format(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
