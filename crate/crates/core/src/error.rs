use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point {0} is not a row/column of the cost table")]
    UnknownPoint(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("restriction has zero mass")]
    ZeroMass,

    #[error("node {node} has infinite cost to every atom")]
    Uncovered { node: usize },

    #[error("m = {0} atoms exceeds the 2^m mass-table cap of 20")]
    TooManyAtoms(usize),

    #[error("polytope is empty")]
    EmptyPolytope,

    #[error(
        "target weights are not in the interior of the Hall polytope \
         (active {active:?}, violated {violated:?})"
    )]
    NotInterior { active: Vec<u32>, violated: Vec<u32> },

    #[error("solver hit the iteration cap with residual {residual:.3e}")]
    MaxIterExceeded { best: Vec<f64>, residual: f64 },

    #[error("no finite-cost plan exists")]
    Infeasible,

    #[error("pair set is not c-path-bounded (negative cycle {cycle:?})")]
    Unbounded { cycle: Vec<usize> },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
