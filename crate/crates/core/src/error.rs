//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("negative probability {value} at {location}")]
    NegativeProbability { location: String, value: f64 },

    #[error("row {row} sums to {sum}, deviation exceeds {tolerance}")]
    RowSumViolation { row: String, sum: f64, tolerance: f64 },

    #[error("unknown variable `{0}`")]
    UnknownVariable(String),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("feasibility solver stalled: {0}")]
    SolverStall(String),

    #[error("grid of {count} schemes exceeds the limit of {limit}")]
    GridTooLarge { count: f64, limit: f64 },

    #[error("enumeration needs {states} states, limit is {limit}")]
    EnumerationTooLarge { states: f64, limit: u64 },

    #[error("joint table of {entries} entries exceeds the limit of {limit}")]
    JointTooLarge { entries: usize, limit: usize },

    #[error("positive-part expansion produced {pieces} pieces (limit {limit})")]
    PieceExplosion { pieces: usize, limit: usize },

    #[error("piece has more than {limit} vertices")]
    VertexEnumerationOverflow { limit: usize },

    #[error("linear program is unbounded in direction {0:?}")]
    Unbounded(Vec<f64>),

    #[error("slice is empty for every piece")]
    EmptySlice,

    #[error("region has no nonempty piece")]
    EmptyRegion,

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Stable machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch(_) => "DimensionMismatch",
            Error::NegativeProbability { .. } => "NegativeProbability",
            Error::RowSumViolation { .. } => "RowSumViolation",
            Error::UnknownVariable(_) => "UnknownVariable",
            Error::Invalid(_) => "Invalid",
            Error::SolverStall(_) => "SolverStall",
            Error::GridTooLarge { .. } => "GridTooLarge",
            Error::EnumerationTooLarge { .. } => "EnumerationTooLarge",
            Error::JointTooLarge { .. } => "JointTooLarge",
            Error::PieceExplosion { .. } => "PieceExplosion",
            Error::VertexEnumerationOverflow { .. } => "VertexEnumerationOverflow",
            Error::Unbounded(_) => "Unbounded",
            Error::EmptySlice => "EmptySlice",
            Error::EmptyRegion => "EmptyRegion",
            Error::Internal(_) => "Internal",
            Error::Io(_) => "Io",
            Error::Json(_) => "Json",
        }
    }

    /// Process exit code: 2 input validation, 3 resource guard, 4 internal.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::GridTooLarge { .. }
            | Error::EnumerationTooLarge { .. }
            | Error::JointTooLarge { .. }
            | Error::PieceExplosion { .. }
            | Error::VertexEnumerationOverflow { .. } => 3,
            Error::Internal(_) | Error::SolverStall(_) | Error::Unbounded(_) => 4,
            _ => 2,
        }
    }
}
