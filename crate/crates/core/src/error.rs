use thiserror::Error;

use crate::hypergraph::MAX_VERTICES;

#[derive(Debug, Error)]
pub enum Error {
    #[error("vertex {vertex} out of range for hypergraph on {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },

    #[error("triple {0:?} repeats a vertex")]
    RepeatedVertex([usize; 3]),

    #[error("hypergraph order {0} exceeds the supported maximum of {MAX_VERTICES}")]
    TooManyVertices(usize),

    #[error("{0} requires a nonempty vertex set")]
    EmptyVertexSet(&'static str),

    #[error("invalid matching: {0}")]
    InvalidMatching(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("vertex sets overlap or contain the link center")]
    OverlappingSets,

    #[error("pattern {mask:#011b} is not a copy of B113")]
    NotB113 { mask: u16 },

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("refusing exhaustive enumeration of {count} partitions (cap {cap})")]
    EnumerationCap { count: u128, cap: u128 },

    #[error("absorption failed: {0}")]
    Absorption(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
