use std::io;

use thiserror::Error;

/// Errors produced by generators, metrics and bound evaluators.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("total degree {0} is odd; pairing requires an even number of half-edges")]
    OddTotalDegree(u64),
    #[error("half-edge {0} is already paired")]
    AlreadyPaired(usize),
    #[error("vertex {vertex} out of range (graph has {n} vertices)")]
    VertexOutOfRange { vertex: u64, n: u64 },
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("core is empty")]
    EmptyCore,
    #[error("subgraph is not admissible: {0}")]
    Inadmissible(String),
    #[error("outside the formula's domain: {0}")]
    Domain(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
