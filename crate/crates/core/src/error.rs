use std::path::PathBuf;

use crate::graph::Edge;

/// Errors produced by graph construction, the spectral kernel and the removal algorithms.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("edge ({}, {}) is not in the graph", .0.u, .0.v)]
    UnknownEdge(Edge),

    #[error("node {0} is not in the graph")]
    UnknownNode(usize),

    #[error("graph has no edges")]
    NoEdges,

    #[error("walk counts overflowed at k = {k} with scale {scale}; use a larger scale")]
    Overflow { k: usize, scale: f64 },

    #[error("power iteration did not converge{}: lambda ~ {estimate}, residual {residual:e} after {iterations} iterations",
        step.map(|s| format!(" at step {s}")).unwrap_or_default())]
    NotConverged {
        estimate: f64,
        residual: f64,
        iterations: usize,
        step: Option<usize>,
    },

    #[error("instance too large for exhaustive search: {0}")]
    SizeGuard(String),

    #[error("cover target {target} unreachable: covered {covered} after picking {picked} edges")]
    Unreachable {
        target: f64,
        covered: f64,
        picked: usize,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn at_step(self, index: usize) -> Self {
        match self {
            Error::NotConverged {
                estimate,
                residual,
                iterations,
                ..
            } => Error::NotConverged {
                estimate,
                residual,
                iterations,
                step: Some(index),
            },
            other => other,
        }
    }
}
