use thiserror::Error;

/// Errors produced by graph construction, numerics and the modification strategies.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("graph has no nodes")]
    EmptyGraph,

    #[error("node {node} ({label}) has no outgoing weight")]
    DanglingNode { node: usize, label: String },

    #[error("graph is not strongly connected ({components} components, largest has {largest} of {n} nodes)")]
    NotStronglyConnected {
        n: usize,
        components: usize,
        largest: usize,
    },

    #[error(
        "power iteration did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NotConverged {
        iterations: usize,
        residual: f64,
        last_iterate: Vec<f64>,
        residual_history: Vec<f64>,
    },

    #[error("no existing links point to any target node")]
    EmptySupport,

    #[error("invalid input: {0}")]
    Validation(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(message: impl Into<String>) -> Error {
    Error::Validation(message.into())
}
