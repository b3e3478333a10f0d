use thiserror::Error;

/// Errors produced by hypergraph construction, fitting, and the experiment harnesses.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("edge {edge} references node {node}, but the hypergraph has {n} nodes")]
    OutOfRangeNode { edge: usize, node: usize, n: usize },

    #[error("edge {edge} is degenerate: {reason}")]
    DegenerateEdge { edge: usize, reason: String },

    #[error("edge {edge} has negative weight {weight}")]
    NegativeWeight { edge: usize, weight: f64 },

    #[error("edge {edge} has no usable weight under the explicit weight scheme")]
    MissingWeight { edge: usize },

    #[error("dimension mismatch: expected {expected}, got {got} ({what})")]
    DimensionMismatch { what: &'static str, expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no labeled nodes")]
    NoLabels,

    #[error("singular system: {unlabeled_components} connected component(s) without a labeled node ({unlabeled_nodes} nodes)")]
    SingularSystem { unlabeled_components: usize, unlabeled_nodes: usize },

    #[error("solver did not converge within {iterations} iterations")]
    MaxIterExceeded { iterations: usize },

    #[error("empty membership list for out-of-sample prediction")]
    EmptyMembership,

    #[error("no sparsistency certificate exists for the {0} model")]
    NoCertificate(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("label column `{0}` not found")]
    MissingLabelColumn(String),

    #[error("input contains no data rows")]
    EmptyData,

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
