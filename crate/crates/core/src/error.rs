use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown graph family `{0}`")]
    UnknownFamily(String),

    #[error("invalid parameters for `{family}`: {message}")]
    InvalidParams { family: String, message: String },

    #[error("non-finite matrix entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },

    #[error("not PSD within tolerance: lambda_min = {lambda_min:e}, tol = {tol:e}")]
    NotPsd { lambda_min: f64, tol: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("SDP solver did not converge after {iterations} iterations (primal {primal:e}, dual {dual:e}, gap {gap:e})")]
    SdpNotConverged {
        iterations: usize,
        primal: f64,
        dual: f64,
        gap: f64,
    },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    EigenNotConverged { iterations: usize, residual: f64 },

    #[error("theta bound undefined for m = 0")]
    NoEdges,

    #[error("domain error: {0}")]
    Domain(String),

    #[error("series did not reach tolerance {tol:e} within {terms} terms (tail bound {tail:e})")]
    SlowConvergence { terms: usize, tail: f64, tol: f64 },

    #[error("{what} supports at most {cap} vertices, graph has {n}")]
    TooLarge {
        what: &'static str,
        cap: usize,
        n: usize,
    },

    #[error("vector {index} is not unit norm (norm {norm})")]
    NotUnit { index: usize, norm: f64 },

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        source: Box<Error>,
    },
}

impl Error {
    /// Innermost error, skipping stage annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } => source.root(),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
