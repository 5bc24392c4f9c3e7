use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("matrix is singular: {0}")]
    Singular(String),

    #[error("eigenvalue {re:.3e}{im:+.3e}i lies on the branch cut of the principal square root")]
    Branch { re: f64, im: f64 },

    #[error("order {requested} exceeds the configured cap {cap}")]
    Capacity { requested: usize, cap: usize },

    #[error("no convergence after {iterations} iterations (last step {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("point outside the natural domain: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn dim_err(what: impl Into<String>) -> Error {
    Error::Dimension(what.into())
}
