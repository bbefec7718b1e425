use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("field contains non-finite values")]
    NonFinite,
    #[error("backend mismatch: {0}")]
    BackendMismatch(String),
    #[error("ill-defined tail: {0}")]
    IllDefinedTail(String),
    #[error("integrand `{0}` has no derivative with respect to {1}")]
    MissingDerivative(String, &'static str),
    #[error("construction failed: {0}")]
    Construction(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed sidecar: {0}")]
    Sidecar(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
