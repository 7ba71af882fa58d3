use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("degenerate triangle: {0}")]
    Degenerate(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("convergence failure: {0}")]
    Convergence(String),
    #[error("eigensolver did not converge: residual {residual:.3e} after {iterations} iterations")]
    SolverNonConvergence { residual: f64, iterations: usize },
    #[error("mesh is not reflection compatible: {0}")]
    NotReflectionCompatible(String),
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
