use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("length mismatch: expected {expected} nodes, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("linear solve did not reach tolerance: backward error {residual:.3e} > {tol:.3e}")]
    LinearSolve { residual: f64, tol: f64 },

    #[error("factorization failed: {0}")]
    Factorization(String),

    #[error("singular reduced KKT system")]
    SingularKkt,

    #[error("invalid problem: {0}")]
    InvalidProblem(String),

    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: &'static str, reason: String },

    #[error("problem `{0}` has no exact solution")]
    NoExactSolution(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
