use thiserror::Error;

/// Errors produced by the numerical kernels and the verification harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NonConvergence { sweeps: usize, off_norm: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: String, found: String },

    #[error("parameter error: {0}")]
    Param(String),

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max asymmetry {0:e})")]
    NotHermitian(f64),

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("matrix is not positive semidefinite (min eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("Bloch vector norm {0} exceeds 1")]
    Norm(f64),

    #[error("state vector has zero norm")]
    ZeroVector,

    #[error("support condition violated: {0}")]
    Support(String),

    #[error("probability vector not normalized: {0}")]
    Normalization(String),

    #[error("channel is not trace preserving (max deviation {0:e})")]
    NotTracePreserving(f64),

    #[error("unknown property `{0}`")]
    UnknownProperty(String),

    #[error("reproduction outside tolerance: {0}")]
    Tolerance(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
