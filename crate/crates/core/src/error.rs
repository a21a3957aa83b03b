use thiserror::Error;

/// Errors raised by model construction and the numerical routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not Hermitian (defect {defect:.3e} exceeds {tol:.3e})")]
    NotHermitian { defect: f64, tol: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("gap violation: eigenvalue {value:.6e} lies in the annulus [{tol:.3e}, {gap:.6e})")]
    GapViolation { value: f64, tol: f64, gap: f64 },

    #[error("vertical gap undefined")]
    VerticalGapUndefined,

    #[error("no kernel")]
    NoKernel,

    #[error("model not metric: seminorm vanishes on a non-scalar element (residual {0:.3e})")]
    NotMetric(f64),

    #[error("window {window} exceeds the reliable window {limit} of the model")]
    WindowExceeded { window: f64, limit: f64 },

    #[error("problem too large for the oracle: {params} real parameters (limit {limit})")]
    TooLarge { params: usize, limit: usize },

    #[error("{0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
