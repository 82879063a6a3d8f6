use thiserror::Error;

/// Errors produced by the library layer.
#[derive(Debug, Error)]
pub enum SplitError {
    #[error("dimension mismatch: vectors live on different spaces ({left} vs {right})")]
    DimensionMismatch { left: usize, right: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("schedule violation at iteration {iteration}: {detail}")]
    Schedule { iteration: usize, detail: String },

    #[error("step-size certificate rejected: {detail} (computed value {value})")]
    CertificateRejected { detail: String, value: f64 },

    #[error("certificate scheme mismatch: expected {expected}, got {got}")]
    CertificateScheme { expected: String, got: String },

    #[error("operator norm estimation did not converge within {iterations} iterations (best estimate {best})")]
    NormEstimateFailed { iterations: usize, best: f64 },

    #[error("non-finite value produced in {context}")]
    NonFinite { context: String },

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, SplitError>;
