use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("invalid sampled function: {0}")]
    InvalidSamples(String),

    #[error("Hermitian symmetry violated (max defect {defect:e})")]
    SymmetryViolation { defect: f64 },

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("history does not cover t = {t} (available from {available_from})")]
    HistoryGap { t: f64, available_from: f64 },

    #[error("Picard iteration did not converge after {iterations} iterations (last ratio {ratio:.4}, residual {residual:e})")]
    PicardNonConvergence {
        iterations: usize,
        ratio: f64,
        residual: f64,
    },

    #[error("blow-up at t = {t}: norm {norm:e} exceeds threshold {threshold:e}")]
    BlowUp { t: f64, norm: f64, threshold: f64 },

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
