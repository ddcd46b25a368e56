use thiserror::Error;

/// Errors raised by the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not symmetric (max defect {0:e})")]
    NotSymmetric(f64),

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("inadmissible configuration: {0}")]
    Inadmissible(String),

    #[error("invalid quadrature spec: {0}")]
    InvalidQuadrature(String),

    #[error("missing coverage: {0}")]
    Coverage(String),

    #[error("unsupported catalog member: {0}")]
    Unsupported(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// True for errors that stem from an inadmissible or inconsistent configuration,
    /// as opposed to I/O failures.
    pub fn is_config(&self) -> bool {
        !matches!(self, Error::Io(_) | Error::Csv(_))
    }
}
