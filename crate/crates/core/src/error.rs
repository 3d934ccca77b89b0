use thiserror::Error;

/// Errors raised by graph construction, spectral routines, transforms and solvers.
#[derive(Debug, Error)]
pub enum GlctError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("numerical failure: {0}")]
    NumericalFailure(String),

    #[error("construction failure: {0}")]
    ConstructionFailure(String),

    #[error("search failure: {0}")]
    SearchFailure(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl GlctError {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        GlctError::InvalidParameter(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        GlctError::NumericalFailure(msg.into())
    }

    /// True for failures caused by bad input rather than by the numerics.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            GlctError::InvalidParameter(_)
                | GlctError::DimensionMismatch { .. }
                | GlctError::Parse { .. }
                | GlctError::Csv(_)
                | GlctError::Json(_)
        )
    }
}

pub type Result<T, E = GlctError> = std::result::Result<T, E>;

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(GlctError::DimensionMismatch { expected, found })
    }
}
