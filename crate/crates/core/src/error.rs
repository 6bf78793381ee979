use thiserror::Error;

/// Errors raised anywhere in the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("point {0:?} lies outside the ambient set")]
    OutsideAmbient(Vec<f64>),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("empty field")]
    EmptyField,

    #[error("duplicate sites at indices {0} and {1}")]
    DuplicateSites(usize, usize),

    #[error("singular system: {0}")]
    Singular(String),

    #[error("unsupported quadrature order {0}")]
    UnsupportedQuadratureOrder(usize),

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("variant {0} is not a sum of squares")]
    NotSumOfSquares(String),

    #[error("non-finite loss at step {step}")]
    NonFinite { step: usize },

    #[error("io: {0}")]
    Io(String),

    #[error("parse: {0}")]
    Parse(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
