use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("empty input: {0}")]
    Empty(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("seed coordinate {index} is zero")]
    ZeroSeed { index: usize },

    #[error("map is not a homomorphism: {0}")]
    NotHomomorphism(String),

    #[error("endomorphisms do not commute")]
    NonCommuting,

    #[error("no concordance witness found")]
    NotConcordant,

    #[error("invalid certificate: {0}")]
    InvalidCertificate(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("malformed document: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}
