use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("vector must have at least one entry")]
    EmptyVector,

    #[error("non-finite value at index {0}")]
    NonFinite(usize),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("malformed sparse matrix: {0}")]
    MalformedSparse(String),

    #[error("matrix is not row-stochastic: {0}")]
    NotStochastic(String),

    #[error("matrix is not a generator: {0}")]
    NotGenerator(String),

    #[error("uniformisation rate {rate} is below the largest exit rate {max_exit}")]
    InvalidRate { rate: f64, max_exit: f64 },

    #[error("initial vector is zero")]
    ZeroInitialVector,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("eigensolver failed: {0}")]
    EigenSolver(String),

    #[error("state space exceeds the limit of {limit} states")]
    StateSpaceOverflow { limit: usize },

    #[error("unknown model `{0}`")]
    UnknownModel(String),

    #[error("parse error ({context}): {message}")]
    Parse { context: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn parse(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            context: context.into(),
            message: message.into(),
        }
    }
}

pub(crate) fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
