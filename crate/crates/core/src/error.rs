use thiserror::Error;

/// Errors produced by the `lwpm` library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("zero divisor")]
    ZeroDivisor,

    #[error("zero polynomial has no Toeplitz operator")]
    ZeroPolynomial,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("empty matrix")]
    EmptyMatrix,

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("instance too large for exhaustive search ({vars} variables, cap {cap})")]
    TooLarge { vars: usize, cap: usize },

    #[error("degree bound n={n} must exceed deg(P)={degree}")]
    DegreeBound { n: usize, degree: usize },

    #[error("zero multiple excluded")]
    ZeroMultiple,

    #[error("zero assignment is forbidden")]
    ZeroAssignment,

    #[error("empty neighbourhood")]
    EmptyNeighbourhood,

    #[error("{divisor} does not divide {dividend}")]
    NotDivisible { divisor: String, dividend: String },

    #[error("invalid solver config: {0}")]
    InvalidConfig(String),

    #[error("reduction identity violated: {0}")]
    Counterexample(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn parse(position: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            position,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
