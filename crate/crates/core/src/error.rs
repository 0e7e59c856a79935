use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("degenerate map: {0}")]
    Degenerate(String),

    #[error("numerator and denominator share a common factor of degree {common_degree}; reduced map has degree {reduced_degree}")]
    CommonFactor {
        common_degree: usize,
        reduced_degree: usize,
    },

    #[error("resource cap exceeded: {0}")]
    ResourceCap(String),

    #[error("{prime} is a prime of bad reduction")]
    BadReduction { prime: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("{0} is not prime")]
    NotPrime(String),

    #[error("cache line {line}: {msg}")]
    Cache { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub fn cap(msg: impl Into<String>) -> Self {
        Error::ResourceCap(msg.into())
    }

    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::ResourceCap(_) => 2,
            Error::Invariant(_) => 3,
            _ => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
