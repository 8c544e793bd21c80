use thiserror::Error;

/// Errors raised anywhere in the pipeline.
///
/// The variants map one-to-one onto the exit codes of the command-line tool,
/// see [`Error::exit_code`].
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("p = {0} is not prime")]
    NotPrime(u64),

    #[error("polynomial is not homogeneous")]
    NotHomogeneous,

    #[error("hypersurface is singular: Jacobian quotient is nonzero in degree {witness_degree}")]
    Singular { witness_degree: usize },

    #[error("{0} is not invertible at this precision")]
    NotInvertible(u64),

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("refinement did not stabilize within {0} passes")]
    RefinementUnstable(usize),

    #[error("corank bound nonzero")]
    CorankNonzero,

    #[error("enumeration cap exceeded: {candidates} candidates > cap {cap}")]
    CapExceeded { candidates: u128, cap: u128 },

    #[error("resource limit: {0}")]
    ResourceLimit(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("io: {0}")]
    Io(String),
}

impl Error {
    /// Process exit code for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Input(_) | Error::NotPrime(_) | Error::NotHomogeneous | Error::Io(_) => 2,
            Error::Singular { .. } => 3,
            Error::PrecisionExhausted(_) | Error::RefinementUnstable(_) => 4,
            Error::CapExceeded { .. } => 5,
            Error::ResourceLimit(_) => 6,
            Error::NotInvertible(_)
            | Error::CorankNonzero
            | Error::Unsupported(_)
            | Error::Internal(_) => 1,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
