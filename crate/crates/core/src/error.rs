use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside the region where the requested object is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// A factorization or linear-algebra step failed (e.g. a Gram matrix that is
    /// not numerically positive definite).
    #[error("numerical error: {0}")]
    Numerical(String),

    /// A truncated series, product or quadrature refinement did not reach its
    /// tolerance within the allowed budget.
    #[error("convergence error: {0}")]
    Convergence(String),

    #[error("unknown check: {0}")]
    UnknownCheck(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Stable machine-readable tag used in CLI error payloads.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DomainError",
            Error::Numerical(_) => "NumericalError",
            Error::Convergence(_) => "ConvergenceError",
            Error::UnknownCheck(_) => "UnknownCheckError",
            Error::Parse(_) => "ParseError",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
