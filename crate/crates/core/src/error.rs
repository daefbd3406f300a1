use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A projection or superposition produced a state of (numerically) zero norm.
    #[error("degenerate outcome: {0}")]
    Degenerate(String),

    /// A size limit (basis dimension, Fock cutoff, dense solver limit) was exceeded.
    #[error("resource limit exceeded: {0}")]
    Resource(String),

    /// The iterative eigensolver stopped before meeting its residual target.
    #[error("eigensolver did not converge after {iterations} iterations (best residual {best_residual:.3e})")]
    Convergence { iterations: usize, best_residual: f64 },

    /// An internal consistency check failed.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
