use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum QError {
    /// An argument lies outside the operation's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// A nested evaluation hit its term cap before meeting the tolerance.
    #[error("no convergence after {terms} terms (estimated tail {est_tail:e})")]
    NonConvergence { terms: usize, est_tail: f64 },
    /// The integrand could not be evaluated at a grid point.
    #[error("integrand evaluation failed at t = {t}: {message}")]
    Evaluation { t: f64, message: String },
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

pub type Result<T> = std::result::Result<T, QError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(QError::Domain(msg.into()))
}
