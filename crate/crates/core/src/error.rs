use thiserror::Error;

/// Errors raised by the numerics layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inputs do not conform to each other (e.g. dimension mismatch).
    #[error("contract violation: {0}")]
    Contract(String),

    /// A hyperparameter estimator is not defined for the observed data.
    #[error("undefined estimator: {0}")]
    UndefinedEstimator(String),

    /// A truncated series or enumeration hit its term cap before reaching
    /// the requested tolerance.
    #[error("truncation: {terms} terms used, partial value {partial}, residual bound {bound:e}")]
    Truncation { partial: f64, bound: f64, terms: usize },

    /// Adaptive quadrature ran out of subdivisions.
    #[error("quadrature did not converge: partial value {partial}, error estimate {estimate:e}")]
    Quadrature { partial: f64, estimate: f64 },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
