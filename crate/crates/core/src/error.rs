//! Error types shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A series failed to reach the requested tolerance within the term cap.
    #[error("series did not converge: {0}")]
    NonConvergence(String),

    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    DomainError(String),

    /// A quadrature rule failed to converge or the integrand is non-integrable.
    #[error("quadrature failure: {0}")]
    QuadratureFailure(String),

    /// A truncated series cannot meet the requested tolerance at the
    /// configured truncation order.
    #[error("truncation error: {0}")]
    TruncationError(String),

    /// Numerical Laplace inversion produced an invalid density.
    #[error("Laplace inversion failure: {0}")]
    InversionFailure(String),

    /// A space grid does not resolve the initial datum.
    #[error("bandwidth error: {0}")]
    BandwidthError(String),

    /// Two fields live on different grids or times.
    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    /// A linear-algebra step failed (e.g. a covariance factorization).
    #[error("numerical error: {0}")]
    NumericalError(String),

    /// Invalid configuration of a model, process, or experiment.
    #[error("config error: {0}")]
    ConfigError(String),
}

pub type Result<T> = std::result::Result<T, Error>;
