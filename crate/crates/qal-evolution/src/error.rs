//! Error type for time integration.

use qal_gauge::GaugeError;
use qal_spectral::SpectralError;
use thiserror::Error;

/// Failures raised by the solver and the oracle.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum EvolutionError {
    /// Invalid configuration or parameters.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// A field with the wrong truncation or realness.
    #[error(transparent)]
    Spectral(#[from] SpectralError),

    /// A failure in the gauge bookkeeping.
    #[error(transparent)]
    Gauge(#[from] GaugeError),

    /// A step produced NaN or infinite coefficients.
    #[error("non-finite coefficients after the step ending at t = {time}")]
    NonFinite { time: f64 },

    /// The oracle was asked for a truncation beyond its cost limit.
    #[error("oracle supports N ≤ {max}, got {got}")]
    OracleTooLarge { max: usize, got: usize },

    /// The adaptive integrator gave up.
    #[error("oracle integration failed: {0}")]
    Oracle(String),
}
