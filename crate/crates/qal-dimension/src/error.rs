//! Errors of the dimension estimators.

use qal_evolution::EvolutionError;
use qal_spectral::SpectralError;
use thiserror::Error;

/// Failure of a box count, fit or rational-time snapshot.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DimensionError {
    /// Fewer samples than the estimator needs.
    #[error("need at least {min} samples, got {got}")]
    TooFewSamples { min: usize, got: usize },

    /// Sample points that are not strictly increasing and uniform.
    #[error("sample points are not uniformly spaced: {0}")]
    NonUniform(String),

    /// Non-finite sample values.
    #[error("non-finite sample value at index {0}")]
    NonFinite(usize),

    /// A box size below four sample spacings.
    #[error("eps = {eps} is below the resolution guard {guard}")]
    BelowResolution { eps: f64, guard: f64 },

    /// A ladder the fit cannot use.
    #[error("degenerate eps ladder: {0}")]
    DegenerateLadder(String),

    /// `q = 0` or `gcd(p, q) ≠ 1`.
    #[error("rational time {p}/{q} must have q ≥ 1 and gcd(p, q) = 1")]
    BadRational { p: i64, q: u64 },

    /// A time outside the trajectory.
    #[error("t = {t} is outside the trajectory range [{start}, {end}]")]
    TimeOutOfRange { t: f64, start: f64, end: f64 },

    /// Spectral-field failure.
    #[error(transparent)]
    Spectral(#[from] SpectralError),

    /// Trajectory failure.
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
}
