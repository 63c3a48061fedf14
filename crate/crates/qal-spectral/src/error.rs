//! Error type for field construction and spectral operations.

use thiserror::Error;

/// Failures raised by the spectral core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    /// A truncation radius below the allowed minimum.
    #[error("truncation radius must be at least {min}, got {got}")]
    InvalidTruncation { min: usize, got: usize },

    /// A coefficient vector whose length is not `2N+1`.
    #[error("expected {expected} coefficients for N = {n_max}, got {got}")]
    LengthMismatch { n_max: usize, expected: usize, got: usize },

    /// A projection radius outside `1..=N`.
    #[error("projection radius {m} outside 1..={n_max}")]
    ProjectionRadius { m: usize, n_max: usize },

    /// Coefficients that are not the spectrum of a real field.
    #[error("field is not Hermitian: max |c(-n) - conj c(n)| = {defect:e}")]
    NotHermitian { defect: f64 },

    /// A NaN or infinite coefficient.
    #[error("non-finite coefficient at n = {n}")]
    NonFinite { n: i64 },

    /// A transform length too short for the requested truncation.
    #[error("grid of {size} points cannot resolve N = {n_max} without aliasing")]
    GridTooSmall { size: usize, n_max: usize },

    /// A field paired with data of a different truncation.
    #[error("truncation mismatch: {left} vs {right}")]
    TruncationMismatch { left: usize, right: usize },

    /// Malformed field serialization.
    #[error("field JSON: {0}")]
    Json(String),
}
