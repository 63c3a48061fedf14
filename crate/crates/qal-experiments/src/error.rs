//! Errors of the experiment drivers.

use qal_evolution::EvolutionError;
use qal_spectral::SpectralError;
use thiserror::Error;

/// Failure of an experiment driver.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    /// Unusable configuration.
    #[error("invalid experiment configuration: {0}")]
    Config(String),
    /// The solver rejected its inputs.
    #[error(transparent)]
    Evolution(#[from] EvolutionError),
    /// A spectral operation failed.
    #[error(transparent)]
    Spectral(#[from] SpectralError),
}
