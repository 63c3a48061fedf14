//! Error type for exact phase and symbol computations.

use thiserror::Error;

/// Failures raised by the exact-arithmetic layer.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PhaseError {
    /// A tuple shorter than the operation requires.
    #[error("tuple needs at least {min} entries, got {got}")]
    TooShort { min: usize, got: usize },

    /// A zero entry where frequencies must be nonzero.
    #[error("entry {index} of the tuple is zero")]
    ZeroEntry { index: usize },

    /// A symbol evaluated on a tuple of the wrong length.
    #[error("symbol {symbol} takes {expected} frequencies, got {got}")]
    Arity {
        symbol: String,
        expected: usize,
        got: usize,
    },

    /// An active symbol whose denominator vanishes, or an index outside the
    /// symbol's definition.
    #[error("symbol {symbol} undefined at {tuple:?}: {reason}")]
    Domain {
        symbol: String,
        tuple: Vec<i64>,
        reason: String,
    },

    /// A telescoping decomposition whose tail sum vanishes.
    #[error("tail sum ñ_{index} vanishes for {tuple:?}")]
    DegenerateTail { index: usize, tuple: Vec<i64> },

    /// Invalid arguments to an identity check.
    #[error("identity arguments outside the domain: {0}")]
    IdentityDomain(String),

    /// A field that is not the spectrum of a real function when one is required.
    #[error("rational field is not Hermitian at n = {n}")]
    NotHermitian { n: i64 },

    /// Mismatched field truncations in a multilinear form.
    #[error("fields have different truncations: {0} vs {1}")]
    TruncationMismatch(usize, usize),

    /// A non-finite float offered where an exact rational is needed.
    #[error("coefficient at n = {n} is not a finite number")]
    NotRational { n: i64 },

    /// A sweep request outside the supported range.
    #[error("sweep request rejected: {0}")]
    Sweep(String),
}
