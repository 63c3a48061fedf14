//! Exact arithmetic on integer frequency tuples.
//!
//! The phase `Φ_p(n_1, …, n_p) = (Σ n_i)^5 − Σ n_i^5` of the fifth-order
//! dispersion governs every normal-form step. This crate evaluates it and
//! its closed forms exactly, classifies tuples by resonance type, evaluates
//! the normal-form multipliers as exact rationals, checks the pointwise and
//! summed identities they satisfy, and sweeps multiplier bounds over dyadic
//! frequency shells. No floating point enters any verdict.

mod arith;
pub mod cancellation;
pub mod classify;
pub mod error;
pub mod identities;
pub mod phase;
pub mod sweep;
pub mod symbols;
pub mod tuple;

pub use cancellation::{
    cancellation_multilinear, cancellation_sum, h_pairing_radius, is_exact_zero, slot_broken_control, CancellationKind,
    RationalField, H_PAIRING_EXTERNAL_FREQUENCY,
};
pub use classify::{
    cascade_ratio, classify, classify_with, large_phase, PhaseThreshold, ResonanceCase, DEFAULT_THRESHOLD, SEPARATION,
};
pub use error::PhaseError;
pub use identities::{
    check_factorizations, check_re1_combination, check_resonant_reduction, check_telescoping, verify_re1_combination,
    verify_resonant_reduction, IdentityReport,
};
pub use phase::{
    phi, phi2_factored, phi3_factored, phi_i128, phi_raw, tail_sums, telescope_decompose, telescope_decompose_sorted,
    PhaseValue,
};
pub use sweep::{
    bound_ratio_sweep, exhaustive_max, relative_spread, sweep_shell, BoundId, BoundSweep, ShellReport, SweepConfig,
    SweepMode,
};
pub use symbols::{eval_raw, eval_symbol, eval_symbol_with, RawSymbol, SymbolId, SymbolValue};
pub use tuple::{sorted_by_magnitude, top_pair_multiplicity, FreqTuple};

/// Arbitrary-precision integer.
pub type Int = num_bigint::BigInt;
/// Arbitrary-precision rational.
pub type Rational = num_rational::BigRational;
/// Complex number with exact rational parts.
pub type ExactComplex = num_complex::Complex<Rational>;
