//! Real periodic fields on the torus as truncated Fourier series.
//!
//! A [`SpectralField`] stores the coefficients `c(n)`, `n = -N..=N`, of a
//! field `u(x) = Σ c(n) e^{inx}` with the mean in the `n = 0` slot. All
//! integrals use the normalized measure `dx/(2π)`. [`SpectralGrid`] moves
//! between coefficients and uniform samples, and [`random_sobolev_data`]
//! draws the seeded rough ensembles used by the experiments.
//!
//! The numerics are generic over [`Real`] (`f32` or `f64`); the aliases
//! below fix the common double-precision choice.

pub mod error;
pub mod field;
pub mod grid;
pub mod random;
pub mod scalar;

pub use error::SpectralError;
pub use field::{sobolev_weight_sq, SpectralField};
pub use grid::{next_smooth, transform_size, GridBuffers, SpectralGrid};
pub use random::{random_sobolev_data, stream_rng, stream_seed};
pub use scalar::Real;

pub use num_complex::Complex;

/// Double-precision field.
pub type Field64 = SpectralField<f64>;
/// Single-precision field.
pub type Field32 = SpectralField<f32>;
/// Double-precision grid.
pub type Grid64 = SpectralGrid<f64>;
/// Double-precision complex scalar.
pub type C64 = Complex<f64>;

/// Sobolev norm of `f` at regularity `s`; see [`SpectralField::sobolev_norm`].
pub fn sobolev_norm<T: Real>(f: &SpectralField<T>, s: T) -> T {
    f.sobolev_norm(s)
}

/// Truncation to `|n| ≤ m`; see [`SpectralField::project_modes`].
pub fn project_modes<T: Real>(f: &SpectralField<T>, m: usize) -> Result<SpectralField<T>, SpectralError> {
    f.project_modes(m)
}
