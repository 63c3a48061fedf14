//! Invertible changes of variables on real periodic fields.
//!
//! [`interaction_picture`] removes the free phase `e^{itn⁵}` mode by mode.
//! [`k_functional`] evaluates `K(v) = (4i/5)∫v²`, and [`apply_k_gauge`]
//! multiplies mode `n` by `e^{±n∫K}`. [`GaugePhase`] holds a sampled `K(t)`
//! series with its running integral. [`tilde_snapshots`] applies the gauge
//! to a sequence of snapshots, which is how the solver's trajectories are
//! mapped to the smoothed variable `ũ`.
//!
//! Every map here multiplies each coefficient by a unimodular factor, so it
//! preserves every Sobolev norm.

pub mod phase;

pub use phase::{GaugePhase, GaugeRecorder, K_REAL_TOLERANCE};

use num_complex::Complex;
use qal_spectral::{Real, SpectralError, SpectralField};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Double-precision gauge phase.
pub type GaugePhase64 = GaugePhase<f64>;

/// Largest real part accepted in a running integral of `K`.
pub const MAX_REAL_PART: f64 = 1e-12;

/// Relative Hermitian defect tolerated by [`k_functional`].
pub const HERMITIAN_TOLERANCE: f64 = 1e-10;

/// Failures raised by the gauge transforms.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GaugeError {
    /// `K` is defined for real fields only.
    #[error("K-functional needs a real field: {0}")]
    NotReal(SpectralError),

    /// A gauge exponent with a real part would scale modes.
    #[error("cumulative K must be purely imaginary, real part {re:e} exceeds {MAX_REAL_PART:e}")]
    RealPart { re: f64 },

    /// A trajectory without a recorded `K` series.
    #[error("no K series recorded for this trajectory")]
    MissingSeries,

    /// A sample index the phase does not have.
    #[error("gauge sample {index} requested, but only {len} are recorded")]
    IndexOutOfRange { index: usize, len: usize },

    /// Malformed `K` samples.
    #[error("invalid gauge phase: {0}")]
    InvalidPhase(String),
}

/// Direction of the K-gauge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// Multiplies mode `n` by `e^{+n∫K}`.
    Forward,
    /// Multiplies mode `n` by `e^{−n∫K}`.
    Inverse,
}

impl Direction {
    /// The opposite direction.
    pub fn reversed(self) -> Self {
        match self {
            Direction::Forward => Direction::Inverse,
            Direction::Inverse => Direction::Forward,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Inverse => -1.0,
        }
    }
}

/// `n⁵` as a double. Exact for `|n| ≤ 1351`.
pub fn dispersion(n: i64) -> f64 {
    let x = n as f64;
    x * x * x * x * x
}

/// `e^{iθ}` evaluated in double precision and rounded to `T`.
fn unimodular<T: Real>(theta: f64) -> Complex<T> {
    Complex::new(T::lit(theta.cos()), T::lit(theta.sin()))
}

/// Interaction-picture variable `v̂(n) = e^{−itn⁵} û(n)`.
///
/// The inverse is the same map at `−t`, and `interaction_picture(u, −t)` is
/// the free evolution `W_t u`.
pub fn interaction_picture<T: Real>(u: &SpectralField<T>, t: T) -> SpectralField<T> {
    let t = t.as_f64();
    u.map_modes(|n, c| c * unimodular::<T>(-t * dispersion(n)))
}

/// Free evolution `e^{t∂_x⁵}`, that is `û(n) ↦ e^{itn⁵} û(n)`.
pub fn free_evolution<T: Real>(u: &SpectralField<T>, t: T) -> SpectralField<T> {
    interaction_picture(u, -t)
}

/// `K(v) = (4i/5) Σ |v̂(n)|²`, the imaginary multiple of the squared `L²`
/// norm under the normalized measure.
///
/// Fails when `v` is not the spectrum of a real field, measured relative to
/// its largest coefficient.
pub fn k_functional<T: Real>(v: &SpectralField<T>) -> Result<Complex<T>, GaugeError> {
    let tol = T::lit(HERMITIAN_TOLERANCE) * v.max_abs().max(T::one());
    v.validate_hermitian(tol).map_err(GaugeError::NotReal)?;
    Ok(k_functional_unchecked(v))
}

/// [`k_functional`] without the realness check.
pub fn k_functional_unchecked<T: Real>(v: &SpectralField<T>) -> Complex<T> {
    let l2 = v.weighted_sum_sq(|_| T::one());
    Complex::new(T::zero(), T::lit(0.8) * l2)
}

/// Multiplies mode `n` by `e^{±n·cumulative_k}`.
///
/// `cumulative_k` must be purely imaginary; a real part above
/// [`MAX_REAL_PART`] is rejected since it would grow or damp modes.
pub fn apply_k_gauge<T: Real>(
    f: &SpectralField<T>,
    cumulative_k: Complex<T>,
    direction: Direction,
) -> Result<SpectralField<T>, GaugeError> {
    let re = cumulative_k.re.as_f64();
    if !(re.abs() <= MAX_REAL_PART) {
        return Err(GaugeError::RealPart { re });
    }
    Ok(apply_imaginary_gauge(f, cumulative_k.im, direction))
}

/// Multiplies mode `n` by `e^{±i n θ}` for a real `θ = Im ∫K`.
pub fn apply_imaginary_gauge<T: Real>(f: &SpectralField<T>, theta: T, direction: Direction) -> SpectralField<T> {
    let theta = direction.sign() * theta.as_f64();
    f.map_modes(|n, c| c * unimodular::<T>(theta * n as f64))
}

/// Applies the K-gauge to each snapshot, pairing snapshot `i` with the
/// running integral of phase sample `i`.
///
/// In the forward direction this turns a solution `u` into `ũ` with
/// `ũ̂(n) = e^{n∫₀^t K} û(n)`.
pub fn tilde_snapshots<T: Real>(
    snapshots: &[SpectralField<T>],
    phase: Option<&GaugePhase<T>>,
    direction: Direction,
) -> Result<Vec<SpectralField<T>>, GaugeError> {
    let phase = phase.ok_or(GaugeError::MissingSeries)?;
    if phase.is_empty() && !snapshots.is_empty() {
        return Err(GaugeError::MissingSeries);
    }
    if phase.len() != snapshots.len() {
        return Err(GaugeError::InvalidPhase(format!(
            "{} snapshots but {} gauge samples",
            snapshots.len(),
            phase.len()
        )));
    }
    Ok(snapshots
        .iter()
        .zip(phase.cumulative())
        .map(|(f, &theta)| apply_imaginary_gauge(f, theta, direction))
        .collect())
}
