//! Free evolution at rational multiples of `2π`.
//!
//! Since `n⁵ ≡ n (mod 30)`, the free flow at `t = 2πp/q` with `q | 30`
//! multiplies mode `n` by `e^{2πipn/q}`. That is a translation by `2πp/q`.

use num_integer::Integer;
use qal_spectral::{Complex, Real, SpectralField};
use serde::{Deserialize, Serialize};

use crate::error::DimensionError;

/// Denominators for which rational-time free evolution is a translation.
pub const TALBOT_MODULUS: u64 = 30;

fn check_rational(p: i64, q: u64) -> Result<(), DimensionError> {
    if q == 0 || (p.unsigned_abs()).gcd(&q) != 1 {
        return Err(DimensionError::BadRational { p, q });
    }
    Ok(())
}

/// `e^{2πir/q}` for an integer residue `r` already reduced mod `q`.
fn root_of_unity<T: Real>(r: u64, q: u64) -> Complex<T> {
    let theta = std::f64::consts::TAU * r as f64 / q as f64;
    Complex::new(T::lit(theta.cos()), T::lit(theta.sin()))
}

fn residue(p: i64, power: u32, n: i64, q: u64) -> u64 {
    let m = q as i128;
    let np = (n as i128).rem_euclid(m).pow(power).rem_euclid(m);
    ((p as i128).rem_euclid(m) * np).rem_euclid(m) as u64
}

/// Free evolution `W_t g` at `t = 2πp/q`, the multiplier `e^{2πipn⁵/q}`.
///
/// `pn⁵ mod q` is reduced in integer arithmetic before exponentiation.
pub fn talbot_snapshot<T: Real>(g: &SpectralField<T>, p: i64, q: u64) -> Result<SpectralField<T>, DimensionError> {
    check_rational(p, q)?;
    Ok(g.map_modes(|n, c| c * root_of_unity::<T>(residue(p, 5, n, q), q)))
}

/// Translate `g(· + 2πp/q)`, the multiplier `e^{2πipn/q}`.
pub fn rational_translate<T: Real>(g: &SpectralField<T>, p: i64, q: u64) -> Result<SpectralField<T>, DimensionError> {
    check_rational(p, q)?;
    Ok(g.map_modes(|n, c| c * root_of_unity::<T>(residue(p, 1, n, q), q)))
}

/// Comparison of a rational-time snapshot with the translate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TalbotCheck {
    /// Numerator.
    pub p: i64,
    /// Denominator.
    pub q: u64,
    /// Whether `q` divides 30.
    pub divides_modulus: bool,
    /// Largest coefficient difference between snapshot and translate.
    pub max_discrepancy: f64,
    /// Whether snapshot and translate are bitwise equal.
    pub bitwise_equal: bool,
}

/// Computes both [`talbot_snapshot`] and [`rational_translate`] and
/// compares them.
pub fn talbot_check<T: Real>(g: &SpectralField<T>, p: i64, q: u64) -> Result<TalbotCheck, DimensionError> {
    let snapshot = talbot_snapshot(g, p, q)?;
    let translate = rational_translate(g, p, q)?;
    Ok(TalbotCheck {
        p,
        q,
        divides_modulus: TALBOT_MODULUS % q == 0,
        max_discrepancy: snapshot.max_abs_diff(&translate).as_f64(),
        bitwise_equal: snapshot == translate,
    })
}
