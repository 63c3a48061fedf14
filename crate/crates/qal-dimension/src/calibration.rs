//! Functions with known graph dimension.

use qal_spectral::{Complex, Field64};

/// `log 2 / log 3`, the Hölder exponent of the calibration Weierstrass sum.
pub fn weierstrass_holder() -> f64 {
    2f64.ln() / 3f64.ln()
}

/// Box dimension `2 − log 2/log 3 ≈ 1.369` of the Weierstrass graph.
pub fn weierstrass_dimension() -> f64 {
    2.0 - weierstrass_holder()
}

/// `Σ_{k<terms} 2^{−k} cos(3^k x)`.
pub fn weierstrass(x: f64, terms: u32) -> f64 {
    (0..terms)
        .map(|k| 0.5f64.powi(k as i32) * (3f64.powi(k as i32) * x).cos())
        .sum()
}

/// The square wave `sign(sin x)`, with value 0 at the jumps.
pub fn square_wave(x: f64) -> f64 {
    let s = x.sin();
    if s.abs() < 1e-15 {
        0.0
    } else {
        s.signum()
    }
}

/// Fourier truncation of the square wave: `c(n) = −2i/(πn)` for odd `n`.
pub fn step_data(n_max: usize) -> Field64 {
    Field64::from_fn(n_max, |n| {
        if n % 2 == 0 {
            Complex::new(0.0, 0.0)
        } else {
            Complex::new(0.0, -2.0 / (std::f64::consts::PI * n as f64))
        }
    })
}
