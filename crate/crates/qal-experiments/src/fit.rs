//! Least-squares power-law fits of spectral tails.

use qal_spectral::Field64;
use serde::{Deserialize, Serialize};

/// A fit `|û(n)| ≈ A n^{−decay}` on a frequency window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailFit {
    /// Decay exponent, the negated slope of `log|û(n)|` against `log n`.
    pub decay: f64,
    /// Intercept `log A`.
    pub intercept: f64,
    /// Root-mean-square residual of the fit in natural-log units.
    pub residual: f64,
    /// Number of modes used.
    pub points: usize,
}

/// Frequencies `⌈N/8⌉..=⌊N/2⌋` of the default fit window.
pub fn default_window(n_max: usize) -> (usize, usize) {
    (n_max.div_ceil(8).max(1), (n_max / 2).max(1))
}

/// Ordinary least squares of `y` on `x`; returns slope, intercept and the
/// root-mean-square residual. `None` with fewer than two distinct `x`.
pub fn least_squares(x: &[f64], y: &[f64]) -> Option<(f64, f64, f64)> {
    let n = x.len().min(y.len());
    if n < 2 {
        return None;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let sxx: f64 = x[..n].iter().map(|a| (a - mx) * (a - mx)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = x[..n].iter().zip(&y[..n]).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x[..n]
        .iter()
        .zip(&y[..n])
        .map(|(a, b)| {
            let r = b - (intercept + slope * a);
            r * r
        })
        .sum();
    Some((slope, intercept, (ss / n as f64).sqrt()))
}

/// Fits `log|û(n)|` against `log n` over `lo..=hi`, skipping zero modes.
///
/// `None` when fewer than two modes in the window are nonzero.
pub fn fit_tail(f: &Field64, lo: usize, hi: usize) -> Option<TailFit> {
    let hi = hi.min(f.n_max());
    let (x, y): (Vec<f64>, Vec<f64>) = (lo.max(1)..=hi)
        .filter_map(|n| {
            let a = f.coeff(n as i64).norm();
            (a > 0.0).then(|| ((n as f64).ln(), a.ln()))
        })
        .unzip();
    let (slope, intercept, residual) = least_squares(&x, &y)?;
    Some(TailFit {
        decay: -slope,
        intercept,
        residual,
        points: x.len(),
    })
}
