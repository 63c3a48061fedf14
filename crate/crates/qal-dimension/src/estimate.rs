//! Least-squares dimension fits over a ladder of box sizes.

use serde::{Deserialize, Serialize};

use crate::boxcount::{box_count, GraphSamples};
use crate::error::DimensionError;

/// Smallest ladder accepted by [`fit_dimension`].
pub const MIN_LADDER: usize = 6;

/// Ladder entries dropped at each end before fitting.
pub const TRIMMED: usize = 2;

/// Fitted slope of `log N(E, ε)` against `log(1/ε)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DimensionEstimate {
    /// Box sizes in decreasing order.
    pub eps: Vec<f64>,
    /// Counts `N(E, ε)` per box size.
    pub counts: Vec<u64>,
    /// Index range `[start, end)` of the entries used by the fit.
    pub window: (usize, usize),
    /// The dimension estimate.
    pub slope: f64,
    /// Intercept of the fit.
    pub intercept: f64,
    /// Root-mean-square residual in natural-log units.
    pub residual: f64,
}

/// Box sizes `span·2^{−k}`, `k ≥ 2`, down to the resolution guard.
pub fn dyadic_ladder(g: &GraphSamples) -> Vec<f64> {
    let guard = g.resolution_guard();
    (2..)
        .map(|k| g.span() / f64::powi(2.0, k))
        .take_while(|&e| e >= guard * (1.0 - 1e-12))
        .collect()
}

/// Counts boxes at every size and fits the slope, dropping the two largest
/// and the two smallest sizes.
///
/// The ladder needs at least six distinct sizes inside the resolution
/// guard. It is sorted in decreasing order before counting.
pub fn fit_dimension(g: &GraphSamples, eps_ladder: &[f64]) -> Result<DimensionEstimate, DimensionError> {
    let mut eps = eps_ladder.to_vec();
    if eps.iter().any(|e| !e.is_finite() || *e <= 0.0) {
        return Err(DimensionError::DegenerateLadder("sizes must be positive".into()));
    }
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup();
    if eps.len() < MIN_LADDER {
        return Err(DimensionError::DegenerateLadder(format!(
            "{} distinct sizes, need {MIN_LADDER}",
            eps.len()
        )));
    }
    let counts = eps.iter().map(|&e| box_count(g, e)).collect::<Result<Vec<_>, _>>()?;
    let window = (TRIMMED, eps.len() - TRIMMED);
    let x: Vec<f64> = eps[window.0..window.1].iter().map(|e| -e.ln()).collect();
    let y: Vec<f64> = counts[window.0..window.1].iter().map(|&c| (c as f64).ln()).collect();
    let (slope, intercept, residual) = least_squares(&x, &y);
    Ok(DimensionEstimate {
        eps,
        counts,
        window,
        slope,
        intercept,
        residual,
    })
}

/// [`fit_dimension`] on [`dyadic_ladder`].
pub fn estimate_dimension(g: &GraphSamples) -> Result<DimensionEstimate, DimensionError> {
    fit_dimension(g, &dyadic_ladder(g))
}

fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    (slope, intercept, (ss / n).sqrt())
}
