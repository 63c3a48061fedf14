//! Dimension of the graphs of a solution and of its Duhamel part.

use qal_evolution::{Trajectory64, Variable};
use qal_gauge::{free_evolution, interaction_picture};
use qal_spectral::{Complex, Field64, Grid64};
use serde::{Deserialize, Serialize};

use crate::boxcount::GraphSamples;
use crate::error::DimensionError;
use crate::estimate::{estimate_dimension, DimensionEstimate};

/// The band `2 − s ≤ D(u) ≤ upper(s)` expected for almost every time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DimensionBand {
    /// Regularity of the data.
    pub s: f64,
    /// Lower bound `2 − s`.
    pub lower: f64,
    /// Piecewise upper bound.
    pub upper: f64,
}

/// The band at regularity `s`, defined for `35/64 < s < 1`.
///
/// The upper bound is `115/32 − 3s` up to `s = 263/480`, then `39/20` up
/// to `s = 11/20`, then `5/2 − s`.
pub fn dimension_band(s: f64) -> Option<DimensionBand> {
    if !(s > 35.0 / 64.0 && s < 1.0) {
        return None;
    }
    let upper = if s <= 263.0 / 480.0 {
        115.0 / 32.0 - 3.0 * s
    } else if s <= 11.0 / 20.0 {
        39.0 / 20.0
    } else {
        2.5 - s
    };
    Some(DimensionBand {
        s,
        lower: 2.0 - s,
        upper,
    })
}

/// Dimensions of the real and imaginary parts of one field.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PartDimensions {
    /// Estimate for the real part.
    pub re: DimensionEstimate,
    /// Estimate for the imaginary part.
    pub im: DimensionEstimate,
    /// `D(f) = max(D(Re f), D(Im f))`.
    pub d: f64,
}

/// Graphs of `Re f` and `Im f` on `sample_count` uniform points of one
/// period, closed at `2π`.
///
/// The parts are split in coefficient space, `Re f ↔ (c(n) + c̄(−n))/2`, so
/// the imaginary part of a real field samples to exact zeros.
pub fn field_graphs(f: &Field64, sample_count: usize) -> Result<(GraphSamples, GraphSamples), DimensionError> {
    let grid = Grid64::with_size(sample_count);
    let re_part = f.map_modes(|n, c| (c + f.coeff(-n).conj()) * 0.5);
    let im_part = f.map_modes(|n, c| (c - f.coeff(-n).conj()) * Complex::new(0.0, -0.5));
    let re = grid.synthesize_real(&re_part)?;
    let im = grid.synthesize_real(&im_part)?;
    Ok((GraphSamples::periodic(&re)?, GraphSamples::periodic(&im)?))
}

/// [`PartDimensions`] of a field on the dyadic ladder.
pub fn field_dimension(f: &Field64, sample_count: usize) -> Result<PartDimensions, DimensionError> {
    let (re, im) = field_graphs(f, sample_count)?;
    let re = estimate_dimension(&re)?;
    let im = estimate_dimension(&im)?;
    let d = re.slope.max(im.slope);
    Ok(PartDimensions { re, im, d })
}

/// Dimensions of `ũ(t)` and of `ũ(t) − W_tu₀`, with the band at `s`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionDimension {
    /// Requested time.
    pub t: f64,
    /// Samples per period.
    pub sample_count: usize,
    /// The gauged solution.
    pub tilde: PartDimensions,
    /// The Duhamel difference.
    pub difference: PartDimensions,
    /// The band at the run's regularity, when in range.
    pub band: Option<DimensionBand>,
    /// Whether `D(ũ)` lies in the band. Advisory: the band holds for
    /// almost every time, not at every sampled one.
    pub within_band: Option<bool>,
}

/// `ũ(t)` from a trajectory, interpolated between snapshots in the
/// interaction picture of the gauged variable.
///
/// At a snapshot time this is the gauged snapshot itself.
pub fn gauged_state_at(traj: &Trajectory64, t: f64) -> Result<Field64, DimensionError> {
    let tilde = match traj.variable {
        Variable::Solution => traj.tilde_transform()?,
        Variable::Tilde => traj.clone(),
    };
    let times = &tilde.times;
    let (start, end) = (times[0], times[times.len() - 1]);
    if !(t >= start && t <= end) {
        return Err(DimensionError::TimeOutOfRange { t, start, end });
    }
    if let Some(i) = times.iter().position(|&s| s == t) {
        return Ok(tilde.snapshots[i].clone());
    }
    let i = times.iter().rposition(|&s| s < t).expect("t lies above the first time");
    let (t0, t1) = (times[i], times[i + 1]);
    let w = (t - t0) / (t1 - t0);
    let v0 = interaction_picture(&tilde.snapshots[i], t0);
    let v1 = interaction_picture(&tilde.snapshots[i + 1], t1);
    let v = v0.scaled(1.0 - w).add(&v1.scaled(w))?;
    Ok(free_evolution(&v, t))
}

/// Box-counting dimensions of `ũ(t)` and `ũ(t) − W_tu₀`.
///
/// `s` is the regularity of the data the trajectory started from; the band
/// is only reported for `35/64 < s < 1`.
pub fn dimension_of_solution(
    traj: &Trajectory64,
    t: f64,
    sample_count: usize,
    s: Option<f64>,
) -> Result<SolutionDimension, DimensionError> {
    let tilde = gauged_state_at(traj, t)?;
    let free = free_evolution(traj.initial_state(), t);
    let difference = tilde.sub(&free)?;
    let tilde = field_dimension(&tilde, sample_count)?;
    let difference = field_dimension(&difference, sample_count)?;
    let band = s.and_then(dimension_band);
    let within_band = band.map(|b| tilde.d >= b.lower && tilde.d <= b.upper);
    Ok(SolutionDimension {
        t,
        sample_count,
        tilde,
        difference,
        band,
        within_band,
    })
}
