//! Column-interval box counting on sampled graphs.

use serde::{Deserialize, Serialize};

use crate::error::DimensionError;

/// Smallest number of samples accepted, `2¹²`.
pub const MIN_SAMPLES: usize = 1 << 12;

/// Smallest box size as a multiple of the sample spacing.
pub const RESOLUTION_GUARD: f64 = 4.0;

/// Relative tolerance of the uniform-spacing check.
const SPACING_TOLERANCE: f64 = 1e-9;

/// A function sampled at uniformly spaced, strictly increasing points.
///
/// The graph is the polyline through the samples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphSamples {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl GraphSamples {
    /// Validates and wraps the samples.
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self, DimensionError> {
        if xs.len() != ys.len() {
            return Err(DimensionError::NonUniform(format!(
                "{} points but {} values",
                xs.len(),
                ys.len()
            )));
        }
        if xs.len() < MIN_SAMPLES {
            return Err(DimensionError::TooFewSamples {
                min: MIN_SAMPLES,
                got: xs.len(),
            });
        }
        if let Some(i) = xs.iter().chain(&ys).position(|v| !v.is_finite()) {
            return Err(DimensionError::NonFinite(i % xs.len()));
        }
        let h = (xs[xs.len() - 1] - xs[0]) / (xs.len() - 1) as f64;
        if !(h > 0.0) {
            return Err(DimensionError::NonUniform("points are not increasing".into()));
        }
        for (i, w) in xs.windows(2).enumerate() {
            let step = w[1] - w[0];
            if !(step > 0.0) || (step - h).abs() > SPACING_TOLERANCE * h.max(xs[0].abs()) {
                return Err(DimensionError::NonUniform(format!(
                    "spacing {step} at index {i}, expected {h}"
                )));
            }
        }
        Ok(Self { xs, ys })
    }

    /// Samples `f` at `x_k = 2πk/intervals`, `k = 0..=intervals`.
    pub fn from_fn(intervals: usize, f: impl Fn(f64) -> f64) -> Result<Self, DimensionError> {
        let xs: Vec<f64> = (0..=intervals)
            .map(|k| std::f64::consts::TAU * k as f64 / intervals.max(1) as f64)
            .collect();
        let ys = xs.iter().map(|&x| f(x)).collect();
        Self::new(xs, ys)
    }

    /// Closes one period of values on `x_k = 2πk/M`, `k < M`, by appending
    /// the value at `2π`.
    pub fn periodic(values: &[f64]) -> Result<Self, DimensionError> {
        let m = values.len();
        let xs = (0..=m)
            .map(|k| std::f64::consts::TAU * k as f64 / m.max(1) as f64)
            .collect();
        let mut ys = values.to_vec();
        ys.push(values.first().copied().unwrap_or(0.0));
        Self::new(xs, ys)
    }

    /// Sample points.
    pub fn xs(&self) -> &[f64] {
        &self.xs
    }

    /// Sample values.
    pub fn ys(&self) -> &[f64] {
        &self.ys
    }

    /// Number of samples.
    pub fn len(&self) -> usize {
        self.xs.len()
    }

    /// Always false; a graph has at least [`MIN_SAMPLES`] samples.
    pub fn is_empty(&self) -> bool {
        self.xs.is_empty()
    }

    /// Uniform spacing.
    pub fn spacing(&self) -> f64 {
        (self.xs[self.xs.len() - 1] - self.xs[0]) / (self.xs.len() - 1) as f64
    }

    /// Length of the sampled interval.
    pub fn span(&self) -> f64 {
        self.xs[self.xs.len() - 1] - self.xs[0]
    }

    /// Smallest admissible box size, four spacings.
    pub fn resolution_guard(&self) -> f64 {
        RESOLUTION_GUARD * self.spacing()
    }

    /// Polyline value at `x` inside the sampled interval.
    fn value_at(&self, x: f64) -> f64 {
        let h = self.spacing();
        let last = self.xs.len() - 1;
        let pos = ((x - self.xs[0]) / h).clamp(0.0, last as f64);
        let i = (pos.floor() as usize).min(last - 1);
        let w = pos - i as f64;
        self.ys[i] * (1.0 - w) + self.ys[i + 1] * w
    }
}

/// Number of `eps × eps` cells met by the polyline graph.
///
/// Columns start at the first sample point and rows at `y = 0`. Within each
/// column the graph covers the interval between its smallest and largest
/// value, including the interpolated values on the column edges, and every
/// cell meeting that interval is counted.
pub fn box_count(g: &GraphSamples, eps: f64) -> Result<u64, DimensionError> {
    let guard = g.resolution_guard();
    if !(eps.is_finite() && eps >= guard * (1.0 - 1e-12)) {
        return Err(DimensionError::BelowResolution { eps, guard });
    }
    let x0 = g.xs[0];
    let columns = ((g.span() / eps) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    let mut lo = vec![f64::INFINITY; columns];
    let mut hi = vec![f64::NEG_INFINITY; columns];
    for (&x, &y) in g.xs.iter().zip(&g.ys) {
        let j = (((x - x0) / eps).floor() as usize).min(columns - 1);
        lo[j] = lo[j].min(y);
        hi[j] = hi[j].max(y);
    }
    for j in 1..columns {
        let y = g.value_at(x0 + j as f64 * eps);
        for k in [j - 1, j] {
            lo[k] = lo[k].min(y);
            hi[k] = hi[k].max(y);
        }
    }
    Ok(lo
        .iter()
        .zip(&hi)
        .map(|(&a, &b)| ((b / eps).floor() - (a / eps).floor()) as u64 + 1)
        .sum())
}
