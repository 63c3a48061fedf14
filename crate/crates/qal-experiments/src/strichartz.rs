//! Space-time `L⁸` norms of free evolutions against Sobolev norms of data.

use num_complex::Complex;
use qal_spectral::{next_smooth, random_sobolev_data, Field64, GridBuffers, SpectralGrid};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ExperimentError;
use crate::fit::least_squares;

/// Lebesgue exponent of the probe.
pub const STRICHARTZ_EXPONENT: u32 = 8;

/// Extra regularity on the data side, `‖f‖_{H^{a+δ}}`.
pub const REGULARITY_MARGIN: f64 = 0.01;

/// Initial number of uniform time points on `[0, 2π)`.
pub const DEFAULT_TIME_POINTS: usize = 256;

/// Relative change under time-grid doubling below which the norm is accepted.
pub const REFINEMENT_TOLERANCE: f64 = 0.01;

/// Largest time grid the refinement may reach.
pub const MAX_TIME_POINTS: usize = 1 << 15;

/// Regularity of the random probe data.
pub const RANDOM_DATA_REGULARITY: f64 = 0.5;

/// Largest max/min ratio over the ladder counted as non-diverging.
pub const BOUNDED_SPREAD: f64 = 3.0;

/// An `L⁸_{x,t}(𝕋²)` norm with its time-grid refinement record.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct L8Norm {
    /// `(mean over x and t of |W_t f|⁸)^{1/8}` with the normalized measure.
    pub norm: f64,
    /// Time points of the accepted grid.
    pub time_points: usize,
    /// Relative change at the last doubling.
    pub last_change: f64,
    /// Whether the last doubling changed the norm by less than 1%.
    pub converged: bool,
}

/// Denominator of the time-grid offset; prime.
const OFFSET_DENOMINATOR: i128 = 1_000_003;

/// Numerator of the offset, about `0.618` of the denominator.
const OFFSET_NUMERATOR: i128 = 618_035;

/// Exact phase `e^{it_j n⁵}` at `t_j = 2π(j + θ)/J`, `θ = 618035/1000003`.
///
/// `(jQ + r)n⁵ mod JQ` is reduced in integer arithmetic. The offset keeps
/// every sample time away from rationals with small denominators, where
/// the free flow refocuses and the integrand spikes.
fn time_phase(n: i64, j: usize, points: usize) -> Complex<f64> {
    let m = points as i128 * OFFSET_DENOMINATOR;
    let n5 = (n as i128).pow(5).rem_euclid(m);
    let numerator = j as i128 * OFFSET_DENOMINATOR + OFFSET_NUMERATOR;
    let r = (numerator * n5).rem_euclid(m);
    let theta = std::f64::consts::TAU * (r as f64 / m as f64);
    Complex::new(theta.cos(), theta.sin())
}

struct SpaceTimeSampler<'a> {
    f: &'a Field64,
    grid: SpectralGrid<f64>,
    buf: GridBuffers<f64>,
}

impl<'a> SpaceTimeSampler<'a> {
    fn new(f: &'a Field64) -> Self {
        let size = next_smooth(STRICHARTZ_EXPONENT as usize * f.n_max() + 1);
        let grid = SpectralGrid::with_size(size);
        let buf = grid.buffers();
        Self { f, grid, buf }
    }

    /// `Σ_x |W_t f(x)|⁸` at `t = 2πj/J`.
    fn power_sum(&mut self, j: usize, points: usize) -> f64 {
        let n_max = self.f.n_max() as i64;
        let coeffs: Vec<Complex<f64>> = (-n_max..=n_max)
            .map(|n| self.f.coeff(n) * time_phase(n, j, points))
            .collect();
        self.grid
            .synthesize_into(&coeffs, &mut self.buf)
            .expect("grid resolves the truncation");
        self.buf
            .data
            .iter()
            .map(|z| z.norm_sqr().powi(STRICHARTZ_EXPONENT as i32 / 2))
            .sum()
    }

    fn size(&self) -> usize {
        self.grid.size()
    }
}

/// `‖W_t f‖_{L⁸(𝕋_x × 𝕋_t)}`, spectral in `x` and trapezoidal in `t`.
///
/// The space grid has more than `8N` points, so the `x`-average of the
/// trigonometric polynomial `|W_t f|⁸` is exact. Time uses `J` uniform
/// points `2π(j + θ)/J` with a fixed offset `θ ∈ (0, 1)`, starting at
/// `time_points` and doubling until the norm changes by less than 1% or
/// [`MAX_TIME_POINTS`] is reached.
pub fn l8_space_time_norm(f: &Field64, time_points: usize) -> L8Norm {
    let mut sampler = SpaceTimeSampler::new(f);
    let size = sampler.size();
    let mut mean_at = |points: usize| {
        let sum: f64 = (0..points).map(|j| sampler.power_sum(j, points)).sum();
        (sum / (points * size) as f64).powf(0.125)
    };
    let mut points = time_points.max(1);
    let mut norm = mean_at(points);
    let mut last_change = f64::INFINITY;
    while points < MAX_TIME_POINTS {
        points *= 2;
        let refined = mean_at(points);
        last_change = if norm > 0.0 { (refined - norm).abs() / norm } else { 0.0 };
        norm = refined;
        if last_change < REFINEMENT_TOLERANCE {
            break;
        }
    }
    L8Norm {
        norm,
        time_points: points,
        last_change,
        converged: last_change < REFINEMENT_TOLERANCE,
    }
}

/// The Dirichlet kernel `Σ_{|n|≤N} e^{inx}`.
pub fn dirichlet_kernel(n_max: usize) -> Field64 {
    Field64::from_fn(n_max, |_| Complex::new(1.0, 0.0))
}

/// The single mode `e^{iNx}` in truncation `N`.
pub fn single_mode(n_max: usize) -> Field64 {
    let mut f = Field64::zeros(n_max);
    f.set(n_max as i64, Complex::new(1.0, 0.0));
    f
}

/// `‖W_t f‖_{L⁸}` against `‖f‖_{H^{a+δ}}` for one function.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RatioSample {
    /// Truncation.
    #[serde(rename = "N")]
    pub n: usize,
    /// The space-time norm.
    pub l8: L8Norm,
    /// `‖f‖_{H^{a+δ}}`.
    pub sobolev: f64,
    /// `l8.norm / sobolev`.
    pub ratio: f64,
}

/// Ratio of one function at regularity `a + δ`.
pub fn strichartz_ratio(f: &Field64, a_test: f64) -> RatioSample {
    let l8 = l8_space_time_norm(f, DEFAULT_TIME_POINTS);
    let sobolev = f.sobolev_norm(a_test + REGULARITY_MARGIN);
    RatioSample {
        n: f.n_max(),
        l8,
        sobolev,
        ratio: if sobolev > 0.0 { l8.norm / sobolev } else { 0.0 },
    }
}

/// A ladder of ratios with its spread and trend.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioLadder {
    /// Seed-mean ratio per truncation.
    pub ratios: Vec<f64>,
    /// `max / min` over the ladder.
    pub spread: f64,
    /// Least-squares slope of `log ratio` against `log N`.
    pub trend: Option<f64>,
    /// `spread ≤ 3`.
    pub bounded: bool,
}

impl RatioLadder {
    fn new(n_ladder: &[usize], ratios: Vec<f64>) -> Self {
        let max = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let min = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        let spread = if min > 0.0 { max / min } else { f64::INFINITY };
        let x: Vec<f64> = n_ladder.iter().map(|&n| (n as f64).ln()).collect();
        let y: Vec<f64> = ratios.iter().map(|r| r.ln()).collect();
        let trend = least_squares(&x, &y).map(|f| f.0);
        Self {
            ratios,
            spread,
            trend,
            bounded: spread <= BOUNDED_SPREAD,
        }
    }
}

/// Strichartz-ratio probe over a ladder of truncations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StrichartzProbe {
    /// Lebesgue exponent `p = 8`.
    pub exponent: u32,
    /// Tested loss `a`.
    pub a_test: f64,
    /// Regularity of the data norm, `a + δ`.
    pub regularity: f64,
    /// Truncations.
    pub n_ladder: Vec<usize>,
    /// Seeds of the random data.
    pub seeds: Vec<u64>,
    /// Dirichlet-kernel samples per truncation.
    pub dirichlet: Vec<RatioSample>,
    /// Random-data samples per truncation, in seed order.
    pub random: Vec<Vec<RatioSample>>,
    /// The Dirichlet ladder.
    pub dirichlet_ladder: RatioLadder,
    /// The seed-averaged random ladder.
    pub random_ladder: Option<RatioLadder>,
    /// Whether every time grid converged.
    pub converged: bool,
}

/// Measures `‖W_t f‖_{L⁸}/‖f‖_{H^{a+δ}}` for the Dirichlet kernel and for
/// `random_sobolev_data(1/2, N, seed)` at every `N` of the ladder.
///
/// Truncations run in parallel and are merged in ladder order.
pub fn strichartz_probe(a_test: f64, n_ladder: &[usize], seeds: &[u64]) -> Result<StrichartzProbe, ExperimentError> {
    if !(a_test >= 0.0 && a_test.is_finite()) {
        return Err(ExperimentError::Config(format!(
            "a_test = {a_test} must be nonnegative"
        )));
    }
    if n_ladder.is_empty() || n_ladder.contains(&0) {
        return Err(ExperimentError::Config(
            "the N ladder must be nonempty and positive".into(),
        ));
    }
    let rows: Vec<(RatioSample, Vec<RatioSample>)> = n_ladder
        .par_iter()
        .map(|&n| {
            let d = strichartz_ratio(&dirichlet_kernel(n), a_test);
            let r = seeds
                .iter()
                .map(|&seed| strichartz_ratio(&random_sobolev_data(RANDOM_DATA_REGULARITY, n, seed), a_test))
                .collect();
            (d, r)
        })
        .collect();
    let (dirichlet, random): (Vec<_>, Vec<_>) = rows.into_iter().unzip();
    let dirichlet_ladder = RatioLadder::new(n_ladder, dirichlet.iter().map(|d| d.ratio).collect());
    let random_ladder = (!seeds.is_empty()).then(|| {
        let means = random
            .iter()
            .map(|row: &Vec<RatioSample>| row.iter().map(|r| r.ratio).sum::<f64>() / row.len() as f64)
            .collect();
        RatioLadder::new(n_ladder, means)
    });
    let converged = dirichlet.iter().chain(random.iter().flatten()).all(|r| r.l8.converged);
    Ok(StrichartzProbe {
        exponent: STRICHARTZ_EXPONENT,
        a_test,
        regularity: a_test + REGULARITY_MARGIN,
        n_ladder: n_ladder.to_vec(),
        seeds: seeds.to_vec(),
        dirichlet,
        random,
        dirichlet_ladder,
        random_ladder,
        converged,
    })
}
