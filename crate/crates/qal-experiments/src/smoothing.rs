//! Nonlinear smoothing of the gauged solution relative to the free flow.
//!
//! For data `u₀` of regularity `s` the difference `ũ(t) − W_t u₀` between
//! the gauged solution and the free evolution is expected to be smoother
//! than `u₀` by some `ε > 0`. The experiment measures this as the change
//! in power-law decay of the Fourier tail.

use qal_evolution::{solve, Config64, Params64, SolveError, SolverConfig, Trajectory64};
use qal_spectral::{random_sobolev_data, Field64};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::ExperimentError;
use crate::fit::{default_window, fit_tail, least_squares, TailFit};

/// Regularity above which the toy equation is well posed.
pub const WELL_POSEDNESS_THRESHOLD: f64 = 35.0 / 64.0;

/// Loss `a` in the `L⁸` Strichartz estimate used by the smoothing theorem.
pub const STRICHARTZ_LOSS: f64 = 3.0 / 32.0;

/// Default upper bound on the RMS residual of an acceptable tail fit.
pub const DEFAULT_RESIDUAL_THRESHOLD: f64 = 0.75;

/// Supremum of admissible smoothing gains `min(2s − 1 − a, 1)` at
/// regularity `s`, clamped at 0.
pub fn epsilon_ceiling(s: f64) -> f64 {
    (2.0 * s - 1.0 - STRICHARTZ_LOSS).clamp(0.0, 1.0)
}

/// Parameters of a smoothing measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingConfig {
    /// Gain the measurement is compared against; also the extra
    /// regularity of the reported time series.
    pub epsilon_target: f64,
    /// Truncations to run; the last one carries the headline gain.
    pub n_ladder: Vec<usize>,
    /// Horizon.
    pub t_end: f64,
    /// Step; `None` uses [`SolverConfig::default_dt`] for each `N`.
    pub dt: Option<f64>,
    /// Amplitudes `λ` of the scaling ladder at the largest `N`; empty skips it.
    pub amplitudes: Vec<f64>,
    /// Run amplitude `λ` with step `dt/λ`, following the stability budget.
    pub scale_dt_with_amplitude: bool,
    /// Number of snapshots in the time series.
    pub time_samples: usize,
    /// Largest acceptable RMS residual of a difference fit.
    pub residual_threshold: f64,
}

impl Default for SmoothingConfig {
    fn default() -> Self {
        Self {
            epsilon_target: 0.25,
            n_ladder: vec![64, 128, 256],
            t_end: 0.005,
            dt: None,
            amplitudes: vec![1.0, 0.5, 0.25],
            scale_dt_with_amplitude: false,
            time_samples: 20,
            residual_threshold: DEFAULT_RESIDUAL_THRESHOLD,
        }
    }
}

impl SmoothingConfig {
    /// Checks that the ladder, horizon and amplitudes are usable.
    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.n_ladder.is_empty() {
            return Err(ExperimentError::Config("empty N ladder".into()));
        }
        if !(self.t_end > 0.0 && self.t_end.is_finite()) {
            return Err(ExperimentError::Config(format!(
                "horizon {} must be positive",
                self.t_end
            )));
        }
        if !self.epsilon_target.is_finite() {
            return Err(ExperimentError::Config("non-finite target gain".into()));
        }
        if self.amplitudes.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
            return Err(ExperimentError::Config("amplitudes must be positive".into()));
        }
        if let Some(dt) = self.dt {
            if !(dt > 0.0 && dt.is_finite()) {
                return Err(ExperimentError::Config(format!("step {dt} must be positive")));
            }
        }
        Ok(())
    }

    fn step_for(&self, n: usize, amplitude: f64) -> f64 {
        let base = self.dt.unwrap_or_else(|| SolverConfig::<f64>::default_dt(n));
        if self.scale_dt_with_amplitude {
            base / amplitude
        } else {
            base
        }
    }
}

/// Conditions attached to a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmoothingFlag {
    /// The equation is linear; the difference vanishes and no gain exists.
    Linear,
    /// `s ≤ 35/64`, outside the well-posedness range.
    BelowThreshold,
    /// A tail fit was missing or its residual exceeded the threshold.
    Inconclusive,
    /// Some run stopped early.
    Unstable,
    /// `‖ũ − W_tu₀‖_{H^s} ≤ ‖ũ‖_{H^s} + ‖u₀‖_{H^s}` failed somewhere.
    EnvelopeViolated,
}

/// One seed at one truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedSmoothing {
    /// Seed of the data.
    pub seed: u64,
    /// Tail of `u₀`.
    pub data_fit: Option<TailFit>,
    /// Tail of `ũ(T) − W_T u₀`.
    pub difference_fit: Option<TailFit>,
    /// `difference decay − data decay`.
    pub gain: Option<f64>,
    /// `sup_t ‖ũ − W_tu₀‖_{H^s}` over the snapshots.
    pub sup_difference: f64,
    /// Whether the triangle envelope held at every snapshot.
    pub envelope_ok: bool,
    /// Why the run stopped early, if it did.
    pub aborted: Option<String>,
}

/// Seed-averaged `‖ũ − W_tu₀‖_{H^{s+ε}}` at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeSample {
    /// Time.
    pub t: f64,
    /// Seed mean of the norm.
    pub norm: f64,
}

/// Seed RMS of `|û₀(n)|` and `|ũ(T) − W_Tu₀|^(n)` at one frequency.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TailSample {
    /// Frequency.
    pub n: usize,
    /// Data modulus.
    pub data: f64,
    /// Difference modulus.
    pub difference: f64,
}

/// Results at one truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderPoint {
    /// Truncation.
    #[serde(rename = "N")]
    pub n: usize,
    /// Step used.
    pub dt: f64,
    /// Fit window `[lo, hi]`.
    pub window: (usize, usize),
    /// Per-seed results in seed order.
    pub seeds: Vec<SeedSmoothing>,
    /// Seed mean of the data decay.
    pub data_decay: Option<f64>,
    /// Seed mean of the difference decay.
    pub difference_decay: Option<f64>,
    /// Seed mean of the gain.
    pub gain: Option<f64>,
    /// Sample standard deviation of the per-seed gains.
    pub gain_spread: Option<f64>,
    /// Largest difference-fit residual over the seeds.
    pub max_residual: Option<f64>,
    /// Time series of the seed-averaged `H^{s+ε}` norm of the difference.
    pub time_series: Vec<TimeSample>,
    /// Seed-RMS spectra at the horizon for external plotting.
    pub tail_spectrum: Vec<TailSample>,
}

/// The amplitude ladder `λ u₀` at the largest truncation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmplitudeScaling {
    /// Truncation.
    #[serde(rename = "N")]
    pub n: usize,
    /// Amplitudes.
    pub amplitudes: Vec<f64>,
    /// Steps used per amplitude.
    pub steps: Vec<f64>,
    /// Seed mean of `sup_t ‖ũ − W_tu₀‖_{H^s}` per amplitude.
    pub sup_norms: Vec<f64>,
    /// `(sup(λ)/sup(λ₀)) / (λ/λ₀)²` against the first amplitude.
    pub ratio_to_square: Vec<f64>,
    /// Least-squares slope of `log sup` against `log λ`.
    pub exponent: Option<f64>,
    /// RMS residual of that fit.
    pub residual: Option<f64>,
}

/// Full smoothing measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SmoothingReport {
    /// Regularity of the data.
    pub s: f64,
    /// Target gain.
    pub epsilon_target: f64,
    /// Admissible ceiling `min(2s − 1 − a, 1)`.
    pub epsilon_ceiling: f64,
    /// Equation coefficients.
    pub params: Params64,
    /// Horizon.
    pub t_end: f64,
    /// Truncations.
    pub n_ladder: Vec<usize>,
    /// Results per truncation.
    pub ladder: Vec<LadderPoint>,
    /// Gain at the largest truncation; `None` if undefined or inconclusive.
    pub measured_gain: Option<f64>,
    /// Amplitude ladder, when requested.
    pub amplitude_scaling: Option<AmplitudeScaling>,
    /// Conditions attached to the result.
    pub flags: Vec<SmoothingFlag>,
    /// Human-readable notes.
    pub warnings: Vec<String>,
}

impl SmoothingReport {
    /// Whether a flag is set.
    pub fn has_flag(&self, flag: SmoothingFlag) -> bool {
        self.flags.contains(&flag)
    }
}

struct Plan<'a> {
    s: f64,
    seeds: &'a [u64],
    cfg: &'a SmoothingConfig,
}

struct SeedRun {
    summary: SeedSmoothing,
    series: Vec<(f64, f64)>,
    data_abs: Vec<f64>,
    difference_abs: Vec<f64>,
}

fn hs_norm(f: &Field64, s: f64) -> f64 {
    f.sobolev_norm(s)
}

/// The difference `ũ(t) − W_tu₀` at every snapshot of a solution trajectory.
pub fn duhamel_difference(traj: &Trajectory64) -> Result<Vec<Field64>, ExperimentError> {
    let tilde = traj.tilde_transform()?;
    tilde
        .snapshots
        .iter()
        .zip(traj.free_reference())
        .map(|(a, b)| a.sub(&b).map_err(ExperimentError::from))
        .collect()
}

fn run_seed(
    plan: &Plan<'_>,
    params: &Params64,
    n: usize,
    amplitude: f64,
    seed: u64,
) -> Result<SeedRun, ExperimentError> {
    let (cfg, s) = (plan.cfg, plan.s);
    let u0 = random_sobolev_data(s, n, seed).scaled(amplitude);
    let dt = cfg.step_for(n, amplitude);
    let probe = Config64::new(n, cfg.t_end).with_dt(dt);
    let (steps, _) = probe.step_plan();
    let stride = (steps / cfg.time_samples.max(1)).max(1);
    let solver_cfg = probe
        .with_snapshot_stride(stride)
        .with_diagnostic_stride(stride)
        .with_sobolev_indices(vec![s]);
    let (traj, aborted) = match solve(&u0, params, &solver_cfg) {
        Ok(traj) => (traj, None),
        Err(SolveError::Aborted(a)) => {
            let reason = a.to_string();
            (*a.partial, Some(reason))
        }
        Err(SolveError::Invalid(e)) => return Err(e.into()),
    };
    let differences = duhamel_difference(&traj)?;
    let tilde = traj.tilde_transform()?;
    let u0 = traj.initial_state();
    let u0_norm = hs_norm(u0, s);
    let envelope_ok = differences
        .iter()
        .zip(&tilde.snapshots)
        .all(|(d, ut)| hs_norm(d, s) <= (hs_norm(ut, s) + u0_norm) * (1.0 + 1e-12));
    let sup_difference = differences.iter().map(|d| hs_norm(d, s)).fold(0.0, f64::max);
    let series = traj
        .times
        .iter()
        .zip(&differences)
        .map(|(&t, d)| (t, hs_norm(d, s + cfg.epsilon_target)))
        .collect();
    let last = differences.last().expect("at least the initial snapshot");
    let (lo, hi) = default_window(n);
    let data_fit = fit_tail(u0, lo, hi);
    let difference_fit = if aborted.is_none() {
        fit_tail(last, lo, hi)
    } else {
        None
    };
    let gain = match (data_fit, difference_fit) {
        (Some(a), Some(b)) => Some(b.decay - a.decay),
        _ => None,
    };
    let modulus = |f: &Field64| (1..=n as i64).map(|k| f.coeff(k).norm()).collect::<Vec<_>>();
    Ok(SeedRun {
        summary: SeedSmoothing {
            seed,
            data_fit,
            difference_fit,
            gain,
            sup_difference,
            envelope_ok,
            aborted,
        },
        series,
        data_abs: modulus(u0),
        difference_abs: modulus(last),
    })
}

fn mean(values: &[f64]) -> Option<f64> {
    (!values.is_empty()).then(|| values.iter().sum::<f64>() / values.len() as f64)
}

fn spread(values: &[f64]) -> Option<f64> {
    let m = mean(values)?;
    (values.len() > 1).then(|| {
        let ss: f64 = values.iter().map(|v| (v - m) * (v - m)).sum();
        (ss / (values.len() - 1) as f64).sqrt()
    })
}

fn all_or_none(values: impl Iterator<Item = Option<f64>>) -> Option<Vec<f64>> {
    values.collect()
}

fn run_seeds(
    plan: &Plan<'_>,
    params: &Params64,
    n: usize,
    amplitude: f64,
    progress: &(dyn Fn(&str) + Sync),
) -> Result<Vec<SeedRun>, ExperimentError> {
    plan.seeds
        .par_iter()
        .map(|&seed| {
            let run = run_seed(plan, params, n, amplitude, seed);
            progress(&format!("smoothing N = {n}, amplitude {amplitude}, seed {seed} done"));
            run
        })
        .collect()
}

fn ladder_point(cfg: &SmoothingConfig, n: usize, runs: &[SeedRun]) -> LadderPoint {
    let seeds: Vec<SeedSmoothing> = runs.iter().map(|r| r.summary.clone()).collect();
    let data = all_or_none(seeds.iter().map(|s| s.data_fit.map(|f| f.decay)));
    let difference = all_or_none(seeds.iter().map(|s| s.difference_fit.map(|f| f.decay)));
    let gains = all_or_none(seeds.iter().map(|s| s.gain));
    let residuals = all_or_none(seeds.iter().map(|s| s.difference_fit.map(|f| f.residual)));
    let samples = runs.iter().map(|r| r.series.len()).min().unwrap_or(0);
    let time_series = (0..samples)
        .map(|i| TimeSample {
            t: runs[0].series[i].0,
            norm: runs.iter().map(|r| r.series[i].1).sum::<f64>() / runs.len() as f64,
        })
        .collect();
    let rms = |pick: &dyn Fn(&SeedRun) -> &Vec<f64>, k: usize| {
        (runs.iter().map(|r| pick(r)[k].powi(2)).sum::<f64>() / runs.len() as f64).sqrt()
    };
    let tail_spectrum = (0..n)
        .map(|k| TailSample {
            n: k + 1,
            data: rms(&|r| &r.data_abs, k),
            difference: rms(&|r| &r.difference_abs, k),
        })
        .collect();
    LadderPoint {
        n,
        dt: cfg.step_for(n, 1.0),
        window: default_window(n),
        data_decay: data.as_deref().and_then(mean),
        difference_decay: difference.as_deref().and_then(mean),
        gain: gains.as_deref().and_then(mean),
        gain_spread: gains.as_deref().and_then(spread),
        max_residual: residuals.map(|r| r.into_iter().fold(0.0, f64::max)),
        seeds,
        time_series,
        tail_spectrum,
    }
}

/// Runs the smoothing measurement.
///
/// For every `N` of the ladder and every seed: `u₀ = random_sobolev_data(s,
/// N, seed)` is solved to `T`, gauged, and compared with `W_Tu₀`. Decay
/// exponents of `u₀` and of the difference are fitted on `[N/8, N/2]` and
/// averaged over seeds. The amplitude ladder reruns the largest `N` with
/// `λu₀`. Seeds run in parallel and are merged in seed order, so reports
/// are reproducible bitwise.
pub fn smoothing_report(
    s: f64,
    params: &Params64,
    cfg: &SmoothingConfig,
    seeds: &[u64],
) -> Result<SmoothingReport, ExperimentError> {
    smoothing_report_with_progress(s, params, cfg, seeds, &|_| {})
}

/// [`smoothing_report`] with a callback invoked after every finished run.
pub fn smoothing_report_with_progress(
    s: f64,
    params: &Params64,
    cfg: &SmoothingConfig,
    seeds: &[u64],
    progress: &(dyn Fn(&str) + Sync),
) -> Result<SmoothingReport, ExperimentError> {
    cfg.validate()?;
    if seeds.is_empty() {
        return Err(ExperimentError::Config("empty seed list".into()));
    }
    if !s.is_finite() {
        return Err(ExperimentError::Config(format!("regularity {s} must be finite")));
    }
    let plan = Plan { s, seeds, cfg };
    let mut flags = Vec::new();
    let mut warnings = Vec::new();
    if s <= WELL_POSEDNESS_THRESHOLD {
        flags.push(SmoothingFlag::BelowThreshold);
        warnings.push(format!("s = {s} is at or below 35/64; the run is exploratory"));
    }
    let linear = params.is_linear();
    if linear {
        flags.push(SmoothingFlag::Linear);
    }

    let mut ladder = Vec::new();
    let mut top_runs = Vec::new();
    for &n in &cfg.n_ladder {
        let runs = run_seeds(&plan, params, n, 1.0, progress)?;
        ladder.push(ladder_point(cfg, n, &runs));
        top_runs = runs;
    }

    let seeds = ladder.iter().flat_map(|p| &p.seeds);
    if seeds.clone().any(|r| r.aborted.is_some()) {
        flags.push(SmoothingFlag::Unstable);
    }
    if seeds.clone().any(|r| !r.envelope_ok) {
        flags.push(SmoothingFlag::EnvelopeViolated);
    }
    let top = ladder.last().expect("validated non-empty ladder");
    let fits_ok = top.max_residual.is_some_and(|r| r <= cfg.residual_threshold);
    if !linear && !fits_ok {
        flags.push(SmoothingFlag::Inconclusive);
    }
    let measured_gain = if linear || !fits_ok { None } else { top.gain };

    let amplitude_scaling = if cfg.amplitudes.is_empty() {
        None
    } else {
        let n = top.n;
        let mut sup_norms = Vec::new();
        for &a in &cfg.amplitudes {
            let runs = if a == 1.0 {
                std::mem::take(&mut top_runs)
            } else {
                run_seeds(&plan, params, n, a, progress)?
            };
            if runs.iter().any(|r| r.summary.aborted.is_some()) && !flags.contains(&SmoothingFlag::Unstable) {
                flags.push(SmoothingFlag::Unstable);
            }
            let sups: Vec<f64> = runs.iter().map(|r| r.summary.sup_difference).collect();
            sup_norms.push(mean(&sups).unwrap_or(0.0));
        }
        let a0 = cfg.amplitudes[0];
        let ratio_to_square = cfg
            .amplitudes
            .iter()
            .zip(&sup_norms)
            .map(|(&a, &m)| (m / sup_norms[0]) / (a / a0).powi(2))
            .collect();
        let usable = sup_norms.iter().all(|&m| m > 0.0);
        let fit = usable
            .then(|| {
                let x: Vec<f64> = cfg.amplitudes.iter().map(|a| a.ln()).collect();
                let y: Vec<f64> = sup_norms.iter().map(|m| m.ln()).collect();
                least_squares(&x, &y)
            })
            .flatten();
        Some(AmplitudeScaling {
            n,
            amplitudes: cfg.amplitudes.clone(),
            steps: cfg.amplitudes.iter().map(|&a| cfg.step_for(n, a)).collect(),
            sup_norms,
            ratio_to_square,
            exponent: fit.map(|f| f.0),
            residual: fit.map(|f| f.2),
        })
    };

    Ok(SmoothingReport {
        s,
        epsilon_target: cfg.epsilon_target,
        epsilon_ceiling: epsilon_ceiling(s),
        params: *params,
        t_end: cfg.t_end,
        n_ladder: cfg.n_ladder.clone(),
        ladder,
        measured_gain,
        amplitude_scaling,
        flags,
        warnings,
    })
}
