//! Time integration over a horizon, with diagnostics and the `K` record.

use std::fmt;

use num_complex::Complex;
use qal_gauge::{free_evolution, tilde_snapshots, Direction, GaugePhase, GaugeRecorder};
use qal_spectral::{sobolev_weight_sq, Real, SpectralField};
use serde::{Deserialize, Serialize};

use crate::error::EvolutionError;
use crate::kernel::{from_half, to_half};
use crate::params::{EquationParams, SolverConfig};
use crate::stepper::IfRk4;

/// Relative size of a mean that triggers projection in [`solve`].
pub const MEAN_TOLERANCE: f64 = 1e-14;

/// Which variable the snapshots hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Variable {
    /// The solution `u`.
    Solution,
    /// The gauged variable `ũ`.
    Tilde,
}

/// One diagnostic record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Diagnostic<T: Real> {
    /// Time.
    pub t: T,
    /// Mean `c(0)`.
    pub mean: T,
    /// `L²` norm.
    pub l2: T,
    /// `H^s` norms in the order of [`SolverConfig::sobolev_indices`].
    pub hs: Vec<T>,
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RunStatus {
    /// The horizon was reached.
    Complete,
    /// The `L²` norm grew past the configured limit.
    Unstable { time: f64, growth: f64 },
    /// A step produced non-finite coefficients.
    NonFinite { time: f64 },
}

/// A computed solution on `[0, T]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Trajectory<T: Real> {
    /// Equation coefficients.
    pub params: EquationParams<T>,
    /// Requested configuration.
    pub config: SolverConfig<T>,
    /// Step actually used.
    pub dt_used: T,
    /// Number of steps taken.
    pub steps_taken: usize,
    /// Snapshot variable.
    pub variable: Variable,
    /// Snapshot times, strictly increasing from 0.
    pub times: Vec<T>,
    /// Snapshots.
    pub snapshots: Vec<SpectralField<T>>,
    /// `K` at the snapshot times with its running integral over every step.
    pub gauge: GaugePhase<T>,
    /// Diagnostic records.
    pub diagnostics: Vec<Diagnostic<T>>,
    /// Warnings raised while solving.
    pub warnings: Vec<String>,
    /// How the run ended.
    pub status: RunStatus,
}

/// A run that stopped early, with everything recorded before the stop.
#[derive(Debug, Clone, PartialEq)]
pub struct Aborted<T: Real> {
    /// The partial trajectory; its status says why it stopped.
    pub partial: Box<Trajectory<T>>,
}

impl<T: Real> fmt::Display for Aborted<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.partial.status {
            RunStatus::Unstable { time, growth } => {
                write!(f, "instability at t = {time}: L² norm grew by a factor {growth:e}")
            }
            RunStatus::NonFinite { time } => write!(f, "non-finite state at t = {time}"),
            RunStatus::Complete => write!(f, "run completed"),
        }
    }
}

impl<T: Real> std::error::Error for Aborted<T> {}

/// Failure of [`solve`].
#[derive(Debug, Clone, PartialEq)]
pub enum SolveError<T: Real> {
    /// The inputs were rejected before stepping.
    Invalid(EvolutionError),
    /// The run stopped early.
    Aborted(Aborted<T>),
}

impl<T: Real> fmt::Display for SolveError<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SolveError::Invalid(e) => write!(f, "{e}"),
            SolveError::Aborted(a) => write!(f, "{a}"),
        }
    }
}

impl<T: Real> std::error::Error for SolveError<T> {}

impl<T: Real> From<EvolutionError> for SolveError<T> {
    fn from(e: EvolutionError) -> Self {
        SolveError::Invalid(e)
    }
}

impl<T: Real> SolveError<T> {
    /// The partial trajectory of an aborted run.
    pub fn partial(&self) -> Option<&Trajectory<T>> {
        match self {
            SolveError::Aborted(a) => Some(&a.partial),
            SolveError::Invalid(_) => None,
        }
    }
}

/// `(4/5) Σ |c(n)|²` over the half spectrum.
fn k_imag_half<T: Real>(half: &[Complex<T>]) -> T {
    let tail: T = half.iter().skip(1).map(|c| c.norm_sqr()).fold(T::zero(), |a, b| a + b);
    T::lit(0.8) * (half[0].norm_sqr() + T::lit(2.0) * tail)
}

struct DiagnosticWeights<T: Real> {
    weights: Vec<Vec<T>>,
}

impl<T: Real> DiagnosticWeights<T> {
    fn new(n_max: usize, indices: &[T]) -> Self {
        let weights = indices
            .iter()
            .map(|&s| (0..=n_max as i64).map(|n| sobolev_weight_sq(n, s)).collect())
            .collect();
        Self { weights }
    }

    fn record(&self, t: T, half: &[Complex<T>]) -> Diagnostic<T> {
        let two = T::lit(2.0);
        let weighted = |w: &[T]| {
            let tail: T = half
                .iter()
                .zip(w)
                .skip(1)
                .map(|(c, &wn)| wn * c.norm_sqr())
                .fold(T::zero(), |a, b| a + b);
            (w[0] * half[0].norm_sqr() + two * tail).sqrt()
        };
        let ones = vec![T::one(); half.len()];
        Diagnostic {
            t,
            mean: half[0].re,
            l2: weighted(&ones),
            hs: self.weights.iter().map(|w| weighted(w)).collect(),
        }
    }
}

/// Integrates the equation from `u0` over `[0, cfg.t_end]`.
///
/// A nonzero mean is removed with a warning. `K` is recorded at every step
/// and integrated on the full step grid; snapshots, diagnostics and the
/// `K` samples kept in the trajectory follow their strides. A run whose
/// `L²` norm grows past `cfg.growth_limit` times its initial value, or
/// that turns non-finite, stops with the partial trajectory.
///
/// The free equation is advanced by its exact propagator from `u0`, so its
/// snapshots coincide bitwise with [`Trajectory::free_reference`].
/// `K` comes from the resonant part of the nonlinearity, so the free
/// equation records `K ≡ 0` and its gauged trajectory equals the solution.
pub fn solve<T: Real>(
    u0: &SpectralField<T>,
    p: &EquationParams<T>,
    cfg: &SolverConfig<T>,
) -> Result<Trajectory<T>, SolveError<T>> {
    cfg.validate()?;
    if !p.is_finite() {
        return Err(EvolutionError::Config("non-finite equation coefficients".into()).into());
    }
    if u0.n_max() != cfg.n_max {
        return Err(EvolutionError::Config(format!(
            "initial data has N = {}, configuration has N = {}",
            u0.n_max(),
            cfg.n_max
        ))
        .into());
    }
    let tol = T::lit(1e-10) * u0.max_abs().max(T::one());
    u0.validate_hermitian(tol).map_err(EvolutionError::from)?;

    let mut warnings = Vec::new();
    let mut half = to_half(u0);
    half[0] = Complex::new(half[0].re, T::zero());
    let scale = u0.max_abs().max(T::min_positive_value());
    if half[0].re.abs() > T::lit(MEAN_TOLERANCE) * scale {
        warnings.push(format!(
            "initial mean {} projected out; the equation is posed for mean-zero data",
            half[0].re
        ));
    }
    half[0] = Complex::new(T::zero(), T::zero());

    let (steps, h) = cfg.step_plan();
    let weights = DiagnosticWeights::new(cfg.n_max, &cfg.sobolev_indices);
    let mut stepper = IfRk4::new(cfg.n_max, *p, h);
    let mut recorder = GaugeRecorder::new();
    let mut times = Vec::new();
    let mut snapshots = Vec::new();
    let mut diagnostics = Vec::new();

    let gauge_k = |half: &[Complex<T>]| {
        let k = if p.is_linear() { T::zero() } else { k_imag_half(half) };
        Complex::new(T::zero(), k)
    };
    let initial = weights.record(T::zero(), &half);
    let l2_0 = initial.l2;
    recorder.push(T::zero(), gauge_k(&half)).map_err(EvolutionError::from)?;
    recorder.mark();
    times.push(T::zero());
    snapshots.push(from_half(&half));
    diagnostics.push(initial);

    let start = from_half(&half);
    let mut status = RunStatus::Complete;
    let mut taken = 0;
    for k in 1..=steps {
        let t = cfg.time_of(k, steps);
        if p.is_linear() {
            half = to_half(&free_evolution(&start, t));
        } else {
            stepper.advance(&mut half);
        }
        taken = k;
        let finite = half.iter().all(|c| c.re.is_finite() && c.im.is_finite());
        if !finite {
            status = RunStatus::NonFinite { time: t.as_f64() };
            break;
        }
        let record = weights.record(t, &half);
        let growth = if l2_0 > T::zero() { record.l2 / l2_0 } else { T::one() };
        recorder.push(t, gauge_k(&half)).map_err(EvolutionError::from)?;
        let last = k == steps;
        let unstable = growth > cfg.growth_limit;
        if last || unstable || k % cfg.snapshot_stride == 0 {
            recorder.mark();
            times.push(t);
            snapshots.push(from_half(&half));
        }
        if last || unstable || k % cfg.diagnostic_stride == 0 {
            diagnostics.push(record);
        }
        if unstable {
            status = RunStatus::Unstable {
                time: t.as_f64(),
                growth: growth.as_f64(),
            };
            break;
        }
    }

    let trajectory = Trajectory {
        params: *p,
        config: cfg.clone(),
        dt_used: h,
        steps_taken: taken,
        variable: Variable::Solution,
        times,
        snapshots,
        gauge: recorder.finish(),
        diagnostics,
        warnings,
        status,
    };
    match trajectory.status {
        RunStatus::Complete => Ok(trajectory),
        _ => Err(SolveError::Aborted(Aborted {
            partial: Box::new(trajectory),
        })),
    }
}

impl<T: Real> Trajectory<T> {
    /// The last snapshot.
    pub fn final_state(&self) -> &SpectralField<T> {
        self.snapshots
            .last()
            .expect("a trajectory holds at least the initial snapshot")
    }

    /// The first snapshot.
    pub fn initial_state(&self) -> &SpectralField<T> {
        &self.snapshots[0]
    }

    /// Index of the snapshot whose time is closest to `t`.
    pub fn nearest_snapshot(&self, t: T) -> usize {
        self.gauge.nearest_index(t).unwrap_or(0).min(self.snapshots.len() - 1)
    }

    /// Maps the snapshots `u(t)` to `ũ(t)` with `ũ̂(n) = e^{n∫₀^t K} û(n)`.
    ///
    /// Fails when the trajectory is already gauged or has no `K` record.
    pub fn tilde_transform(&self) -> Result<Self, EvolutionError> {
        self.gauged(Variable::Solution, Direction::Forward, Variable::Tilde)
    }

    /// Maps gauged snapshots `ũ(t)` back to `u(t)`.
    pub fn inverse_tilde_transform(&self) -> Result<Self, EvolutionError> {
        self.gauged(Variable::Tilde, Direction::Inverse, Variable::Solution)
    }

    fn gauged(&self, from: Variable, direction: Direction, to: Variable) -> Result<Self, EvolutionError> {
        if self.variable != from {
            return Err(EvolutionError::Config(format!(
                "trajectory holds {:?}, expected {from:?}",
                self.variable
            )));
        }
        let phase = (!self.gauge.is_empty()).then_some(&self.gauge);
        let snapshots = tilde_snapshots(&self.snapshots, phase, direction)?;
        Ok(Self {
            snapshots,
            variable: to,
            ..self.clone()
        })
    }

    /// Free evolution `W_t u(0)` of the initial snapshot at every snapshot time.
    pub fn free_reference(&self) -> Vec<SpectralField<T>> {
        let u0 = self.initial_state();
        self.times.iter().map(|&t| free_evolution(u0, t)).collect()
    }

    /// Serializes the trajectory as JSON.
    pub fn to_json_string(&self) -> String {
        serde_json::to_string(self).unwrap_or_default()
    }

    /// Parses a trajectory from JSON.
    pub fn from_json_str(text: &str) -> Result<Self, EvolutionError> {
        serde_json::from_str(text).map_err(|e| EvolutionError::Config(format!("trajectory JSON: {e}")))
    }
}
