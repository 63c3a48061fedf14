//! Brute-force reference solver for small truncations.

use num_complex::Complex;
use ode_solvers::dop853::Dop853;
use ode_solvers::{DVector, OutputType, System};
use qal_gauge::{dispersion, k_functional, GaugePhase};
use qal_spectral::{sobolev_weight_sq, Field64, C64};

use crate::error::EvolutionError;
use crate::params::{EquationParams, SolverConfig};
use crate::trajectory::{Diagnostic, RunStatus, Trajectory, Variable, MEAN_TOLERANCE};

/// Largest truncation the oracle accepts.
pub const ORACLE_MAX_TRUNCATION: usize = 12;

/// Default relative and absolute tolerance of the oracle's integrator.
pub const ORACLE_TOLERANCE: f64 = 1e-12;

/// Step budget of the adaptive integrator per output interval.
const ORACLE_STEP_LIMIT: u32 = 2_000_000;

/// The nonlinear term `−in(α Σ û₁û₂û₃ + Σ (−βn₁n₂ − γn₂²) û₁û₂)` by direct
/// convolution over `|n_i| ≤ N`, for every `|n| ≤ N`.
///
/// This is the Galerkin-truncated system; no transform is involved. All
/// `2N+1` coefficients are used as given, without assuming symmetry.
pub fn convolution_nonlinearity(u: &Field64, p: &EquationParams<f64>) -> Field64 {
    let n_max = u.n_max() as i64;
    let c = |n: i64| u.coeff(n);
    let pair = |m: i64| -> C64 {
        let lo = (m - n_max).max(-n_max);
        let hi = (m + n_max).min(n_max);
        (lo..=hi).map(|n1| c(n1) * c(m - n1)).sum()
    };
    let square: Vec<C64> = (-2 * n_max..=2 * n_max).map(pair).collect();
    Field64::from_fn(n_max as usize, |n| {
        let lo = (n - n_max).max(-n_max);
        let hi = (n + n_max).min(n_max);
        let quadratic: C64 = (lo..=hi)
            .map(|n1| {
                let n2 = n - n1;
                let w = -p.beta * (n1 * n2) as f64 - p.gamma * (n2 * n2) as f64;
                c(n1) * c(n2) * w
            })
            .sum();
        let cubic: C64 = (-2 * n_max..=2 * n_max)
            .filter(|m| (n - m).abs() <= n_max)
            .map(|m| square[(m + 2 * n_max) as usize] * c(n - m))
            .sum();
        let flux = cubic * p.alpha + quadratic;
        flux * C64::new(0.0, -(n as f64))
    })
}

/// Coupled ODE for the interaction-picture coefficients
/// `v̂(n) = e^{−itn⁵}û(n)`, stored as real parts then imaginary parts for
/// `n = −N..=N`, followed by the time itself.
///
/// Time is carried as a state component so the system is autonomous. The
/// DOP853 of `ode_solvers` 0.6 evaluates its stages at inconsistent times
/// and drops to first order on explicitly time-dependent systems.
struct ConvolutionSystem {
    n_max: usize,
    params: EquationParams<f64>,
}

impl ConvolutionSystem {
    fn unpack(&self, y: &DVector<f64>) -> Field64 {
        let len = 2 * self.n_max + 1;
        let t = y[2 * len];
        let n_max = self.n_max as i64;
        Field64::from_fn(self.n_max, |n| {
            let i = (n + n_max) as usize;
            C64::new(y[i], y[len + i]) * C64::from_polar(1.0, t * dispersion(n))
        })
    }
}

impl System<f64, DVector<f64>> for ConvolutionSystem {
    fn system(&self, _t: f64, y: &DVector<f64>, dy: &mut DVector<f64>) {
        let len = 2 * self.n_max + 1;
        let n_max = self.n_max as i64;
        let t = y[2 * len];
        let u = self.unpack(y);
        let rhs = convolution_nonlinearity(&u, &self.params);
        for n in -n_max..=n_max {
            let i = (n + n_max) as usize;
            let d = rhs.coeff(n) * C64::from_polar(1.0, -t * dispersion(n));
            dy[i] = d.re;
            dy[len + i] = d.im;
        }
        dy[2 * len] = 1.0;
    }
}

fn pack(v: &Field64) -> DVector<f64> {
    let len = v.coeffs().len();
    let mut y = DVector::zeros(2 * len + 1);
    for (i, c) in v.coeffs().iter().enumerate() {
        y[i] = c.re;
        y[len + i] = c.im;
    }
    y
}

/// [`oracle_solve_with_tolerance`] at [`ORACLE_TOLERANCE`].
pub fn oracle_solve(
    u0: &Field64,
    p: &EquationParams<f64>,
    cfg: &SolverConfig<f64>,
) -> Result<Trajectory<f64>, EvolutionError> {
    oracle_solve_with_tolerance(u0, p, cfg, ORACLE_TOLERANCE)
}

/// Integrates the direct-convolution ODE for all `2N+1` coefficients with
/// an adaptive eighth-order Dormand–Prince method.
///
/// The snapshot times are those [`crate::solve`] would produce for `cfg`.
/// Diagnostics and `K` samples are taken at the snapshots only. The mean
/// is projected out as in the solver. `N > 12` is rejected.
pub fn oracle_solve_with_tolerance(
    u0: &Field64,
    p: &EquationParams<f64>,
    cfg: &SolverConfig<f64>,
    tol: f64,
) -> Result<Trajectory<f64>, EvolutionError> {
    cfg.validate()?;
    if cfg.n_max > ORACLE_MAX_TRUNCATION {
        return Err(EvolutionError::OracleTooLarge {
            max: ORACLE_MAX_TRUNCATION,
            got: cfg.n_max,
        });
    }
    if u0.n_max() != cfg.n_max {
        return Err(EvolutionError::Config(format!(
            "initial data has N = {}, configuration has N = {}",
            u0.n_max(),
            cfg.n_max
        )));
    }
    if !(tol > 0.0) {
        return Err(EvolutionError::Config(format!("tolerance {tol} must be positive")));
    }
    u0.validate_hermitian(1e-10 * u0.max_abs().max(1.0))?;

    let mut warnings = Vec::new();
    let mut start = u0.clone();
    if start.mean().norm() > MEAN_TOLERANCE * u0.max_abs().max(f64::MIN_POSITIVE) {
        warnings.push(format!(
            "initial mean {} projected out; the equation is posed for mean-zero data",
            start.mean().re
        ));
    }
    start.set(0, C64::new(0.0, 0.0));

    let (steps, h) = cfg.step_plan();
    let mut grid: Vec<usize> = (0..=steps).step_by(cfg.snapshot_stride).collect();
    if *grid.last().unwrap_or(&0) != steps {
        grid.push(steps);
    }
    let times: Vec<f64> = grid.iter().map(|&k| cfg.time_of(k, steps)).collect();

    let system = || ConvolutionSystem {
        n_max: cfg.n_max,
        params: *p,
    };
    let mut y = pack(&start);
    let mut snapshots = vec![start];
    for w in times.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut solver = Dop853::from_param(
            system(),
            a,
            b,
            b - a,
            y.clone(),
            tol,
            tol,
            0.9,
            0.0,
            0.333,
            6.0,
            b - a,
            0.0,
            ORACLE_STEP_LIMIT,
            u32::MAX,
            OutputType::Sparse,
        );
        solver.integrate().map_err(|e| EvolutionError::Oracle(e.to_string()))?;
        y = solver
            .y_out()
            .last()
            .cloned()
            .ok_or_else(|| EvolutionError::Oracle("no output".into()))?;
        let clock = y.len() - 1;
        y[clock] = b;
        snapshots.push(system().unpack(&y));
    }

    let k: Vec<Complex<f64>> = snapshots
        .iter()
        .map(|f| {
            if p.is_linear() {
                Ok(Complex::new(0.0, 0.0))
            } else {
                k_functional(&f.symmetrized())
            }
        })
        .collect::<Result<_, _>>()?;
    let gauge = GaugePhase::from_samples(&times, &k)?;
    let diagnostics = times
        .iter()
        .zip(&snapshots)
        .map(|(&t, f)| Diagnostic {
            t,
            mean: f.mean().re,
            l2: f.sobolev_norm(0.0),
            hs: cfg
                .sobolev_indices
                .iter()
                .map(|&s| f.weighted_sum_sq(|n| sobolev_weight_sq(n, s)).sqrt())
                .collect(),
        })
        .collect();
    Ok(Trajectory {
        params: *p,
        config: cfg.clone(),
        dt_used: h,
        steps_taken: steps,
        variable: Variable::Solution,
        times,
        snapshots,
        gauge,
        diagnostics,
        warnings,
        status: RunStatus::Complete,
    })
}
