//! `solve`: one solver run with diagnostics, checkpoints and an optional
//! oracle comparison.

use std::path::PathBuf;

use clap::Args;
use qal_evolution::{
    energy_balance, oracle_solve, solve, Config64, Diagnostic, Params64, Preset, RunStatus, SolveError, Trajectory64,
    ORACLE_MAX_TRUNCATION,
};
use qal_spectral::{random_sobolev_data, stream_seed, Field64};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::output::num;
use crate::{CliError, Common, Driver, EquationArgs, Outcome, RunDir, REPORT};

/// Largest coefficient deviation from the oracle accepted by `--oracle`.
pub const ORACLE_AGREEMENT: f64 = 1e-8;

/// Default number of snapshot intervals.
pub const DEFAULT_SNAPSHOTS: usize = 20;

/// Default number of diagnostic intervals.
pub const DEFAULT_DIAGNOSTICS: usize = 1000;

/// Flags of `solve`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SolveArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub equation: EquationArgs,
    /// Truncation N [default: 32, or the N of --init].
    #[arg(long = "N")]
    pub n_max: Option<usize>,
    /// Time step [default: min(2/N⁵, 2e-6)].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Final time.
    #[arg(long = "T", default_value_t = 0.01)]
    pub t_end: f64,
    /// Sobolev regularity of the random initial data.
    #[arg(long, default_value_t = 1.0)]
    pub s: f64,
    /// Sobolev indices of the diagnostics, comma-separated.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "0,0.5,1,2",
        allow_negative_numbers = true
    )]
    pub sobolev: Vec<f64>,
    /// Steps between snapshots [default: about 20 snapshots].
    #[arg(long = "snapshot-stride")]
    pub snapshot_stride: Option<usize>,
    /// Steps between diagnostic records [default: about 1000 records].
    #[arg(long = "diagnostic-stride")]
    pub diagnostic_stride: Option<usize>,
    /// Initial data in the field JSON format instead of random data.
    #[arg(long)]
    pub init: Option<PathBuf>,
    /// Compare every snapshot with the direct-convolution oracle (N ≤ 12).
    #[arg(long)]
    pub oracle: bool,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(skip)]
    #[serde(skip)]
    resolved: Option<Resolved>,
}

#[derive(Debug, Clone)]
struct Resolved {
    params: Params64,
    u0: Field64,
    init_sha256: Option<String>,
}

/// Oracle comparison of a run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OracleComparison {
    /// Largest coefficient difference over all snapshots.
    pub max_deviation: f64,
    /// Accepted deviation.
    pub tolerance: f64,
    /// Snapshots compared.
    pub snapshots: usize,
    /// `max_deviation < tolerance`.
    pub passed: bool,
}

/// The `solve` report.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    /// Coefficients.
    pub params: Params64,
    /// Truncation.
    #[serde(rename = "N")]
    pub n_max: usize,
    /// Final time requested.
    #[serde(rename = "T")]
    pub t_end: f64,
    /// Step actually used.
    pub dt_used: f64,
    /// Steps taken.
    pub steps_taken: usize,
    /// Seed of the random data, absent for file data.
    pub data_seed: Option<u64>,
    /// SHA-256 of the data file, absent for random data.
    pub init_sha256: Option<String>,
    /// How the run ended.
    pub status: RunStatus,
    /// Solver warnings.
    pub warnings: Vec<String>,
    /// Sobolev indices of the diagnostics.
    pub sobolev: Vec<f64>,
    /// First diagnostic record.
    pub initial: Option<Diagnostic<f64>>,
    /// Last diagnostic record.
    pub last: Option<Diagnostic<f64>>,
    /// Largest `|mean|` over the diagnostics.
    pub max_abs_mean: f64,
    /// Largest `|d/dt ½‖u‖² − flux|` over the snapshots.
    pub max_energy_defect: f64,
    /// Final `Im ∫K`.
    pub gauge_phase: Option<f64>,
    /// Oracle comparison, when requested.
    pub oracle: Option<OracleComparison>,
}

fn load_field(path: &PathBuf) -> Result<(Field64, String), CliError> {
    let text =
        std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
    let f = Field64::from_json_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
    Ok((f, hex::encode(Sha256::digest(text.as_bytes()))))
}

impl SolveArgs {
    fn config(&self) -> Config64 {
        let n = self.n_max.expect("resolved");
        let mut cfg = Config64::new(n, self.t_end)
            .with_dt(self.dt.expect("resolved"))
            .with_sobolev_indices(self.sobolev.clone());
        cfg = cfg.with_snapshot_stride(self.snapshot_stride.expect("resolved"));
        cfg.with_diagnostic_stride(self.diagnostic_stride.expect("resolved"))
    }

    fn data_seed(&self) -> u64 {
        stream_seed(self.common.seed, "solve/data")
    }
}

/// Compares two trajectories snapshot by snapshot.
pub fn compare_with_oracle(fast: &Trajectory64, slow: &Trajectory64) -> OracleComparison {
    let max_deviation = fast
        .snapshots
        .iter()
        .zip(&slow.snapshots)
        .map(|(a, b)| a.max_abs_diff(b))
        .fold(0.0, f64::max);
    let aligned = fast.times == slow.times;
    OracleComparison {
        max_deviation: if aligned { max_deviation } else { f64::INFINITY },
        tolerance: ORACLE_AGREEMENT,
        snapshots: fast.snapshots.len().min(slow.snapshots.len()),
        passed: aligned && max_deviation < ORACLE_AGREEMENT,
    }
}

fn diagnostics_rows(traj: &Trajectory64) -> Vec<Vec<String>> {
    traj.diagnostics
        .iter()
        .map(|d| {
            let mut row = vec![num(d.t), num(d.mean), num(d.l2)];
            row.extend(d.hs.iter().map(|&x| num(x)));
            row
        })
        .collect()
}

impl Driver for SolveArgs {
    const NAME: &'static str = "solve";

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&mut self) -> Result<(), CliError> {
        let params = self.equation.resolve(Preset::Toy)?;
        let (u0, init_sha256) = match &self.init {
            Some(path) => {
                let (f, hash) = load_field(path)?;
                if let Some(n) = self.n_max {
                    if n != f.n_max() {
                        return Err(CliError::Usage(format!(
                            "--N {n} differs from the data's N = {}",
                            f.n_max()
                        )));
                    }
                }
                (f, Some(hash))
            }
            None => {
                let n = *self.n_max.get_or_insert(32);
                if !self.s.is_finite() {
                    return Err(CliError::Usage("--s must be finite".into()));
                }
                (random_sobolev_data(self.s, n, self.data_seed()), None)
            }
        };
        let n = *self.n_max.get_or_insert(u0.n_max());
        let dt = *self.dt.get_or_insert(Config64::default_dt(n));
        let probe = Config64::new(n, self.t_end).with_dt(dt);
        probe.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        let (steps, _) = probe.step_plan();
        self.snapshot_stride.get_or_insert((steps / DEFAULT_SNAPSHOTS).max(1));
        self.diagnostic_stride
            .get_or_insert((steps / DEFAULT_DIAGNOSTICS).max(1));
        self.config().validate().map_err(|e| CliError::Usage(e.to_string()))?;
        if self.oracle && n > ORACLE_MAX_TRUNCATION {
            return Err(CliError::Usage(format!("--oracle needs N ≤ {ORACLE_MAX_TRUNCATION}")));
        }
        self.resolved = Some(Resolved {
            params,
            u0,
            init_sha256,
        });
        Ok(())
    }

    fn run(&self, dir: &mut RunDir) -> Result<Outcome, CliError> {
        let Resolved {
            params,
            u0,
            init_sha256,
        } = self.resolved.clone().expect("resolved");
        let cfg = self.config();
        let mut outcome = Outcome::default();
        let traj = match solve(&u0, &params, &cfg) {
            Ok(t) => t,
            Err(SolveError::Aborted(a)) => {
                outcome.incomplete = Some(a.to_string());
                *a.partial
            }
            Err(SolveError::Invalid(e)) => return Err(CliError::Usage(e.to_string())),
        };
        let oracle = if self.oracle && outcome.incomplete.is_none() {
            let slow = oracle_solve(&u0, &params, &cfg).map_err(|e| CliError::Runtime(e.to_string()))?;
            Some(compare_with_oracle(&traj, &slow))
        } else {
            None
        };
        let max_energy_defect = energy_balance(&traj).iter().map(|b| b.defect()).fold(0.0, f64::max);
        let report = SolveReport {
            params,
            n_max: cfg.n_max,
            t_end: cfg.t_end,
            dt_used: traj.dt_used,
            steps_taken: traj.steps_taken,
            data_seed: init_sha256.is_none().then(|| self.data_seed()),
            init_sha256,
            status: traj.status.clone(),
            warnings: traj.warnings.clone(),
            sobolev: self.sobolev.clone(),
            initial: traj.diagnostics.first().cloned(),
            last: traj.diagnostics.last().cloned(),
            max_abs_mean: traj.diagnostics.iter().map(|d| d.mean.abs()).fold(0.0, f64::max),
            max_energy_defect,
            gauge_phase: traj.gauge.cumulative().last().copied(),
            oracle,
        };
        if self.common.csv() {
            let mut header = vec!["t".to_string(), "mean".to_string(), "l2".to_string()];
            header.extend(self.sobolev.iter().map(|s| format!("h{s}")));
            let header: Vec<&str> = header.iter().map(String::as_str).collect();
            dir.write_csv("diagnostics.csv", &header, diagnostics_rows(&traj))?;
        }
        if self.common.json() {
            dir.write("u0.json", u0.to_json_string().as_bytes())?;
            dir.write("checkpoint.json", traj.final_state().to_json_string().as_bytes())?;
            dir.write("trajectory.json", traj.to_json_string().as_bytes())?;
            dir.write_json(REPORT, &report)?;
        }
        outcome.warnings.extend(traj.warnings.iter().cloned());
        outcome.summary.push(format!(
            "N = {}, T = {}, dt = {:e}, {} steps",
            cfg.n_max, cfg.t_end, traj.dt_used, traj.steps_taken
        ));
        if let Some(d) = &report.last {
            outcome
                .summary
                .push(format!("final L² = {:.12e}, mean = {:e}", d.l2, d.mean));
        }
        if let Some(o) = &oracle {
            outcome.summary.push(format!(
                "oracle max deviation {:e} over {} snapshots",
                o.max_deviation, o.snapshots
            ));
            if !o.passed {
                outcome.failures.push(format!(
                    "oracle deviation {:e} is not below {:e}",
                    o.max_deviation, o.tolerance
                ));
            }
        }
        Ok(outcome)
    }
}
