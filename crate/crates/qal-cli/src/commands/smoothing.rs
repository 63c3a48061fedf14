//! `smoothing`: tail-decay gain of the gauged Duhamel term.

use clap::Args;
use qal_evolution::{Params64, Preset};
use qal_experiments::{smoothing_report_with_progress, SmoothingConfig, SmoothingFlag, SmoothingReport};
use qal_spectral::stream_seed;
use serde::Serialize;

use crate::output::num;
use crate::{CliError, Common, Driver, EquationArgs, Outcome, RunDir, REPORT};

/// Flags of `smoothing`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SmoothingArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub equation: EquationArgs,
    /// Sobolev regularity of the random data.
    #[arg(long, default_value_t = 0.75)]
    pub s: f64,
    /// Truncation ladder, comma-separated.
    #[arg(long = "N", value_delimiter = ',', default_value = "64,128,256")]
    pub n_ladder: Vec<usize>,
    /// Final time.
    #[arg(long = "T", default_value_t = 0.005)]
    pub t_end: f64,
    /// Time step for every truncation [default: the solver default per N].
    #[arg(long)]
    pub dt: Option<f64>,
    /// Number of random data seeds.
    #[arg(long, default_value_t = 8)]
    pub seeds: usize,
    /// Amplitudes of the scaling ladder at the largest N, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "1,0.5,0.25")]
    pub amplitudes: Vec<f64>,
    /// Divide the step by the amplitude in the scaling ladder.
    #[arg(long = "scale-dt")]
    pub scale_dt: bool,
    /// Times at which the H^s norm of the difference is recorded.
    #[arg(long = "time-samples", default_value_t = 20)]
    pub time_samples: usize,
    /// Largest fit residual before the report is flagged inconclusive.
    #[arg(long = "residual-threshold", default_value_t = 0.75)]
    pub residual_threshold: f64,
    /// Target gain ε checked against the admissible ceiling.
    #[arg(long = "epsilon-target", default_value_t = 0.25)]
    pub epsilon_target: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(skip)]
    #[serde(skip)]
    params: Option<Params64>,
}

impl SmoothingArgs {
    /// The experiment configuration described by the flags.
    pub fn smoothing_config(&self) -> SmoothingConfig {
        SmoothingConfig {
            epsilon_target: self.epsilon_target,
            n_ladder: self.n_ladder.clone(),
            t_end: self.t_end,
            dt: self.dt,
            amplitudes: self.amplitudes.clone(),
            scale_dt_with_amplitude: self.scale_dt,
            time_samples: self.time_samples,
            residual_threshold: self.residual_threshold,
        }
    }

    /// Data seeds derived from the root seed.
    pub fn data_seeds(&self) -> Vec<u64> {
        (0..self.seeds)
            .map(|i| stream_seed(self.common.seed, &format!("smoothing/{i}")))
            .collect()
    }
}

fn tail_rows(report: &SmoothingReport) -> Vec<Vec<String>> {
    report
        .ladder
        .iter()
        .flat_map(|p| {
            p.tail_spectrum
                .iter()
                .map(move |t| vec![p.n.to_string(), t.n.to_string(), num(t.data), num(t.difference)])
        })
        .collect()
}

fn series_rows(report: &SmoothingReport) -> Vec<Vec<String>> {
    report
        .ladder
        .iter()
        .flat_map(|p| {
            p.time_series
                .iter()
                .map(move |t| vec![p.n.to_string(), num(t.t), num(t.norm)])
        })
        .collect()
}

impl Driver for SmoothingArgs {
    const NAME: &'static str = "smoothing";

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&mut self) -> Result<(), CliError> {
        self.params = Some(self.equation.resolve(Preset::Toy)?);
        if self.seeds == 0 {
            return Err(CliError::Usage("--seeds must be at least 1".into()));
        }
        if !self.s.is_finite() {
            return Err(CliError::Usage("--s must be finite".into()));
        }
        self.smoothing_config()
            .validate()
            .map_err(|e| CliError::Usage(e.to_string()))
    }

    fn run(&self, dir: &mut RunDir) -> Result<Outcome, CliError> {
        let params = self.params.expect("resolved");
        let progress = |line: &str| eprintln!("{line}");
        let report =
            smoothing_report_with_progress(self.s, &params, &self.smoothing_config(), &self.data_seeds(), &progress)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
        if self.common.json() {
            dir.write_json(REPORT, &report)?;
        }
        if self.common.csv() {
            dir.write_csv("tail.csv", &["N", "n", "data", "difference"], tail_rows(&report))?;
            dir.write_csv("series.csv", &["N", "t", "hs_difference"], series_rows(&report))?;
        }
        let mut outcome = Outcome {
            warnings: report.warnings.clone(),
            ..Outcome::default()
        };
        if report.has_flag(SmoothingFlag::Unstable) {
            outcome.incomplete = Some("some runs stopped early".into());
        }
        for p in &report.ladder {
            outcome.summary.push(format!(
                "N = {:>4}: data decay {}, difference decay {}, gain {}",
                p.n,
                fmt_opt(p.data_decay),
                fmt_opt(p.difference_decay),
                fmt_opt(p.gain)
            ));
        }
        outcome.summary.push(format!(
            "measured gain {} (ceiling {:.4}), flags {:?}",
            fmt_opt(report.measured_gain),
            report.epsilon_ceiling,
            report.flags
        ));
        if let Some(a) = &report.amplitude_scaling {
            outcome
                .summary
                .push(format!("amplitude exponent {} at N = {}", fmt_opt(a.exponent), a.n));
        }
        Ok(outcome)
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{v:.4}"))
}
