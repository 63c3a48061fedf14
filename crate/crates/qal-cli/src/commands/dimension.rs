//! `dimension`: box-counting dimension of calibration graphs and evolved data.

use clap::{Args, ValueEnum};
use qal_dimension::{
    dimension_band, dimension_of_solution, estimate_dimension, field_dimension, square_wave, step_data, weierstrass,
    weierstrass_dimension, DimensionBand, DimensionEstimate, GraphSamples, PartDimensions, SolutionDimension,
    MIN_SAMPLES,
};
use qal_evolution::{solve, Config64, Params64, Preset};
use qal_gauge::free_evolution;
use qal_spectral::{random_sobolev_data, stream_seed, Field64};
use serde::Serialize;

use crate::output::num;
use crate::{CliError, Common, Driver, EquationArgs, Outcome, RunDir, REPORT};

/// Terms of the truncated Weierstrass series.
pub const WEIERSTRASS_TERMS: u32 = 20;

/// Samples of closed-form graphs by default.
pub const DEFAULT_GRAPH_SAMPLES: usize = 1 << 16;

/// Samples per retained mode of field data by default.
pub const SAMPLES_PER_MODE: usize = 8;

/// Regularity of random field data when `--s` is not given.
pub const DEFAULT_RANDOM_REGULARITY: f64 = 0.75;

/// A closed-form calibration graph.
type Graph = fn(f64) -> f64;

/// What to estimate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Source {
    /// The line y = x.
    Line,
    /// The square wave sign(sin x).
    Square,
    /// The Weierstrass function Σ 2^{−k} cos(3^k x).
    Weierstrass,
    /// Truncated unit step data, evolved to time t.
    Step,
    /// Random H^s data, evolved to time t.
    Random,
}

/// Flags of `dimension`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct DimensionArgs {
    /// Graph or data to estimate.
    #[arg(long, value_enum, default_value = "step")]
    pub source: Source,
    /// Sample count [default: 65536 for graphs, 8N but at least 4096 for
    /// field data].
    #[arg(long)]
    pub samples: Option<usize>,
    /// Truncation of field data.
    #[arg(long = "N", default_value_t = 512)]
    pub n_max: usize,
    /// Evolution time of field data.
    #[arg(long, default_value_t = 1.0)]
    pub t: f64,
    /// Regularity of random data and of the reported band [default: 0.75
    /// for random data, none for step data].
    #[arg(long)]
    pub s: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub equation: EquationArgs,
    /// Time step of nonlinear evolutions [default: the solver default].
    #[arg(long)]
    pub dt: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
    #[arg(skip)]
    #[serde(skip)]
    params: Option<Params64>,
}

/// The `dimension` report.
#[derive(Debug, Clone, Serialize)]
pub struct DimensionReport {
    /// What was estimated.
    pub source: Source,
    /// Samples per graph.
    pub samples: usize,
    /// The estimated dimension.
    pub dimension: f64,
    /// Closed-form dimension of a calibration graph.
    pub reference: Option<f64>,
    /// Estimate of a calibration graph.
    pub graph: Option<DimensionEstimate>,
    /// Estimates of a free evolution's real and imaginary parts.
    pub field: Option<PartDimensions>,
    /// Estimates along a nonlinear solution.
    pub solution: Option<SolutionDimension>,
    /// The advisory band for the data regularity.
    pub band: Option<DimensionBand>,
    /// Whether the estimate lies in the band; advisory only.
    pub within_band: Option<bool>,
}

fn graph_rows<'a>(label: &str, e: &'a DimensionEstimate) -> impl Iterator<Item = Vec<String>> + 'a {
    let label = label.to_string();
    e.eps
        .iter()
        .zip(&e.counts)
        .map(move |(eps, c)| vec![label.clone(), num(*eps), c.to_string()])
}

fn dim_error(e: qal_dimension::DimensionError) -> CliError {
    CliError::Runtime(e.to_string())
}

impl DimensionArgs {
    fn data(&self) -> Field64 {
        match self.source {
            Source::Random => random_sobolev_data(
                self.s.unwrap_or(DEFAULT_RANDOM_REGULARITY),
                self.n_max,
                stream_seed(self.common.seed, "dimension/data"),
            ),
            _ => step_data(self.n_max),
        }
    }

    /// Computes the report.
    pub fn dimension_report(&self) -> Result<DimensionReport, CliError> {
        let samples = self.samples.expect("resolved");
        let closed: Option<(Graph, f64)> = match self.source {
            Source::Line => Some((|x| x, 1.0)),
            Source::Square => Some((square_wave, 1.0)),
            Source::Weierstrass => Some((|x| weierstrass(x, WEIERSTRASS_TERMS), weierstrass_dimension())),
            Source::Step | Source::Random => None,
        };
        let mut report = DimensionReport {
            source: self.source,
            samples,
            dimension: f64::NAN,
            reference: None,
            graph: None,
            field: None,
            solution: None,
            band: None,
            within_band: None,
        };
        if let Some((f, reference)) = closed {
            let g = GraphSamples::from_fn(samples, f).map_err(dim_error)?;
            let e = estimate_dimension(&g).map_err(dim_error)?;
            report.dimension = e.slope;
            report.reference = Some(reference);
            report.graph = Some(e);
            return Ok(report);
        }
        let params = self.params.expect("resolved");
        let u0 = self.data();
        report.band = self.s.and_then(dimension_band);
        if params.is_linear() {
            let parts = field_dimension(&free_evolution(&u0, self.t), samples).map_err(dim_error)?;
            report.dimension = parts.d;
            report.field = Some(parts);
        } else {
            let n = self.n_max;
            let dt = self.dt.unwrap_or_else(|| Config64::default_dt(n));
            let probe = Config64::new(n, self.t).with_dt(dt);
            let (steps, _) = probe.step_plan();
            let cfg = probe
                .with_snapshot_stride(steps.max(1))
                .with_diagnostic_stride(steps.max(1));
            let traj = solve(&u0, &params, &cfg).map_err(|e| CliError::Runtime(e.to_string()))?;
            let sol = dimension_of_solution(&traj, self.t, samples, self.s).map_err(dim_error)?;
            report.dimension = sol.tilde.d;
            report.solution = Some(sol);
        }
        report.within_band = report
            .band
            .map(|b| b.lower <= report.dimension && report.dimension <= b.upper);
        Ok(report)
    }
}

impl Driver for DimensionArgs {
    const NAME: &'static str = "dimension";

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&mut self) -> Result<(), CliError> {
        let field = matches!(self.source, Source::Step | Source::Random);
        if field {
            self.params = Some(self.equation.resolve(Preset::Linear)?);
            if self.n_max == 0 {
                return Err(CliError::Usage("--N must be positive".into()));
            }
            if !self.t.is_finite() || self.t < 0.0 {
                return Err(CliError::Usage("--t must be nonnegative".into()));
            }
            if self.source == Source::Random {
                self.s.get_or_insert(DEFAULT_RANDOM_REGULARITY);
            }
        }
        let default = if field {
            (SAMPLES_PER_MODE * self.n_max).max(MIN_SAMPLES)
        } else {
            DEFAULT_GRAPH_SAMPLES
        };
        self.samples.get_or_insert(default);
        Ok(())
    }

    fn run(&self, dir: &mut RunDir) -> Result<Outcome, CliError> {
        let report = self.dimension_report()?;
        if self.common.json() {
            dir.write_json(REPORT, &report)?;
        }
        if self.common.csv() {
            let mut rows: Vec<Vec<String>> = Vec::new();
            if let Some(e) = &report.graph {
                rows.extend(graph_rows("graph", e));
            }
            if let Some(p) = &report.field {
                rows.extend(graph_rows("re", &p.re));
                rows.extend(graph_rows("im", &p.im));
            }
            if let Some(s) = &report.solution {
                rows.extend(graph_rows("tilde_re", &s.tilde.re));
                rows.extend(graph_rows("tilde_im", &s.tilde.im));
                rows.extend(graph_rows("difference_re", &s.difference.re));
                rows.extend(graph_rows("difference_im", &s.difference.im));
            }
            dir.write_csv("boxcount.csv", &["part", "eps", "count"], rows)?;
        }
        let mut outcome = Outcome::default();
        let mut line = format!("{:?} dimension {:.4}", self.source, report.dimension);
        if let Some(r) = report.reference {
            line.push_str(&format!(" (closed form {r:.4})"));
        }
        if let Some(b) = report.band {
            line.push_str(&format!(
                ", band [{:.4}, {:.4}] at s = {} (advisory: {})",
                b.lower,
                b.upper,
                b.s,
                if report.within_band == Some(true) {
                    "inside"
                } else {
                    "outside"
                }
            ));
        }
        outcome.summary.push(line);
        Ok(outcome)
    }
}
