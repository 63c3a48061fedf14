//! `talbot`: free evolution of step data at rational and generic times.

use clap::Args;
use qal_dimension::{
    dimension_band, field_dimension, step_data, talbot_check, talbot_snapshot, DimensionBand, PartDimensions,
    TalbotCheck, MIN_SAMPLES,
};
use qal_gauge::free_evolution;
use serde::Serialize;

use crate::output::num;
use crate::{CliError, Common, Driver, Outcome, RunDir, REPORT};

/// Largest coefficient difference between a snapshot and its translate
/// accepted as roundoff when `q | 30`.
pub const ROUNDOFF: f64 = 1e-12;

/// Flags of `talbot`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct TalbotArgs {
    /// Truncation of the step data.
    #[arg(long = "N", default_value_t = 512)]
    pub n_max: usize,
    /// Denominators q of the rational times 2πp/q, comma-separated.
    #[arg(long, value_delimiter = ',', default_value = "2,3,5,6,10,15,30")]
    pub q: Vec<u64>,
    /// Numerator p of the rational times; coprime to every q.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    pub p: i64,
    /// Samples per graph [default: 8N, at least 4096].
    #[arg(long)]
    pub samples: Option<usize>,
    /// Generic times, comma-separated.
    #[arg(
        long = "generic-t",
        value_delimiter = ',',
        default_value = "1",
        allow_negative_numbers = true
    )]
    pub generic_t: Vec<f64>,
    /// Regularity at which the advisory band is reported.
    #[arg(long)]
    pub s: Option<f64>,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

/// One rational time.
#[derive(Debug, Clone, Serialize)]
pub struct RationalTime {
    /// Snapshot against translate.
    pub check: TalbotCheck,
    /// Dimension of the snapshot.
    pub dimension: PartDimensions,
}

/// One generic time.
#[derive(Debug, Clone, Serialize)]
pub struct GenericTime {
    /// Time.
    pub t: f64,
    /// Dimension of the free evolution.
    pub dimension: PartDimensions,
    /// Whether the estimate lies in the band; advisory only.
    pub within_band: Option<bool>,
}

/// The `talbot` report.
#[derive(Debug, Clone, Serialize)]
pub struct TalbotReport {
    /// Truncation.
    #[serde(rename = "N")]
    pub n_max: usize,
    /// Samples per graph.
    pub samples: usize,
    /// Accepted translate discrepancy for `q | 30`.
    pub roundoff: f64,
    /// Rational times.
    pub rational: Vec<RationalTime>,
    /// Generic times.
    pub generic: Vec<GenericTime>,
    /// The advisory band.
    pub band: Option<DimensionBand>,
}

fn dim_error(e: qal_dimension::DimensionError) -> CliError {
    CliError::Runtime(e.to_string())
}

impl TalbotArgs {
    /// Computes the report.
    pub fn talbot_report(&self) -> Result<TalbotReport, CliError> {
        let samples = self.samples.expect("resolved");
        let g = step_data(self.n_max);
        let mut rational = Vec::new();
        for &q in &self.q {
            let check = talbot_check(&g, self.p, q).map_err(|e| CliError::Usage(e.to_string()))?;
            let snap = talbot_snapshot(&g, self.p, q).map_err(dim_error)?;
            let dimension = field_dimension(&snap, samples).map_err(dim_error)?;
            rational.push(RationalTime { check, dimension });
        }
        let band = self.s.and_then(dimension_band);
        let mut generic = Vec::new();
        for &t in &self.generic_t {
            let dimension = field_dimension(&free_evolution(&g, t), samples).map_err(dim_error)?;
            let within_band = band.as_ref().map(|b| b.lower <= dimension.d && dimension.d <= b.upper);
            generic.push(GenericTime {
                t,
                dimension,
                within_band,
            });
        }
        Ok(TalbotReport {
            n_max: self.n_max,
            samples,
            roundoff: ROUNDOFF,
            rational,
            generic,
            band,
        })
    }
}

impl Driver for TalbotArgs {
    const NAME: &'static str = "talbot";

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&mut self) -> Result<(), CliError> {
        if self.n_max == 0 {
            return Err(CliError::Usage("--N must be positive".into()));
        }
        if self.q.contains(&0) {
            return Err(CliError::Usage("--q must list positive denominators".into()));
        }
        if self.generic_t.iter().any(|t| !t.is_finite()) {
            return Err(CliError::Usage("--generic-t must be finite".into()));
        }
        self.samples.get_or_insert((8 * self.n_max).max(MIN_SAMPLES));
        Ok(())
    }

    fn run(&self, dir: &mut RunDir) -> Result<Outcome, CliError> {
        let report = self.talbot_report()?;
        if self.common.json() {
            dir.write_json(REPORT, &report)?;
        }
        if self.common.csv() {
            let rows = report.rational.iter().map(|r| {
                vec![
                    r.check.p.to_string(),
                    r.check.q.to_string(),
                    r.check.divides_modulus.to_string(),
                    num(r.check.max_discrepancy),
                    r.check.bitwise_equal.to_string(),
                    num(r.dimension.d),
                ]
            });
            dir.write_csv(
                "talbot.csv",
                &["p", "q", "divides_30", "max_discrepancy", "bitwise_equal", "dimension"],
                rows,
            )?;
            let mut counts: Vec<Vec<String>> = Vec::new();
            let mut push = |label: String, p: &PartDimensions| {
                for (part, e) in [("re", &p.re), ("im", &p.im)] {
                    for (eps, c) in e.eps.iter().zip(&e.counts) {
                        counts.push(vec![label.clone(), part.to_string(), num(*eps), c.to_string()]);
                    }
                }
            };
            for r in &report.rational {
                push(format!("t=2pi*{}/{}", r.check.p, r.check.q), &r.dimension);
            }
            for g in &report.generic {
                push(format!("t={}", g.t), &g.dimension);
            }
            dir.write_csv("boxcount.csv", &["time", "part", "eps", "count"], counts)?;
        }
        let mut outcome = Outcome::default();
        for r in &report.rational {
            let c = &r.check;
            outcome.summary.push(format!(
                "t = 2π·{}/{:<2}  divides 30: {:<5}  discrepancy {:.3e}  dimension {:.4}",
                c.p, c.q, c.divides_modulus, c.max_discrepancy, r.dimension.d
            ));
            if c.divides_modulus && !(c.max_discrepancy <= ROUNDOFF) {
                outcome.failures.push(format!(
                    "q = {}: snapshot differs from its translate by {:e}",
                    c.q, c.max_discrepancy
                ));
            }
        }
        for g in &report.generic {
            outcome
                .summary
                .push(format!("t = {}  dimension {:.4}", g.t, g.dimension.d));
        }
        Ok(outcome)
    }
}
