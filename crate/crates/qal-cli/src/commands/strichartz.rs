//! `strichartz`: L⁸ space-time norms of the free flow over a truncation ladder.

use clap::Args;
use qal_experiments::{strichartz_probe, RatioSample, StrichartzProbe};
use qal_spectral::stream_seed;
use serde::Serialize;

use crate::output::num;
use crate::{CliError, Common, Driver, Outcome, RunDir, REPORT};

/// Flags of `strichartz`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct StrichartzArgs {
    /// Tested derivative loss a; the data norm is H^{a+0.01}.
    #[arg(long = "a", default_value_t = 0.09375)]
    pub a_test: f64,
    /// Truncation ladder, comma-separated.
    #[arg(long = "N", value_delimiter = ',', default_value = "32,64,128,256,512")]
    pub n_ladder: Vec<usize>,
    /// Number of random data seeds.
    #[arg(long, default_value_t = 4)]
    pub seeds: usize,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

impl StrichartzArgs {
    /// Data seeds derived from the root seed.
    pub fn data_seeds(&self) -> Vec<u64> {
        (0..self.seeds)
            .map(|i| stream_seed(self.common.seed, &format!("strichartz/{i}")))
            .collect()
    }
}

fn sample_row(kind: &str, seed: Option<u64>, r: &RatioSample) -> Vec<String> {
    vec![
        r.n.to_string(),
        kind.to_string(),
        seed.map(|s| s.to_string()).unwrap_or_default(),
        num(r.l8.norm),
        num(r.sobolev),
        num(r.ratio),
        r.l8.time_points.to_string(),
        r.l8.converged.to_string(),
    ]
}

fn rows(probe: &StrichartzProbe) -> Vec<Vec<String>> {
    let mut out = Vec::new();
    for (i, d) in probe.dirichlet.iter().enumerate() {
        out.push(sample_row("dirichlet", None, d));
        for (r, &seed) in probe.random[i].iter().zip(&probe.seeds) {
            out.push(sample_row("random", Some(seed), r));
        }
    }
    out
}

impl Driver for StrichartzArgs {
    const NAME: &'static str = "strichartz";

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&mut self) -> Result<(), CliError> {
        if !(self.a_test >= 0.0 && self.a_test.is_finite()) {
            return Err(CliError::Usage("--a must be nonnegative".into()));
        }
        if self.n_ladder.is_empty() || self.n_ladder.contains(&0) {
            return Err(CliError::Usage("--N must list positive truncations".into()));
        }
        Ok(())
    }

    fn run(&self, dir: &mut RunDir) -> Result<Outcome, CliError> {
        let probe = strichartz_probe(self.a_test, &self.n_ladder, &self.data_seeds())
            .map_err(|e| CliError::Usage(e.to_string()))?;
        if self.common.json() {
            dir.write_json(REPORT, &probe)?;
        }
        if self.common.csv() {
            dir.write_csv(
                "ratios.csv",
                &[
                    "N",
                    "data",
                    "seed",
                    "l8",
                    "sobolev",
                    "ratio",
                    "time_points",
                    "converged",
                ],
                rows(&probe),
            )?;
        }
        let mut outcome = Outcome::default();
        if !probe.converged {
            outcome.warnings.push("some time grids did not converge to 1%".into());
        }
        let ladder = |name: &str, l: &qal_experiments::RatioLadder| {
            format!(
                "{name}: ratios {:?}, max/min {:.4}, trend {}",
                l.ratios.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>(),
                l.spread,
                l.trend.map_or("n/a".to_string(), |t| format!("{t:.4}"))
            )
        };
        outcome.summary.push(ladder("dirichlet", &probe.dirichlet_ladder));
        if let Some(r) = &probe.random_ladder {
            outcome.summary.push(ladder("random", r));
        }
        Ok(outcome)
    }
}
