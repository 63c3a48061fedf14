//! `identities`: exact phase identities and cancellation sums.

use clap::Args;
use qal_phase::{
    cancellation_sum, check_factorizations, check_re1_combination, check_resonant_reduction, check_telescoping,
    is_exact_zero, slot_broken_control, CancellationKind, ExactComplex, IdentityReport, Int, Rational, RationalField,
};
use qal_spectral::stream_seed;
use rayon::prelude::*;
use serde::Serialize;

use crate::{CliError, Common, Driver, Outcome, RunDir, REPORT};

/// Telescoping orders checked.
pub const TELESCOPING_ORDERS: [usize; 3] = [4, 5, 6];

/// Mode perturbed in the slot-broken control. Mode 1 is avoided because
/// the odd-parity weight `x⁵ − 3x³ + 2x` vanishes at `x = ±1`.
pub const CONTROL_MODE: i64 = 3;

/// Flags of `identities`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct IdentitiesArgs {
    /// Largest truncation of the Hermitian fields in the cancellation sums;
    /// every N from 1 up to this value is checked.
    #[arg(long = "N", default_value_t = 16)]
    pub n_max: usize,
    /// Random fields per truncation.
    #[arg(long, default_value_t = 20)]
    pub seeds: u64,
    /// Half-width of the exhaustive factorization box.
    #[arg(long, default_value_t = 50)]
    pub bound: i64,
    /// Random tuples per telescoping order and per pointwise identity.
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
    /// Entry bound of the telescoping tuples.
    #[arg(long = "tuple-bound", default_value_t = 1000)]
    pub tuple_bound: i64,
    /// Frequency bound of the pointwise identity pairs.
    #[arg(long = "pair-bound", default_value_t = 1000)]
    pub pair_bound: i64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

/// One identity with its exact residual flag.
#[derive(Debug, Clone, Serialize)]
pub struct IdentityRow {
    /// The check.
    #[serde(flatten)]
    pub report: IdentityReport,
    /// `"0"` when both sides agree on every case, `"nonzero"` otherwise.
    pub max_residual: &'static str,
    /// Whether every case agreed.
    pub passed: bool,
}

/// One cancellation kind over every truncation and seed.
#[derive(Debug, Clone, Serialize)]
pub struct CancellationRow {
    /// Kind name.
    pub kind: &'static str,
    /// Sums evaluated.
    pub checked: u64,
    /// Sums that were not exactly zero.
    pub nonzero: u64,
    /// First `(N, seed)` with a nonzero sum.
    pub first_nonzero: Option<(usize, u64)>,
    /// `"0"` when every sum vanished exactly.
    pub max_residual: &'static str,
    /// `"nonzero"` or `"zero"` for the slot-broken control, `"vacuous"`
    /// when the weight vanishes pointwise and no control exists.
    pub control: &'static str,
    /// Every sum vanished and a non-vacuous control did not.
    pub passed: bool,
}

/// The `identities` report.
#[derive(Debug, Clone, Serialize)]
pub struct IdentitiesReport {
    /// Factorizations, telescoping and pointwise identities.
    pub identities: Vec<IdentityRow>,
    /// Cancellation sums.
    pub cancellations: Vec<CancellationRow>,
    /// Seed of the control field.
    pub control_seed: u64,
    /// Every check passed.
    pub passed: bool,
}

fn residual(ok: bool) -> &'static str {
    if ok {
        "0"
    } else {
        "nonzero"
    }
}

fn row(report: IdentityReport) -> IdentityRow {
    let passed = report.passed();
    IdentityRow {
        report,
        max_residual: residual(passed),
        passed,
    }
}

fn phase_error(e: qal_phase::PhaseError) -> CliError {
    CliError::Runtime(e.to_string())
}

/// Runs every identity and cancellation check.
pub fn identities_report(args: &IdentitiesArgs) -> Result<IdentitiesReport, CliError> {
    let root = args.common.seed;
    let mut identities: Vec<IdentityRow> = check_factorizations(args.bound).into_iter().map(row).collect();
    for p in TELESCOPING_ORDERS {
        let seed = stream_seed(root, &format!("identities/telescoping_p{p}"));
        identities.push(row(check_telescoping(p, args.samples, args.tuple_bound, seed)));
    }
    let seed = stream_seed(root, "identities/resonant_reduction");
    identities.push(row(check_resonant_reduction(args.samples, args.pair_bound, seed)));
    let seed = stream_seed(root, "identities/re1_combination");
    identities.push(row(check_re1_combination(args.samples, args.pair_bound, seed)));

    let cases: Vec<(usize, u64)> = (1..=args.n_max)
        .flat_map(|n| (0..args.seeds).map(move |i| (n, i)))
        .collect();
    let zeros: Vec<Vec<bool>> = cases
        .par_iter()
        .map(|&(n, i)| {
            let f = RationalField::random_hermitian(n, stream_seed(root, &format!("identities/cancellation/N{n}/{i}")));
            CancellationKind::ALL
                .iter()
                .map(|&kind| cancellation_sum(kind, &f).map(|s| is_exact_zero(&s)))
                .collect::<Result<Vec<bool>, _>>()
        })
        .collect::<Result<_, _>>()
        .map_err(phase_error)?;

    let control_seed = stream_seed(root, "identities/control");
    let control_field = RationalField::random_hermitian(args.n_max.max(CONTROL_MODE as usize), control_seed);
    let delta = ExactComplex::new(
        Rational::new(Int::from(7), Int::from(3)),
        Rational::new(Int::from(-2), Int::from(5)),
    );
    let mut cancellations = Vec::new();
    for (k, kind) in CancellationKind::ALL.into_iter().enumerate() {
        let nonzero = zeros.iter().filter(|z| !z[k]).count() as u64;
        let first_nonzero = cases.iter().zip(&zeros).find(|(_, z)| !z[k]).map(|(c, _)| *c);
        let control = slot_broken_control(kind, &control_field, CONTROL_MODE, delta.clone()).map_err(phase_error)?;
        let control_nonzero = !is_exact_zero(&control);
        let vacuous = kind.vanishes_pointwise();
        cancellations.push(CancellationRow {
            kind: kind.name(),
            checked: cases.len() as u64,
            nonzero,
            first_nonzero,
            max_residual: residual(nonzero == 0),
            control: match (vacuous, control_nonzero) {
                (true, _) => "vacuous",
                (false, true) => "nonzero",
                (false, false) => "zero",
            },
            passed: nonzero == 0 && (vacuous || control_nonzero),
        });
    }
    let passed = identities.iter().all(|r| r.passed) && cancellations.iter().all(|r| r.passed);
    Ok(IdentitiesReport {
        identities,
        cancellations,
        control_seed,
        passed,
    })
}

impl Driver for IdentitiesArgs {
    const NAME: &'static str = "identities";

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&mut self) -> Result<(), CliError> {
        if self.n_max == 0 {
            return Err(CliError::Usage("--N must be at least 1".into()));
        }
        if self.bound < 1 || self.tuple_bound < 1 || self.pair_bound < 1 {
            return Err(CliError::Usage("bounds must be positive".into()));
        }
        Ok(())
    }

    fn run(&self, dir: &mut RunDir) -> Result<Outcome, CliError> {
        let report = identities_report(self)?;
        if self.common.json() {
            dir.write_json(REPORT, &report)?;
        }
        if self.common.csv() {
            let rows = report
                .identities
                .iter()
                .map(|r| {
                    vec![
                        r.report.identity.clone(),
                        r.report.checked.to_string(),
                        r.report.failures.to_string(),
                        r.max_residual.to_string(),
                    ]
                })
                .chain(report.cancellations.iter().map(|r| {
                    vec![
                        format!("cancellation_{}", r.kind),
                        r.checked.to_string(),
                        r.nonzero.to_string(),
                        r.max_residual.to_string(),
                    ]
                }));
            dir.write_csv(
                "identities.csv",
                &["identity", "checked", "failures", "max_residual"],
                rows,
            )?;
        }
        let mut outcome = Outcome::default();
        for r in &report.identities {
            outcome.summary.push(format!(
                "{:<24} checked {:>8}  failures {}",
                r.report.identity, r.report.checked, r.report.failures
            ));
            if !r.passed {
                outcome.failures.push(format!(
                    "{} failed on {} of {} cases, first at {:?}",
                    r.report.identity, r.report.failures, r.report.checked, r.report.first_failure
                ));
            }
        }
        for r in &report.cancellations {
            outcome.summary.push(format!(
                "cancellation {:<12} checked {:>8}  nonzero {}  control {}",
                r.kind, r.checked, r.nonzero, r.control
            ));
            if r.nonzero > 0 {
                outcome.failures.push(format!(
                    "cancellation {} nonzero on {} fields, first at {:?}",
                    r.kind, r.nonzero, r.first_nonzero
                ));
            }
            if r.control == "zero" {
                outcome
                    .failures
                    .push(format!("cancellation {} control vanished", r.kind));
            }
        }
        Ok(outcome)
    }
}
