//! `symbols`: exact multiplier values on given or random tuples.

use std::fmt;
use std::str::FromStr;

use clap::Args;
use qal_phase::{eval_symbol, FreqTuple, SymbolId};
use qal_spectral::stream_rng;
use rand::Rng;
use serde::{Serialize, Serializer};

use crate::{CliError, Common, Driver, Outcome, RunDir, REPORT};

/// A frequency tuple given on the command line as `n1,n2,...`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleArg(pub Vec<i64>);

impl FromStr for TupleArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|e| {
                e.trim()
                    .parse::<i64>()
                    .map_err(|err| format!("bad tuple entry {e:?}: {err}"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(TupleArg)
    }
}

impl fmt::Display for TupleArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(i64::to_string).collect();
        f.write_str(&parts.join(","))
    }
}

impl Serialize for TupleArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

/// Flags of `symbols`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct SymbolsArgs {
    /// Symbols to evaluate, comma-separated [default: all].
    #[arg(long, value_delimiter = ',')]
    pub symbols: Vec<SymbolId>,
    /// Tuples to evaluate, `;`-separated, entries `,`-separated; each is
    /// evaluated by every selected symbol of matching arity.
    #[arg(long, value_delimiter = ';', allow_hyphen_values = true)]
    pub tuples: Vec<TupleArg>,
    /// Random tuples per symbol, drawn when no tuples are given.
    #[arg(long, default_value_t = 32)]
    pub random: usize,
    /// Entry bound of random tuples; entries are nonzero in [−bound, bound].
    #[arg(long, default_value_t = 64)]
    pub bound: i64,
    #[command(flatten)]
    #[serde(flatten)]
    pub common: Common,
}

/// One evaluation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymbolRow {
    /// Frequencies.
    pub tuple: Vec<i64>,
    /// Symbol name.
    pub symbol: String,
    /// Exact value numerator, absent on a domain error.
    pub numerator: Option<String>,
    /// Exact value denominator, absent on a domain error.
    pub denominator: Option<String>,
    /// Whether the symbol's indicators fire.
    pub indicator_active: Option<bool>,
    /// Domain error message.
    pub error: Option<String>,
}

/// The `symbols` report.
#[derive(Debug, Clone, Serialize)]
pub struct SymbolsReport {
    /// Every evaluation in order.
    pub rows: Vec<SymbolRow>,
    /// Evaluations that returned a value.
    pub evaluated: usize,
    /// Evaluations rejected by the symbol's domain.
    pub domain_errors: usize,
}

/// Evaluates `id` on `tuple`.
pub fn symbol_row(id: SymbolId, tuple: &[i64]) -> SymbolRow {
    let value = FreqTuple::new(tuple.to_vec()).and_then(|t| eval_symbol(id, &t));
    let (numerator, denominator, indicator_active, error) = match value {
        Ok(v) => (
            Some(v.value.numer().to_string()),
            Some(v.value.denom().to_string()),
            Some(v.indicator_active),
            None,
        ),
        Err(e) => (None, None, None, Some(e.to_string())),
    };
    SymbolRow {
        tuple: tuple.to_vec(),
        symbol: id.to_string(),
        numerator,
        denominator,
        indicator_active,
        error,
    }
}

fn selected(args: &SymbolsArgs) -> Vec<SymbolId> {
    if args.symbols.is_empty() {
        SymbolId::all()
    } else {
        args.symbols.clone()
    }
}

/// Evaluates every selected symbol.
pub fn symbols_report(args: &SymbolsArgs) -> SymbolsReport {
    let mut rows = Vec::new();
    for id in selected(args) {
        if args.tuples.is_empty() {
            let mut rng = stream_rng(args.common.seed, &format!("symbols/{id}"));
            for _ in 0..args.random {
                let tuple: Vec<i64> = (0..id.arity())
                    .map(|_| loop {
                        let e = rng.random_range(-args.bound..=args.bound);
                        if e != 0 {
                            break e;
                        }
                    })
                    .collect();
                rows.push(symbol_row(id, &tuple));
            }
        } else {
            for t in args.tuples.iter().filter(|t| t.0.len() == id.arity()) {
                rows.push(symbol_row(id, &t.0));
            }
        }
    }
    let domain_errors = rows.iter().filter(|r| r.error.is_some()).count();
    SymbolsReport {
        evaluated: rows.len() - domain_errors,
        domain_errors,
        rows,
    }
}

impl Driver for SymbolsArgs {
    const NAME: &'static str = "symbols";

    fn common(&self) -> &Common {
        &self.common
    }

    fn resolve(&mut self) -> Result<(), CliError> {
        if self.symbols.is_empty() {
            self.symbols = SymbolId::all();
        }
        if self.bound < 1 {
            return Err(CliError::Usage("--bound must be positive".into()));
        }
        if let Some(t) = self.tuples.iter().find(|t| t.0.len() < 2) {
            return Err(CliError::Usage(format!("tuple {t} needs at least two entries")));
        }
        Ok(())
    }

    fn run(&self, dir: &mut RunDir) -> Result<Outcome, CliError> {
        let report = symbols_report(self);
        if self.common.json() {
            dir.write_json(REPORT, &report)?;
        }
        if self.common.csv() {
            let rows = report.rows.iter().map(|r| {
                vec![
                    r.tuple.iter().map(i64::to_string).collect::<Vec<_>>().join(" "),
                    r.symbol.clone(),
                    r.numerator.clone().unwrap_or_default(),
                    r.denominator.clone().unwrap_or_default(),
                    r.indicator_active.map(|b| b.to_string()).unwrap_or_default(),
                    r.error.clone().unwrap_or_default(),
                ]
            });
            dir.write_csv(
                "symbols.csv",
                &[
                    "tuple",
                    "symbol",
                    "numerator",
                    "denominator",
                    "indicator_active",
                    "error",
                ],
                rows,
            )?;
        }
        let mut outcome = Outcome::default();
        outcome.summary.push(format!(
            "{} values, {} domain errors",
            report.evaluated, report.domain_errors
        ));
        Ok(outcome)
    }
}
