//! Command-line driver for the qal experiments.
//!
//! Every subcommand writes a run directory holding `manifest.json`, a
//! `report.json` and CSV tables. The manifest embeds the resolved
//! configuration and the SHA-256 of every artifact. Flags may also come
//! from a flat `key = value` file passed with `--config`; flags given on the
//! command line take precedence.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};
use qal_evolution::{Params64, Preset};
use serde::Serialize;

pub use error::CliError;
pub use output::{Artifact, Manifest, RunDir, RunState, MANIFEST};

/// Exit status of a successful run.
pub const EXIT_OK: i32 = 0;
/// Exit status of a failed verification, an incomplete run or an i/o error.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status of a usage error.
pub const EXIT_USAGE: i32 = 2;

/// Environment variable capping the worker threads.
pub const THREADS_ENV: &str = "QAL_THREADS";

/// File name of the JSON report.
pub const REPORT: &str = "report.json";

/// Top-level command line.
#[derive(Debug, Parser)]
#[command(
    name = "qal",
    version,
    about = "Exact identities, solver runs and measurements for a fifth-order KdV-type equation",
    arg_required_else_help = true,
    subcommand_required = true
)]
pub struct Cli {
    /// The experiment to run.
    #[command(subcommand)]
    pub command: Commands,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Commands {
    /// Exact phase factorizations, telescoping, pointwise identities and cancellations.
    Identities(commands::identities::IdentitiesArgs),
    /// Exact symbol values as numerator/denominator CSV rows.
    Symbols(commands::symbols::SymbolsArgs),
    /// Solve the equation from random or given data.
    Solve(commands::solve::SolveArgs),
    /// Measure nonlinear smoothing of the gauged Duhamel term.
    Smoothing(commands::smoothing::SmoothingArgs),
    /// Measure L⁸ space-time norms of the free flow against Sobolev norms.
    Strichartz(commands::strichartz::StrichartzArgs),
    /// Box-counting dimension of a graph or an evolved field.
    Dimension(commands::dimension::DimensionArgs),
    /// Free evolution of step data at rational times.
    Talbot(commands::talbot::TalbotArgs),
}

/// Artifact formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    /// `report.json` and JSON checkpoints.
    Json,
    /// CSV tables.
    Csv,
}

/// Flags shared by every subcommand.
#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Root seed; every random stream is derived from it by name.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory [default: qal-out/<subcommand>].
    #[arg(long)]
    #[serde(skip)]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file of flag values.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,
    /// Artifact formats to write besides the manifest.
    #[arg(long, value_delimiter = ',', default_value = "json,csv")]
    pub formats: Vec<Format>,
}

impl Common {
    /// Whether JSON artifacts are requested.
    pub fn json(&self) -> bool {
        self.formats.contains(&Format::Json)
    }

    /// Whether CSV artifacts are requested.
    pub fn csv(&self) -> bool {
        self.formats.contains(&Format::Csv)
    }
}

/// Equation coefficients: a preset with optional per-coefficient overrides.
#[derive(Debug, Clone, Args, Serialize)]
pub struct EquationArgs {
    /// Named coefficients: toy, integrable, full or linear.
    #[arg(long)]
    pub preset: Option<Preset>,
    /// Coefficient α of ∂x(u³); overrides the preset.
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: Option<f64>,
    /// Coefficient β of ∂x(u_x)²; overrides the preset.
    #[arg(long, allow_negative_numbers = true)]
    pub beta: Option<f64>,
    /// Coefficient γ of ∂x(u u_xx); overrides the preset.
    #[arg(long, allow_negative_numbers = true)]
    pub gamma: Option<f64>,
}

impl EquationArgs {
    /// Fills every unset field from `default` and returns the coefficients.
    pub fn resolve(&mut self, default: Preset) -> Result<Params64, CliError> {
        let base: Params64 = self.preset.get_or_insert(default).params();
        let p = Params64::new(
            *self.alpha.get_or_insert(base.alpha),
            *self.beta.get_or_insert(base.beta),
            *self.gamma.get_or_insert(base.gamma),
        );
        if !p.is_finite() {
            return Err(CliError::Usage("equation coefficients must be finite".into()));
        }
        Ok(p)
    }
}

/// Result of a module driver that ran to the end of its own logic.
#[derive(Debug, Default)]
pub struct Outcome {
    /// Failed exact or oracle checks.
    pub failures: Vec<String>,
    /// Why the artifacts are partial, if they are.
    pub incomplete: Option<String>,
    /// Advisory notes recorded in the manifest.
    pub warnings: Vec<String>,
    /// Lines printed to standard output.
    pub summary: Vec<String>,
}

/// A subcommand's resolved arguments and driver.
pub trait Driver: Serialize {
    /// Subcommand name.
    const NAME: &'static str;

    /// Shared flags.
    fn common(&self) -> &Common;

    /// Fills defaults that depend on other flags and validates the inputs.
    fn resolve(&mut self) -> Result<(), CliError> {
        Ok(())
    }

    /// Runs the experiment, writing artifacts into `dir`.
    fn run(&self, dir: &mut RunDir) -> Result<Outcome, CliError>;
}

fn parse(argv: Vec<OsString>) -> Result<Cli, i32> {
    let cmd = Cli::command();
    let report = |e: clap::Error| {
        let _ = e.print();
        e.exit_code()
    };
    let matches = cmd.clone().try_get_matches_from(&argv).map_err(report)?;
    let (name, sub_matches) = matches.subcommand().expect("a subcommand is required");
    let Some(path) = sub_matches.get_one::<PathBuf>("config") else {
        return Cli::from_arg_matches(&matches).map_err(report);
    };
    let sub = cmd.find_subcommand(name).expect("parsed subcommand exists");
    let extra = config::read_config(path)
        .and_then(|pairs| config::config_flags(sub, sub_matches, &pairs))
        .map_err(|e| {
            eprintln!("{e}");
            e.exit_code()
        })?;
    let mut merged = argv[..2].to_vec();
    merged.extend(extra);
    merged.extend_from_slice(&argv[2..]);
    Cli::try_parse_from(merged).map_err(report)
}

fn thread_pool() -> Result<rayon::ThreadPool, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(value) = std::env::var_os(THREADS_ENV) {
        let n = value
            .to_str()
            .and_then(|s| s.trim().parse::<usize>().ok())
            .filter(|&n| n > 0)
            .ok_or_else(|| CliError::Usage(format!("{THREADS_ENV} must be a positive integer")))?;
        builder = builder.num_threads(n);
    }
    builder.build().map_err(|e| CliError::Runtime(e.to_string()))
}

fn execute<D: Driver>(mut args: D) -> i32 {
    if let Err(e) = args.resolve() {
        eprintln!("{e}");
        return e.exit_code();
    }
    let config = match serde_json::to_value(&args) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("{e}");
            return EXIT_FAILURE;
        }
    };
    let root = args
        .common()
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("qal-out").join(D::NAME));
    let mut dir = match RunDir::create(&root, D::NAME, config) {
        Ok(d) => d,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    match args.run(&mut dir) {
        Ok(outcome) => {
            for w in &outcome.warnings {
                dir.note(format!("warning: {w}"));
            }
            for f in &outcome.failures {
                dir.note(format!("failure: {f}"));
            }
            let state = if let Some(reason) = &outcome.incomplete {
                dir.note(format!("incomplete: {reason}"));
                RunState::Incomplete
            } else if outcome.failures.is_empty() {
                RunState::Ok
            } else {
                RunState::VerificationFailed
            };
            let root = dir.root().to_path_buf();
            if let Err(e) = dir.finish(state) {
                eprintln!("{e}");
                return e.exit_code();
            }
            for line in &outcome.summary {
                println!("{line}");
            }
            for f in &outcome.failures {
                eprintln!("verification failure: {f}");
            }
            if let Some(reason) = &outcome.incomplete {
                eprintln!("incomplete: {reason}");
            }
            println!("{}: {} ({})", D::NAME, state_name(state), root.display());
            if state == RunState::Ok {
                EXIT_OK
            } else {
                EXIT_FAILURE
            }
        }
        Err(e) => {
            dir.note(format!("error: {e}"));
            let _ = dir.finish(RunState::Error);
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn state_name(state: RunState) -> &'static str {
    match state {
        RunState::Running => "running",
        RunState::Ok => "ok",
        RunState::VerificationFailed => "verification failed",
        RunState::Incomplete => "incomplete",
        RunState::Error => "error",
    }
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// exit status: 0 on success, 1 on a failed verification or an incomplete
/// run, 2 on a usage error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match parse(argv) {
        Ok(cli) => cli,
        Err(code) => return code,
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("{e}");
            return e.exit_code();
        }
    };
    pool.install(|| match cli.command {
        Commands::Identities(a) => execute(a),
        Commands::Symbols(a) => execute(a),
        Commands::Solve(a) => execute(a),
        Commands::Smoothing(a) => execute(a),
        Commands::Strichartz(a) => execute(a),
        Commands::Dimension(a) => execute(a),
        Commands::Talbot(a) => execute(a),
    })
}
