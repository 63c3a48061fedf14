//! Acceptance report: one PASS/FAIL line per criterion, with indented
//! detail lines. Documented failures are reported as known and do not fail
//! the target; any other failure exits nonzero.
//!
//! `QAL_FULL_ACCEPTANCE=1` runs the smoothing measurement at full scale
//! instead of projecting its cost.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qal_dimension::{
    dimension_band, estimate_dimension, field_dimension, square_wave, step_data, talbot_check, talbot_snapshot,
    weierstrass, weierstrass_dimension, GraphSamples,
};
use qal_evolution::{energy_balance, oracle_solve, solve, Config64, IfRk4, Params64, Preset, SolverConfig};
use qal_experiments::{smoothing_report, strichartz_probe, SmoothingConfig, SmoothingFlag, SmoothingReport};
use qal_gauge::{apply_k_gauge, free_evolution, interaction_picture, k_functional, Direction};
use qal_phase::{
    cancellation_sum, check_factorizations, check_re1_combination, check_resonant_reduction, check_telescoping,
    is_exact_zero, relative_spread, slot_broken_control, sweep_shell, BoundId, CancellationKind, ExactComplex,
    IdentityReport, Int, Rational, RationalField, SweepConfig,
};
use qal_spectral::{random_sobolev_data, stream_seed, Field64, C64};

const ROOT_SEED: u64 = 0;
const FULL_ENV: &str = "QAL_FULL_ACCEPTANCE";
type Graph = fn(f64) -> f64;

const SOBOLEV_LADDER: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

/// Bounds whose literal form is known not to saturate; each has an
/// expanded replacement that is checked alongside.
fn known_red_bounds() -> Vec<BoundId> {
    let mut v = vec![BoundId::ResonantB3];
    for (l, j) in [(3, 1), (3, 2), (4, 1), (4, 2)] {
        v.push(BoundId::FinalResonance { l, j });
    }
    v
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Pass,
    Fail,
    KnownRed,
}

struct Criterion {
    id: u32,
    title: &'static str,
    verdict: Verdict,
    details: Vec<String>,
    elapsed: Duration,
}

struct Builder {
    ok: bool,
    known_red: bool,
    details: Vec<String>,
}

impl Builder {
    fn new() -> Self {
        Self {
            ok: true,
            known_red: false,
            details: Vec::new(),
        }
    }

    fn check(&mut self, passed: bool, line: String) {
        self.ok &= passed;
        self.details
            .push(format!("{} {line}", if passed { "ok  " } else { "FAIL" }));
    }

    fn info(&mut self, line: String) {
        self.details.push(format!("info {line}"));
    }

    fn finish(self, id: u32, title: &'static str, started: Instant) -> Criterion {
        let verdict = match (self.ok, self.known_red) {
            (true, _) => Verdict::Pass,
            (false, true) => Verdict::KnownRed,
            (false, false) => Verdict::Fail,
        };
        Criterion {
            id,
            title,
            verdict,
            details: self.details,
            elapsed: started.elapsed(),
        }
    }
}

fn identity_line(b: &mut Builder, r: &IdentityReport) {
    b.check(
        r.passed(),
        format!("{}: {} cases, {} failures", r.identity, r.checked, r.failures),
    );
}

fn rel_diff(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

fn criterion_1() -> Criterion {
    let started = Instant::now();
    let mut b = Builder::new();
    for r in check_factorizations(50) {
        identity_line(&mut b, &r);
    }
    for p in [4, 5, 6] {
        let seed = stream_seed(ROOT_SEED, &format!("acceptance/telescoping_p{p}"));
        identity_line(&mut b, &check_telescoping(p, 10_000, 1000, seed));
    }
    let elapsed = started.elapsed();
    b.check(
        elapsed < Duration::from_secs(60),
        format!("runtime {elapsed:.2?} under 1 min"),
    );
    b.finish(1, "exact factorizations and telescoping", started)
}

fn criterion_2() -> Criterion {
    let started = Instant::now();
    let mut b = Builder::new();
    let mut nonzero = [0u64; 6];
    let mut checked = 0u64;
    for n in 1..=32usize {
        for i in 0..100u64 {
            let f = RationalField::random_hermitian(n, stream_seed(ROOT_SEED, &format!("acceptance/cancel/N{n}/{i}")));
            checked += 1;
            for (k, kind) in CancellationKind::ALL.into_iter().enumerate() {
                match cancellation_sum(kind, &f) {
                    Ok(s) if is_exact_zero(&s) => {}
                    _ => nonzero[k] += 1,
                }
            }
        }
    }
    let control_field = RationalField::random_hermitian(32, stream_seed(ROOT_SEED, "acceptance/control"));
    let delta = ExactComplex::new(
        Rational::new(Int::from(7), Int::from(3)),
        Rational::new(Int::from(-2), Int::from(5)),
    );
    for (k, kind) in CancellationKind::ALL.into_iter().enumerate() {
        b.check(
            nonzero[k] == 0,
            format!(
                "{}: {checked} fields with N ≤ 32, {} nonzero sums",
                kind.name(),
                nonzero[k]
            ),
        );
        let control = slot_broken_control(kind, &control_field, 3, delta.clone());
        if kind.vanishes_pointwise() {
            b.info(format!(
                "{}: weight vanishes pointwise, so no slot-broken control exists",
                kind.name()
            ));
        } else {
            let live = matches!(&control, Ok(c) if !is_exact_zero(c));
            b.check(
                live,
                format!("{}: slot-broken control at mode 3 is nonzero", kind.name()),
            );
        }
    }
    let elapsed = started.elapsed();
    b.check(
        elapsed < Duration::from_secs(300),
        format!("runtime {elapsed:.2?} under 5 min"),
    );
    b.finish(2, "exact cancellations", started)
}

fn criterion_3() -> Criterion {
    let started = Instant::now();
    let mut b = Builder::new();
    let seed = stream_seed(ROOT_SEED, "acceptance/resonant_reduction");
    identity_line(&mut b, &check_resonant_reduction(10_000, 1000, seed));
    let seed = stream_seed(ROOT_SEED, "acceptance/re1_combination");
    identity_line(&mut b, &check_re1_combination(10_000, 1000, seed));
    b.finish(3, "exact pointwise identities", started)
}

fn criterion_4() -> Criterion {
    let started = Instant::now();
    let mut b = Builder::new();
    let cfg = SweepConfig {
        seed: stream_seed(ROOT_SEED, "acceptance/sweep"),
        ..SweepConfig::default()
    };
    let known = known_red_bounds();
    let counted = BoundId::criterion_bounds();
    let mut failing = Vec::new();
    let mut replacements_ok = true;
    for bound in BoundId::all() {
        let (a, c) = (sweep_shell(bound, 6, &cfg), sweep_shell(bound, 7, &cfg));
        let spread = relative_spread(&a, &c);
        let passed = spread.is_some_and(|s| s <= 0.10);
        let fmt = |x: Option<f64>| x.map_or("none".to_string(), |v| format!("{v:.5}"));
        let line = format!(
            "{bound}: shell 64 max {} ({:?}), shell 128 max {} ({:?}), spread {}",
            fmt(a.max_ratio_f64),
            a.mode,
            fmt(c.max_ratio_f64),
            c.mode,
            spread.map_or("undefined".to_string(), |s| format!("{:.2}%", 100.0 * s)),
        );
        match bound {
            BoundId::ResonantB3Expanded | BoundId::FinalResonanceExpanded { .. } => {
                replacements_ok &= passed;
                b.check(passed, format!("[expanded form] {line}"));
            }
            _ if !counted.contains(&bound) => {
                b.info(format!("[supplementary, not counted] {line}"));
            }
            _ => {
                if !passed {
                    failing.push(bound);
                }
                b.check(passed, line);
            }
        }
    }
    b.known_red = replacements_ok && failing.iter().all(|f| known.contains(f));
    if b.known_red && !failing.is_empty() {
        b.info("the literal resonant_b3 and final_resonance bounds do not saturate; their expanded forms do".into());
    }
    b.finish(4, "symbol bound saturation", started)
}

fn final_deviation(a: &qal_evolution::Trajectory64, c: &qal_evolution::Trajectory64) -> f64 {
    a.snapshots
        .iter()
        .zip(&c.snapshots)
        .map(|(x, y)| x.max_abs_diff(y))
        .fold(0.0, f64::max)
}

fn quiet(cfg: Config64) -> Config64 {
    cfg.with_snapshot_stride(usize::MAX / 2)
        .with_diagnostic_stride(usize::MAX / 2)
}

fn criterion_5() -> Criterion {
    let started = Instant::now();
    let mut b = Builder::new();
    for preset in [Preset::Toy, Preset::Full, Preset::Integrable] {
        let p = preset.params();
        let mut worst = 0.0f64;
        let mut ok = true;
        for seed in 0..3 {
            let u0 = random_sobolev_data(0.75, 8, seed);
            let cfg = Config64::new(8, 0.01).with_snapshot_stride(500);
            match (solve(&u0, &p, &cfg), oracle_solve(&u0, &p, &cfg)) {
                (Ok(fast), Ok(slow)) => {
                    ok &= fast.times == slow.times;
                    worst = worst.max(final_deviation(&fast, &slow));
                }
                _ => ok = false,
            }
        }
        b.check(
            ok && worst < 1e-8,
            format!("{preset} oracle at N = 8, T = 0.01, 3 seeds: max coefficient error {worst:.2e}"),
        );
    }

    let u0 = random_sobolev_data(0.75, 32, 1);
    let toy = Params64::toy();
    let runs: Vec<Option<Field64>> = [1e-7, 5e-8, 2.5e-8, 1.25e-8]
        .iter()
        .map(|&dt| {
            solve(&u0, &toy, &quiet(Config64::new(32, 0.01).with_dt(dt)))
                .ok()
                .map(|t| t.final_state().clone())
        })
        .collect();
    if runs.iter().all(Option::is_some) {
        let runs: Vec<Field64> = runs.into_iter().flatten().collect();
        let diffs: Vec<f64> = runs.windows(2).map(|w| w[0].max_abs_diff(&w[1])).collect();
        for w in diffs.windows(2) {
            let order = (w[0] / w[1]).log2();
            b.check(
                (3.7..=4.3).contains(&order),
                format!(
                    "convergence order {order:.3} from successive differences {:.2e}, {:.2e}",
                    w[0], w[1]
                ),
            );
        }
    } else {
        b.check(false, "convergence ladder: a run aborted".into());
    }

    for preset in Preset::ALL {
        let u0 = random_sobolev_data(0.75, 16, 5);
        let worst = solve(&u0, &preset.params(), &Config64::new(16, 0.002)).map(|t| {
            t.diagnostics
                .iter()
                .map(|d| d.mean.abs())
                .chain(t.snapshots.iter().map(|f| f.mean().norm()))
                .fold(0.0, f64::max)
        });
        b.check(
            matches!(worst, Ok(w) if w < 1e-13),
            format!("{preset} mean conserved: max |mean| {:.1e}", worst.unwrap_or(f64::NAN)),
        );
    }

    let u0 = random_sobolev_data(0.75, 16, 6);
    let free = solve(
        &u0,
        &Params64::linear(),
        &Config64::new(16, 0.01).with_snapshot_stride(1000),
    );
    let worst = free.map(|t| {
        t.times
            .iter()
            .zip(&t.snapshots)
            .map(|(&s, f)| f.max_abs_diff(&free_evolution(&u0, s)))
            .fold(0.0, f64::max)
    });
    b.check(
        matches!(worst, Ok(w) if w <= 1e-14),
        format!(
            "free flow against closed form: max error {:.1e}",
            worst.unwrap_or(f64::NAN)
        ),
    );

    let u0 = random_sobolev_data(0.75, 16, 3);
    let traj = solve(&u0, &toy, &Config64::new(16, 0.01).with_snapshot_stride(500));
    let (defect, flux) = traj.map_or((f64::NAN, 0.0), |t| {
        energy_balance(&t)
            .iter()
            .fold((0.0f64, 0.0f64), |(d, f), e| (d.max(e.defect()), f.max(e.flux.abs())))
    });
    b.check(
        defect < 1e-8 && flux > 1e-3,
        format!("toy energy law: max |rate − flux| {defect:.1e} with max |flux| {flux:.3}"),
    );
    b.finish(5, "solver correctness", started)
}

fn criterion_6() -> Criterion {
    let started = Instant::now();
    let mut b = Builder::new();
    let mut worst_norm = 0.0f64;
    for seed in 0..8 {
        let u = random_sobolev_data(0.75, 32, seed);
        let maps = [
            interaction_picture(&u, 0.37),
            free_evolution(&u, -1.9),
            apply_k_gauge(&u, C64::new(0.0, 1.234), Direction::Forward).expect("imaginary phase"),
            apply_k_gauge(&u, C64::new(0.0, -0.5), Direction::Inverse).expect("imaginary phase"),
        ];
        for v in &maps {
            for s in SOBOLEV_LADDER {
                worst_norm = worst_norm.max(rel_diff(u.sobolev_norm(s), v.sobolev_norm(s)));
            }
        }
    }
    b.check(
        worst_norm <= 1e-12,
        format!("interaction picture and K-gauge: max relative H^s change {worst_norm:.1e}"),
    );

    let u0 = random_sobolev_data(0.75, 16, 6);
    let traj = solve(
        &u0,
        &Preset::Full.params(),
        &Config64::new(16, 0.002).with_snapshot_stride(100),
    );
    match traj {
        Ok(traj) => {
            let tilde = traj.tilde_transform().expect("solution trajectory");
            let back = tilde.inverse_tilde_transform().expect("tilde trajectory");
            let mut round = 0.0f64;
            let mut norm = 0.0f64;
            for ((u, v), w) in traj.snapshots.iter().zip(&tilde.snapshots).zip(&back.snapshots) {
                round = round.max(u.max_abs_diff(w));
                for s in SOBOLEV_LADDER {
                    norm = norm.max(rel_diff(u.sobolev_norm(s), v.sobolev_norm(s)));
                }
            }
            b.check(
                round <= 1e-12,
                format!("tilde round trip: max coefficient error {round:.1e}"),
            );
            b.check(
                norm <= 1e-12,
                format!("tilde transform: max relative H^s change {norm:.1e}"),
            );
            let mut re = traj.gauge.k_samples().iter().map(|k| k.re.abs()).fold(0.0, f64::max);
            for f in &traj.snapshots {
                re = re.max(k_functional(f).map_or(f64::INFINITY, |k| k.re.abs()));
            }
            b.check(re <= 1e-13, format!("K purely imaginary: max |Re K| {re:.1e}"));
        }
        Err(e) => b.check(false, format!("full preset run failed: {e}")),
    }
    b.finish(6, "gauge isometry", started)
}

/// Measures the cost of one step at truncation `n`.
fn step_cost(n: usize) -> Duration {
    let u0 = random_sobolev_data(0.75, n, 1);
    let mut half: Vec<C64> = (0..=n as i64).map(|k| u0.coeff(k)).collect();
    let mut stepper = IfRk4::new(n, Params64::toy(), SolverConfig::<f64>::default_dt(n));
    let reps = 200;
    let started = Instant::now();
    for _ in 0..reps {
        stepper.advance(&mut half);
    }
    started.elapsed() / reps
}

fn smoothing_checks(b: &mut Builder, r: &SmoothingReport, label: &str) {
    let gain = r.measured_gain;
    b.check(
        gain.is_some_and(|g| g >= 0.25),
        format!(
            "{label}: measured gain {} (target 0.25, ceiling {:.3})",
            gain.map_or("none".to_string(), |g| format!("{g:.3}")),
            r.epsilon_ceiling
        ),
    );
    let exponent = r.amplitude_scaling.as_ref().and_then(|a| a.exponent);
    b.check(
        exponent.is_some_and(|e| (e - 2.0).abs() <= 0.3),
        format!(
            "{label}: amplitude exponent {}",
            exponent.map_or("none".to_string(), |e| format!("{e:.3}"))
        ),
    );
    if !r.flags.is_empty() {
        b.info(format!("{label}: flags {:?}", r.flags));
    }
}

fn criterion_7() -> Criterion {
    let started = Instant::now();
    let mut b = Builder::new();
    let cfg = SmoothingConfig::default();
    let seeds: Vec<u64> = (0..8)
        .map(|i| stream_seed(ROOT_SEED, &format!("smoothing/{i}")))
        .collect();
    let toy = Params64::toy();
    let full = std::env::var(FULL_ENV).is_ok_and(|v| v == "1");

    if full {
        match smoothing_report(0.75, &toy, &cfg, &seeds) {
            Ok(r) => {
                smoothing_checks(&mut b, &r, "N = 256, T = 0.005, 8 seeds");
                b.check(
                    !r.has_flag(SmoothingFlag::Unstable),
                    "every run reached the horizon".into(),
                );
            }
            Err(e) => b.check(false, format!("smoothing measurement failed: {e}")),
        }
        let elapsed = started.elapsed();
        b.check(
            elapsed < Duration::from_secs(1800),
            format!("runtime {elapsed:.2?} under 30 min"),
        );
    } else {
        let top = *cfg.n_ladder.last().expect("nonempty ladder");
        let mut projected = 0.0f64;
        for &n in &cfg.n_ladder {
            let (steps, _) = Config64::new(n, cfg.t_end).step_plan();
            let cost = step_cost(n).as_secs_f64();
            let mut runs = seeds.len();
            if n == top {
                runs += seeds.len() * cfg.amplitudes.iter().filter(|&&a| a != 1.0).count();
            }
            projected += steps as f64 * cost * runs as f64;
            b.info(format!(
                "N = {n}: {steps} steps per run at {:.1} µs per step, {runs} runs",
                cost * 1e6
            ));
        }
        b.check(
            projected < 1800.0,
            format!(
                "projected runtime {:.0} h at full scale exceeds 30 min; set {FULL_ENV}=1 to run it",
                projected / 3600.0
            ),
        );
        b.known_red = true;
    }

    let reduced = SmoothingConfig {
        n_ladder: vec![32],
        ..cfg
    };
    let sub_started = Instant::now();
    match smoothing_report(0.75, &toy, &reduced, &seeds) {
        Ok(r) => {
            let mut sub = Builder::new();
            smoothing_checks(&mut sub, &r, "reduced scale N = 32, T = 0.005, 8 seeds");
            for d in sub.details {
                b.info(format!("[reduced, not counted] {d}"));
            }
            b.info(format!("[reduced, not counted] runtime {:.2?}", sub_started.elapsed()));
        }
        Err(e) => b.info(format!("[reduced, not counted] failed: {e}")),
    }
    b.finish(7, "nonlinear smoothing", started)
}

fn criterion_8() -> Criterion {
    let started = Instant::now();
    let mut b = Builder::new();
    let closed: [(&str, Graph, f64, f64, &[usize]); 3] = [
        ("line", |x| x, 1.0, 0.05, &[1 << 16]),
        ("square wave", square_wave, 1.0, 0.05, &[1 << 16]),
        (
            "Weierstrass",
            |x| weierstrass(x, 20),
            weierstrass_dimension(),
            0.1,
            &[1 << 16, 1 << 18],
        ),
    ];
    for (name, f, reference, tol, sizes) in closed {
        for &m in sizes {
            let d = GraphSamples::from_fn(m, f)
                .and_then(|g| estimate_dimension(&g))
                .map(|e| e.slope);
            b.check(
                matches!(d, Ok(d) if (d - reference).abs() <= tol),
                format!(
                    "{name} at {m} samples: {:.4} against {reference:.4} ± {tol}",
                    d.unwrap_or(f64::NAN)
                ),
            );
        }
    }

    let n = 512;
    let samples = 8 * n;
    let g = step_data(n);
    for q in [2, 3, 5, 6, 10, 15, 30] {
        let check = talbot_check(&g, 1, q);
        let d = talbot_snapshot(&g, 1, q)
            .and_then(|f| field_dimension(&f, samples))
            .map(|p| p.d);
        let (disc, divides) = check
            .as_ref()
            .map_or((f64::NAN, false), |c| (c.max_discrepancy, c.divides_modulus));
        b.check(
            divides && disc <= 1e-12,
            format!("Talbot q = {q}: translate discrepancy {disc:.1e}"),
        );
        b.check(
            matches!(d, Ok(d) if (d - 1.0).abs() <= 0.1),
            format!("Talbot q = {q}: dimension {:.4} against 1 ± 0.1", d.unwrap_or(f64::NAN)),
        );
    }
    let d = field_dimension(&free_evolution(&g, 1.0), samples).map(|p| p.d);
    b.check(
        matches!(d, Ok(d) if (1.2..=1.9).contains(&d)),
        format!(
            "step data at generic t = 1: dimension {:.4} in [1.2, 1.9]",
            d.unwrap_or(f64::NAN)
        ),
    );
    let s = 0.75;
    if let Some(band) = dimension_band(s) {
        let u0 = random_sobolev_data(s, n, stream_seed(ROOT_SEED, "acceptance/band"));
        if let Ok(p) = field_dimension(&free_evolution(&u0, 1.0), samples) {
            let inside = band.lower <= p.d && p.d <= band.upper;
            b.info(format!(
                "advisory: H^{s} data at t = 1 has dimension {:.4}, band [{:.4}, {:.4}], {}",
                p.d,
                band.lower,
                band.upper,
                if inside { "inside" } else { "outside" }
            ));
        }
    }
    b.finish(8, "dimension calibration and Talbot effect", started)
}

fn criterion_9() -> Criterion {
    let started = Instant::now();
    let mut b = Builder::new();
    let ladder = [32, 64, 128, 256, 512];
    let seeds: Vec<u64> = (0..4)
        .map(|i| stream_seed(ROOT_SEED, &format!("strichartz/{i}")))
        .collect();
    match strichartz_probe(3.0 / 32.0, &ladder, &seeds) {
        Ok(p) => {
            let fmt = |r: &[f64]| r.iter().map(|x| format!("{x:.4}")).collect::<Vec<_>>().join(", ");
            b.check(
                p.dirichlet_ladder.spread <= 3.0,
                format!(
                    "Dirichlet kernel ratios [{}], max/min {:.3}",
                    fmt(&p.dirichlet_ladder.ratios),
                    p.dirichlet_ladder.spread
                ),
            );
            match &p.random_ladder {
                Some(r) => b.check(
                    r.spread <= 3.0,
                    format!("random data ratios [{}], max/min {:.3}", fmt(&r.ratios), r.spread),
                ),
                None => b.check(false, "random ladder missing".into()),
            }
            if !p.converged {
                b.info("some time grids did not converge to 1%".into());
            }
        }
        Err(e) => b.check(false, format!("probe failed: {e}")),
    }
    match strichartz_probe(0.0, &ladder, &seeds) {
        Ok(p) => b.info(format!(
            "a = 0 Dirichlet trend {}, max/min {:.3} (recorded only)",
            p.dirichlet_ladder
                .trend
                .map_or("n/a".to_string(), |t| format!("{t:.4}")),
            p.dirichlet_ladder.spread
        )),
        Err(e) => b.info(format!("a = 0 probe failed: {e}")),
    }
    b.finish(9, "Strichartz probe", started)
}

fn main() -> ExitCode {
    let criteria: [fn() -> Criterion; 9] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
    ];
    let mut unexpected = 0;
    let mut known = 0;
    for run in criteria {
        let c = run();
        let tag = match c.verdict {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::KnownRed => "FAIL (known)",
        };
        println!("criterion {} {tag:<12} {} [{:.1?}]", c.id, c.title, c.elapsed);
        for d in &c.details {
            println!("    {d}");
        }
        match c.verdict {
            Verdict::Pass => {}
            Verdict::Fail => unexpected += 1,
            Verdict::KnownRed => known += 1,
        }
    }
    println!(
        "acceptance: {} passed, {known} known failures, {unexpected} unexpected failures",
        9 - known - unexpected
    );
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
