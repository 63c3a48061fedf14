use proptest::prelude::*;
use qal_evolution::{
    convolution_nonlinearity, energy_balance, energy_flux, energy_rate, nonlinearity, oracle_solve,
    oracle_solve_with_tolerance, solve, step, Config64, EvolutionError, Params64, Preset, RunStatus, SolveError,
    SolverConfig, Trajectory64, Variable, ORACLE_MAX_TRUNCATION,
};
use qal_gauge::k_functional;
use qal_spectral::{random_sobolev_data, Field32, Field64, C64};

const SOBOLEV_LADDER: [f64; 4] = [0.0, 0.5, 1.0, 2.0];

fn cos_field(n_max: usize) -> Field64 {
    let mut f = Field64::zeros(n_max);
    f.set_real_pair(1, C64::new(0.5, 0.0));
    f
}

fn quiet(cfg: Config64) -> Config64 {
    cfg.with_snapshot_stride(usize::MAX / 2)
        .with_diagnostic_stride(usize::MAX / 2)
}

fn final_state(u0: &Field64, p: &Params64, n: usize, t: f64, dt: f64) -> Field64 {
    solve(u0, p, &quiet(Config64::new(n, t).with_dt(dt)))
        .expect("stable run")
        .final_state()
        .clone()
}

fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
}

#[test]
fn free_step_is_an_exact_translation() {
    for dt in [1e-3, 0.37, 2.0, 17.5] {
        let u = step(&cos_field(8), &Params64::linear(), dt).unwrap();
        let mut expected = Field64::zeros(8);
        expected.set_real_pair(1, C64::from_polar(0.5, dt));
        assert!(u.max_abs_diff(&expected) < 1e-14, "dt = {dt}");
    }
}

#[test]
fn free_solve_matches_the_closed_form() {
    let u0 = random_sobolev_data(0.75, 16, 4);
    let cfg = Config64::new(16, 0.01).with_dt(1e-4);
    let traj = solve(&u0, &Params64::linear(), &cfg).unwrap();
    for (f, w) in traj.snapshots.iter().zip(traj.free_reference()) {
        assert!(f.max_abs_diff(&w) < 1e-13);
    }
}

#[test]
fn single_step_is_exactly_hermitian() {
    for preset in Preset::ALL {
        let u = random_sobolev_data(0.75, 16, 9);
        let v = step(&u, &preset.params(), 1e-6).unwrap();
        assert_eq!(v.hermitian_defect(), 0.0, "{preset}");
        assert_eq!(v.mean(), C64::new(0.0, 0.0), "{preset}");
    }
}

#[test]
fn step_rejects_non_finite_inputs() {
    let u = random_sobolev_data(0.75, 8, 1);
    assert!(step(&u, &Params64::new(f64::NAN, 0.0, 0.0), 1e-6).is_err());
    assert!(step(&u, &Params64::toy(), f64::INFINITY).is_err());
}

#[test]
fn nonlinearity_of_zero_is_zero() {
    for preset in Preset::ALL {
        let z = nonlinearity(&Field64::zeros(8), &preset.params());
        assert_eq!(z.max_abs(), 0.0);
    }
}

#[test]
fn toy_nonlinearity_of_cosine_is_minus_two_sine_two_x() {
    let out = nonlinearity(&cos_field(8), &Params64::toy());
    for n in -8..=8_i64 {
        let expected = match n {
            2 => C64::new(0.0, 1.0),
            -2 => C64::new(0.0, -1.0),
            _ => C64::new(0.0, 0.0),
        };
        assert!((out.coeff(n) - expected).norm() < 1e-14, "mode {n}: {}", out.coeff(n));
    }
}

#[test]
fn transform_kernel_matches_direct_convolution() {
    let params = [
        Preset::Toy.params(),
        Preset::Full.params(),
        Preset::Integrable.params(),
        Params64::new(0.7, -1.3, 0.4),
    ];
    for n in [4, 8, 12] {
        for seed in 0..3 {
            let u = random_sobolev_data(0.5, n, seed);
            for p in &params {
                let fast = nonlinearity(&u, p);
                let direct = convolution_nonlinearity(&u, p);
                let scale = direct.max_abs().max(1.0);
                assert!(fast.max_abs_diff(&direct) < 1e-12 * scale, "N = {n}, {p:?}");
            }
        }
    }
}

#[test]
fn solve_matches_oracle_on_all_presets() {
    for preset in [Preset::Toy, Preset::Full, Preset::Integrable] {
        for seed in 0..3 {
            let u0 = random_sobolev_data(0.75, 8, seed);
            let cfg = Config64::new(8, 0.01).with_snapshot_stride(500);
            let p = preset.params();
            let fast = solve(&u0, &p, &cfg).unwrap();
            let slow = oracle_solve(&u0, &p, &cfg).unwrap();
            assert_eq!(fast.times, slow.times);
            let dev = fast
                .snapshots
                .iter()
                .zip(&slow.snapshots)
                .map(|(a, b)| a.max_abs_diff(b))
                .fold(0.0, f64::max);
            assert!(dev < 1e-8, "{preset} seed {seed}: deviation {dev:e}");
        }
    }
}

#[test]
fn oracle_free_flow_matches_closed_form() {
    let u0 = random_sobolev_data(0.75, 12, 2);
    let cfg = Config64::new(12, 0.01).with_snapshot_stride(1000);
    let traj = oracle_solve(&u0, &Params64::linear(), &cfg).unwrap();
    for (f, w) in traj.snapshots.iter().zip(traj.free_reference()) {
        assert!(f.max_abs_diff(&w) < 1e-12);
    }
}

#[test]
fn oracle_is_converged_in_its_tolerance() {
    for seed in 0..3 {
        let u0 = random_sobolev_data(0.75, 8, seed);
        let cfg = quiet(Config64::new(8, 0.01));
        let p = Params64::toy();
        let a = oracle_solve_with_tolerance(&u0, &p, &cfg, 1e-12).unwrap();
        let b = oracle_solve_with_tolerance(&u0, &p, &cfg, 5e-13).unwrap();
        let change = a.final_state().max_abs_diff(b.final_state());
        assert!(change < 1e-11, "seed {seed}: {change:e}");
    }
}

#[test]
fn oracle_rejects_large_truncations() {
    let n = ORACLE_MAX_TRUNCATION + 1;
    let u0 = random_sobolev_data(0.75, n, 0);
    let err = oracle_solve(&u0, &Params64::toy(), &Config64::new(n, 0.01)).unwrap_err();
    assert!(matches!(err, EvolutionError::OracleTooLarge { max: 12, got: 13 }));
}

#[test]
fn oracle_rejects_nonpositive_tolerance() {
    let u0 = random_sobolev_data(0.75, 8, 0);
    let cfg = Config64::new(8, 0.01);
    assert!(oracle_solve_with_tolerance(&u0, &Params64::toy(), &cfg, 0.0).is_err());
}

#[test]
fn convergence_order_is_four() {
    let u0 = random_sobolev_data(0.75, 32, 1);
    let p = Params64::toy();
    let runs: Vec<Field64> = [1e-7, 5e-8, 2.5e-8, 1.25e-8]
        .iter()
        .map(|&dt| final_state(&u0, &p, 32, 0.01, dt))
        .collect();
    let diffs: Vec<f64> = runs.windows(2).map(|w| w[0].max_abs_diff(&w[1])).collect();
    for w in diffs.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!((3.7..=4.3).contains(&order), "order {order} from {diffs:?}");
    }
}

#[test]
fn mean_is_conserved_for_every_preset() {
    for preset in Preset::ALL {
        let u0 = random_sobolev_data(0.75, 16, 5);
        let traj = solve(&u0, &preset.params(), &Config64::new(16, 0.002)).unwrap();
        assert!(traj.diagnostics.iter().all(|d| d.mean.abs() < 1e-13));
        assert!(traj.snapshots.iter().all(|f| f.mean().norm() < 1e-13));
    }
}

#[test]
fn nonzero_mean_is_projected_with_a_warning() {
    let mut u0 = random_sobolev_data(0.75, 8, 0);
    u0.set(0, C64::new(0.3, 0.0));
    let traj = solve(&u0, &Params64::toy(), &Config64::new(8, 1e-4)).unwrap();
    assert_eq!(traj.warnings.len(), 1);
    assert_eq!(traj.initial_state().mean(), C64::new(0.0, 0.0));
    let clean = solve(&u0.mean_zero(), &Params64::toy(), &Config64::new(8, 1e-4)).unwrap();
    assert!(clean.warnings.is_empty());
    assert_eq!(clean.final_state(), traj.final_state());
}

#[test]
fn toy_energy_balance_holds_at_every_snapshot() {
    let u0 = random_sobolev_data(0.75, 16, 3);
    let cfg = Config64::new(16, 0.01).with_snapshot_stride(500);
    let traj = solve(&u0, &Params64::toy(), &cfg).unwrap();
    let balance = energy_balance(&traj);
    assert_eq!(balance.len(), traj.snapshots.len());
    for b in &balance {
        assert!(b.defect() < 1e-8, "t = {}: {} vs {}", b.t, b.rate, b.flux);
    }
    assert!(balance.iter().any(|b| b.flux.abs() > 1e-3));
}

#[test]
fn energy_change_equals_the_integrated_flux() {
    let u0 = random_sobolev_data(0.75, 16, 3);
    let dt = 2.5e-7;
    let traj = solve(&u0, &Params64::toy(), &Config64::new(16, 0.002).with_dt(dt)).unwrap();
    let energy: Vec<f64> = traj.diagnostics.iter().map(|d| 0.5 * d.l2 * d.l2).collect();
    let flux: Vec<f64> = traj.snapshots.iter().map(|f| energy_flux(f, &traj.params)).collect();
    let steps = flux.len() - 1;
    assert_eq!(steps % 2, 0);
    let integral: f64 = (0..steps)
        .step_by(2)
        .map(|k| dt / 3.0 * (flux[k] + 4.0 * flux[k + 1] + flux[k + 2]))
        .sum();
    let change = energy[steps] - energy[0];
    assert!(change.abs() > 1e-3);
    assert!(
        (change - integral).abs() < 1e-6 * change.abs(),
        "{change} vs {integral}"
    );
}

#[test]
fn integrable_and_linear_flows_have_no_energy_flux() {
    let u = random_sobolev_data(0.75, 16, 8);
    for preset in [Preset::Integrable, Preset::Linear] {
        let p: Params64 = preset.params();
        assert_eq!(energy_flux(&u, &p), 0.0);
        assert!(energy_rate(&u, &p).abs() < 1e-10);
    }
    let cfg = Config64::new(16, 0.002).with_dt(2.5e-7);
    let traj = solve(&u, &Preset::Integrable.params(), &cfg).unwrap();
    let l2 = traj.diagnostics[0].l2;
    assert!(traj.diagnostics.iter().all(|d| rel_close(d.l2, l2, 1e-10)));
}

#[test]
fn zero_data_gives_the_zero_trajectory() {
    let traj = solve(&Field64::zeros(8), &Params64::toy(), &Config64::new(8, 1e-3)).unwrap();
    assert!(traj.snapshots.iter().all(|f| f.max_abs() == 0.0));
    assert!(traj.gauge.cumulative().iter().all(|&c| c == 0.0));
    assert_eq!(traj.status, RunStatus::Complete);
}

#[test]
fn snapshot_times_start_at_zero_and_end_at_the_horizon() {
    let cfg = Config64::new(8, 1e-3).with_dt(3e-5).with_snapshot_stride(7);
    let traj = solve(&random_sobolev_data(0.75, 8, 0), &Params64::toy(), &cfg).unwrap();
    let (steps, h) = cfg.step_plan();
    assert_eq!(steps, 34);
    assert!((h * steps as f64 - 1e-3).abs() < 1e-18);
    assert_eq!(traj.steps_taken, steps);
    assert_eq!(traj.times[0], 0.0);
    assert_eq!(*traj.times.last().unwrap(), 1e-3);
    assert!(traj.times.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(traj.times.len(), 1 + 34 / 7 + 1);
    assert_eq!(traj.gauge.times(), traj.times.as_slice());
    assert_eq!(traj.diagnostics.len(), 35);
}

#[test]
fn invalid_configurations_are_rejected() {
    let u0 = random_sobolev_data(0.75, 8, 0);
    let p = Params64::toy();
    let bad = [
        Config64::new(8, 1e-3).with_dt(0.0),
        Config64::new(8, -1.0),
        Config64::new(8, 1e-3).with_snapshot_stride(0),
    ];
    for cfg in bad {
        assert!(matches!(solve(&u0, &p, &cfg), Err(SolveError::Invalid(_))));
    }
    let small = random_sobolev_data(0.75, 3, 0);
    assert!(solve(&small, &p, &Config64::new(3, 1e-3)).is_err());
    assert!(solve(&u0, &p, &Config64::new(16, 1e-3)).is_err());
    let mut broken = u0.clone();
    broken.set(2, C64::new(1.0, 0.0));
    assert!(matches!(
        solve(&broken, &p, &Config64::new(8, 1e-3)),
        Err(SolveError::Invalid(_))
    ));
}

#[test]
fn instability_aborts_with_a_partial_trajectory() {
    let u0 = random_sobolev_data(0.75, 64, 1);
    let cfg = Config64::new(64, 0.01).with_dt(1e-5).with_snapshot_stride(10);
    let err = solve(&u0, &Params64::toy(), &cfg).unwrap_err();
    let partial = err.partial().expect("partial trajectory");
    assert!(matches!(
        partial.status,
        RunStatus::Unstable { .. } | RunStatus::NonFinite { .. }
    ));
    assert!(partial.steps_taken < 1000);
    assert!(*partial.times.last().unwrap() < 0.01);
    assert_eq!(partial.times.len(), partial.snapshots.len());
    assert!(partial.snapshots.iter().all(|f| f.is_finite()));
}

#[test]
fn tilde_transform_round_trips_and_is_isometric() {
    let u0 = random_sobolev_data(0.75, 16, 6);
    let cfg = Config64::new(16, 0.002).with_snapshot_stride(200);
    let traj = solve(&u0, &Params64::toy(), &cfg).unwrap();
    let tilde = traj.tilde_transform().unwrap();
    assert_eq!(tilde.variable, Variable::Tilde);
    assert!(tilde.tilde_transform().is_err());
    let back = tilde.inverse_tilde_transform().unwrap();
    for ((u, v), w) in traj.snapshots.iter().zip(&tilde.snapshots).zip(&back.snapshots) {
        assert!(u.max_abs_diff(w) < 1e-12);
        for s in SOBOLEV_LADDER {
            assert!(rel_close(u.sobolev_norm(s), v.sobolev_norm(s), 1e-12));
        }
    }
    assert!(traj.gauge.cumulative().last().unwrap().abs() > 0.0);
}

#[test]
fn free_flow_has_a_trivial_gauge() {
    let u0 = random_sobolev_data(0.75, 16, 6);
    let cfg = Config64::new(16, 0.01).with_snapshot_stride(1000);
    let traj = solve(&u0, &Params64::linear(), &cfg).unwrap();
    assert!(traj.gauge.cumulative().iter().all(|&c| c == 0.0));
    let tilde = traj.tilde_transform().unwrap();
    assert_eq!(tilde.snapshots, traj.snapshots);
    assert_eq!(traj.snapshots, traj.free_reference());
    let small = random_sobolev_data(0.75, 8, 6);
    let cfg = Config64::new(8, 0.01).with_snapshot_stride(1000);
    let slow = oracle_solve(&small, &Params64::linear(), &cfg).unwrap();
    assert!(slow.gauge.k_imag().iter().all(|&k| k == 0.0));
}

#[test]
fn recorded_k_is_purely_imaginary() {
    let u0 = random_sobolev_data(0.75, 16, 6);
    let traj = solve(
        &u0,
        &Preset::Full.params(),
        &Config64::new(16, 0.002).with_snapshot_stride(100),
    )
    .unwrap();
    for (f, k) in traj.snapshots.iter().zip(traj.gauge.k_samples()) {
        assert_eq!(k.re, 0.0);
        let direct = k_functional(f).unwrap();
        assert!(direct.re.abs() < 1e-13);
        assert!(rel_close(direct.im, k.im, 1e-12));
    }
}

#[test]
fn trajectory_json_round_trips() {
    let u0 = random_sobolev_data(0.75, 8, 2);
    let cfg = Config64::new(8, 1e-4).with_snapshot_stride(10);
    let traj = solve(&u0, &Preset::Full.params(), &cfg).unwrap();
    let back = Trajectory64::from_json_str(&traj.to_json_string()).unwrap();
    assert_eq!(back, traj);
    assert!(Trajectory64::from_json_str("{\"params\": 3}").is_err());
}

#[test]
fn single_precision_solver_tracks_double() {
    let u0 = random_sobolev_data(0.75, 8, 1);
    let cfg64 = Config64::new(8, 1e-3).with_dt(1e-5);
    let cfg32 = SolverConfig::<f32>::new(8, 1e-3).with_dt(1e-5);
    let u32_: Field32 = u0.cast();
    let a = solve(&u0, &Params64::toy(), &cfg64).unwrap();
    let b = solve(&u32_, &Preset::Toy.params(), &cfg32).unwrap();
    let dev = a.final_state().max_abs_diff(&b.final_state().cast());
    assert!(dev < 1e-4, "{dev}");
}

#[test]
fn presets_parse_by_name() {
    for preset in Preset::ALL {
        assert_eq!(preset.name().parse::<Preset>().unwrap(), preset);
    }
    assert!("kdv".parse::<Preset>().is_err());
    let toy: Params64 = Preset::Toy.params();
    assert_eq!((toy.alpha, toy.beta, toy.gamma), (0.0, 0.0, 2.0));
    assert!(Preset::Integrable.params::<f64>().is_integrable());
    assert!(Preset::Linear.params::<f64>().is_linear());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn nonlinearity_has_zero_mean(
        seed in 0u64..10_000,
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
        gamma in -3.0f64..3.0,
    ) {
        let u = random_sobolev_data(0.5, 12, seed);
        let out = nonlinearity(&u, &Params64::new(alpha, beta, gamma));
        prop_assert!(out.mean().norm() == 0.0);
        prop_assert!(out.hermitian_defect() == 0.0);
    }

    #[test]
    fn kernel_agrees_with_convolution(
        seed in 0u64..10_000,
        n in 4usize..=10,
        alpha in -3.0f64..3.0,
        beta in -3.0f64..3.0,
        gamma in -3.0f64..3.0,
    ) {
        let u = random_sobolev_data(0.5, n, seed);
        let p = Params64::new(alpha, beta, gamma);
        let direct = convolution_nonlinearity(&u, &p);
        let scale = direct.max_abs().max(1.0);
        prop_assert!(nonlinearity(&u, &p).max_abs_diff(&direct) < 1e-12 * scale);
    }

    #[test]
    fn free_solve_preserves_every_sobolev_norm(seed in 0u64..10_000, t in 0.0f64..1.0) {
        let u = random_sobolev_data(0.75, 16, seed);
        let traj = solve(&u, &Params64::linear(), &Config64::new(16, t).with_dt(0.05)).unwrap();
        for s in SOBOLEV_LADDER {
            prop_assert!(rel_close(u.sobolev_norm(s), traj.final_state().sobolev_norm(s), 1e-13));
        }
    }
}
