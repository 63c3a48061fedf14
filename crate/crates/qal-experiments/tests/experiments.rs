use std::collections::HashMap;

use proptest::prelude::*;
use qal_evolution::{solve, Config64, Params64, Preset};
use qal_experiments::*;
use qal_spectral::{random_sobolev_data, Complex, Field64};

fn quick(n: usize, t_end: f64) -> SmoothingConfig {
    SmoothingConfig {
        n_ladder: vec![n],
        t_end,
        amplitudes: vec![],
        time_samples: 4,
        ..Default::default()
    }
}

#[test]
fn ceiling_is_two_s_minus_one_minus_the_strichartz_loss() {
    assert_eq!(epsilon_ceiling(0.75), 0.40625);
    assert_eq!(epsilon_ceiling(0.5), 0.0);
    assert_eq!(epsilon_ceiling(1.2), 1.0);
    assert_eq!(WELL_POSEDNESS_THRESHOLD, 35.0 / 64.0);
}

#[test]
fn data_tail_decays_at_s_plus_one_half() {
    for (s, n, seed) in [(0.75, 64, 1u64), (0.6, 256, 7), (1.0, 32, 3)] {
        let u0 = random_sobolev_data(s, n, seed);
        let (lo, hi) = default_window(n);
        let fit = fit_tail(&u0, lo, hi).unwrap();
        assert!((fit.decay - (s + 0.5)).abs() < 1e-12, "s = {s}");
        assert!(fit.residual < 1e-12);
        assert_eq!(fit.points, hi - lo + 1);
    }
    assert_eq!(default_window(256), (32, 128));
    assert_eq!(default_window(100), (13, 50));
}

#[test]
fn tail_fits_skip_zero_modes_and_need_two_points() {
    let f = Field64::from_fn(16, |n| {
        if n % 2 == 0 {
            Complex::new(0.0, 0.0)
        } else {
            Complex::new((n.abs() as f64).powf(-2.0), 0.0)
        }
    });
    let fit = fit_tail(&f, 1, 16).unwrap();
    assert_eq!(fit.points, 8);
    assert!((fit.decay - 2.0).abs() < 1e-12);
    assert!(fit_tail(&Field64::zeros(16), 1, 16).is_none());
    assert!(least_squares(&[1.0], &[2.0]).is_none());
    assert!(least_squares(&[1.0, 1.0], &[2.0, 3.0]).is_none());
}

#[test]
fn free_equation_gives_an_exactly_zero_difference() {
    let u0 = random_sobolev_data(0.75, 16, 5);
    let traj = solve(
        &u0,
        &Params64::linear(),
        &Config64::new(16, 1e-4).with_snapshot_stride(10),
    )
    .unwrap();
    for d in duhamel_difference(&traj).unwrap() {
        assert!(d.coeffs().iter().all(|c| *c == Complex::new(0.0, 0.0)));
    }
    let report = smoothing_report(0.75, &Params64::linear(), &quick(16, 1e-4), &[1, 2]).unwrap();
    assert!(report.has_flag(SmoothingFlag::Linear));
    assert!(!report.has_flag(SmoothingFlag::Inconclusive));
    assert_eq!(report.measured_gain, None);
    let point = &report.ladder[0];
    assert_eq!(point.gain, None);
    assert!(point
        .seeds
        .iter()
        .all(|s| s.sup_difference == 0.0 && s.difference_fit.is_none()));
    assert!(point.time_series.iter().all(|t| t.norm == 0.0));
}

#[test]
fn reports_are_bitwise_reproducible() {
    let cfg = SmoothingConfig {
        amplitudes: vec![1.0, 0.5],
        ..quick(16, 2e-4)
    };
    let a = smoothing_report(0.75, &Preset::Toy.params(), &cfg, &[3, 1, 2]).unwrap();
    let b = smoothing_report(0.75, &Preset::Toy.params(), &cfg, &[3, 1, 2]).unwrap();
    assert_eq!(a, b);
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    let seeds: Vec<u64> = a.ladder[0].seeds.iter().map(|s| s.seed).collect();
    assert_eq!(seeds, vec![3, 1, 2]);
    let back: SmoothingReport = serde_json::from_str(&serde_json::to_string(&a).unwrap()).unwrap();
    assert_eq!(back, a);
}

#[test]
fn triangle_envelope_holds_at_every_snapshot() {
    for preset in [Preset::Toy, Preset::Full, Preset::Integrable] {
        let report = smoothing_report(0.75, &preset.params(), &quick(24, 5e-4), &[1, 2]).unwrap();
        assert!(!report.has_flag(SmoothingFlag::EnvelopeViolated), "{preset:?}");
        assert!(report.ladder[0]
            .seeds
            .iter()
            .all(|s| s.envelope_ok && s.sup_difference > 0.0));
    }
}

#[test]
fn regularity_at_the_threshold_is_flagged() {
    let report = smoothing_report(0.5, &Preset::Toy.params(), &quick(16, 1e-4), &[1]).unwrap();
    assert!(report.has_flag(SmoothingFlag::BelowThreshold));
    assert!(!report.warnings.is_empty());
    assert_eq!(report.epsilon_ceiling, 0.0);
}

#[test]
fn fits_above_the_residual_threshold_are_inconclusive() {
    let cfg = SmoothingConfig {
        residual_threshold: 0.0,
        ..quick(16, 2e-4)
    };
    let report = smoothing_report(0.75, &Preset::Toy.params(), &cfg, &[1, 2]).unwrap();
    assert!(report.has_flag(SmoothingFlag::Inconclusive));
    assert_eq!(report.measured_gain, None);
    assert!(report.ladder[0].gain.is_some());
}

#[test]
fn unstable_runs_are_flagged_not_dropped() {
    let cfg = SmoothingConfig {
        dt: Some(1e-5),
        ..quick(64, 1e-3)
    };
    let report = smoothing_report(0.75, &Preset::Toy.params(), &cfg, &[1]).unwrap();
    assert!(report.has_flag(SmoothingFlag::Unstable));
    assert!(report.has_flag(SmoothingFlag::Inconclusive));
    assert!(report.ladder[0].seeds[0].aborted.is_some());
    assert_eq!(report.measured_gain, None);
}

#[test]
fn invalid_configurations_are_rejected() {
    let toy = Preset::Toy.params();
    let bad = [
        SmoothingConfig {
            n_ladder: vec![],
            ..Default::default()
        },
        SmoothingConfig {
            t_end: 0.0,
            ..Default::default()
        },
        SmoothingConfig {
            amplitudes: vec![0.0],
            ..Default::default()
        },
        SmoothingConfig {
            dt: Some(-1.0),
            ..Default::default()
        },
    ];
    for cfg in bad {
        assert!(matches!(
            smoothing_report(0.75, &toy, &cfg, &[1]),
            Err(ExperimentError::Config(_))
        ));
    }
    assert!(smoothing_report(0.75, &toy, &quick(16, 1e-4), &[]).is_err());
    assert!(smoothing_report(f64::NAN, &toy, &quick(16, 1e-4), &[1]).is_err());
}

#[test]
fn toy_smoothing_gain_and_quadratic_scaling_at_reduced_scale() {
    let cfg = SmoothingConfig {
        n_ladder: vec![32],
        ..Default::default()
    };
    let report = smoothing_report(0.75, &Preset::Toy.params(), &cfg, &[1, 2, 3, 4]).unwrap();
    assert!(report.flags.is_empty(), "{:?}", report.flags);
    let gain = report.measured_gain.unwrap();
    assert!(gain >= 0.25, "gain {gain}");
    let point = &report.ladder[0];
    assert!((point.data_decay.unwrap() - 1.25).abs() < 1e-12);
    assert_eq!(point.time_series.len(), 22);
    assert_eq!(point.tail_spectrum.len(), 32);
    let scaling = report.amplitude_scaling.unwrap();
    let exponent = scaling.exponent.unwrap();
    assert!((exponent - 2.0).abs() <= 0.3, "exponent {exponent}");
    assert_eq!(scaling.ratio_to_square[0], 1.0);
}

#[test]
fn single_mode_has_unit_space_time_norm() {
    for n in [1usize, 5, 32, 100] {
        let sample = strichartz_ratio(&single_mode(n), 3.0 / 32.0);
        assert!((sample.l8.norm - 1.0).abs() < 1e-12, "N = {n}");
        let expected = (1.0 + (n * n) as f64).powf(-(3.0 / 32.0 + REGULARITY_MARGIN) / 2.0);
        assert!((sample.ratio - expected).abs() < 1e-12);
        assert!(sample.ratio <= 1.0);
    }
}

fn diophantine_eighth_moment(n_max: i64) -> f64 {
    let mut counts: HashMap<(i64, i64), u64> = HashMap::new();
    let r = -n_max..=n_max;
    for a in r.clone() {
        for b in r.clone() {
            for c in r.clone() {
                for d in r.clone() {
                    let s = a + b + c + d;
                    let p = a.pow(5) + b.pow(5) + c.pow(5) + d.pow(5);
                    *counts.entry((s, p)).or_default() += 1;
                }
            }
        }
    }
    counts.values().map(|&k| (k * k) as f64).sum()
}

#[test]
fn dirichlet_norm_matches_the_diophantine_count() {
    for n in [3usize, 6, 9] {
        let exact = diophantine_eighth_moment(n as i64).powf(0.125);
        let l8 = l8_space_time_norm(&dirichlet_kernel(n), DEFAULT_TIME_POINTS);
        assert!(l8.converged);
        assert!(
            (l8.norm - exact).abs() / exact < 0.02,
            "N = {n}: {} vs {exact}",
            l8.norm
        );
    }
}

#[test]
fn strichartz_probe_reports_every_rung() {
    let probe = strichartz_probe(3.0 / 32.0, &[8, 16, 32], &[1, 2]).unwrap();
    assert_eq!(probe.exponent, 8);
    assert_eq!(probe.regularity, 3.0 / 32.0 + 0.01);
    assert_eq!(probe.dirichlet.len(), 3);
    assert!(probe.random.iter().all(|row| row.len() == 2));
    assert!(probe.converged);
    assert!(probe
        .dirichlet
        .iter()
        .chain(probe.random.iter().flatten())
        .all(|r| r.ratio >= 0.0));
    assert!(probe.dirichlet_ladder.trend.is_some());
    assert_eq!(probe, strichartz_probe(3.0 / 32.0, &[8, 16, 32], &[1, 2]).unwrap());
    let no_seeds = strichartz_probe(0.0, &[8, 16], &[]).unwrap();
    assert!(no_seeds.random_ladder.is_none());
}

#[test]
fn strichartz_probe_rejects_bad_input() {
    assert!(strichartz_probe(-0.1, &[8], &[1]).is_err());
    assert!(strichartz_probe(0.1, &[], &[1]).is_err());
    assert!(strichartz_probe(0.1, &[0, 8], &[1]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn tail_fit_recovers_power_laws(decay in 0.2f64..4.0, amp in 0.01f64..100.0, n in 16usize..200) {
        let f = Field64::from_fn(n, |k| if k == 0 { Complex::new(0.0, 0.0) } else { Complex::new(amp * (k.abs() as f64).powf(-decay), 0.0) });
        let (lo, hi) = default_window(n);
        let fit = fit_tail(&f, lo, hi).unwrap();
        prop_assert!((fit.decay - decay).abs() < 1e-10);
        prop_assert!((fit.intercept - amp.ln()).abs() < 1e-9);
    }

    #[test]
    fn l8_norm_is_homogeneous_and_translation_invariant(seed in 0u64..500, scale in 0.1f64..10.0, shift in 0.0f64..6.3) {
        let f = random_sobolev_data(0.5, 12, seed);
        let base = l8_space_time_norm(&f, 64);
        let scaled = l8_space_time_norm(&f.scaled(scale), 64);
        let shifted = l8_space_time_norm(&f.map_modes(|n, c| c * Complex::from_polar(1.0, n as f64 * shift)), 64);
        prop_assert!((scaled.norm - scale * base.norm).abs() < 1e-10 * scaled.norm);
        prop_assert!((shifted.norm - base.norm).abs() < 1e-10 * base.norm);
        prop_assert_eq!(scaled.time_points, base.time_points);
    }

    #[test]
    fn ratios_are_nonnegative(n in 1usize..40, a in 0.0f64..0.5, seed in 0u64..100) {
        let r = strichartz_ratio(&random_sobolev_data(0.5, n, seed), a);
        prop_assert!(r.ratio >= 0.0 && r.ratio.is_finite());
    }
}
