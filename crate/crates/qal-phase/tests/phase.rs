use num_bigint::BigInt;
use num_complex::Complex;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use proptest::prelude::*;
use qal_phase::*;

fn tuple(e: &[i64]) -> FreqTuple {
    FreqTuple::new(e.to_vec()).unwrap()
}

fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

#[test]
fn phase_examples_and_closed_forms() {
    assert_eq!(phi(&tuple(&[1, -1])).0, BigInt::zero());
    assert_eq!(phi(&tuple(&[1, 2])).0, BigInt::from(210));
    assert_eq!(phi2_factored(1, 2), BigInt::from(210));
    assert_eq!(phi(&tuple(&[1, 2, 3])).0, BigInt::from(7500));
    assert_eq!(phi3_factored(1, 2, 3), BigInt::from(7500));
}

#[test]
fn phase_falls_back_to_big_integers() {
    let big = 3_000_000_000_000i64;
    assert!(phi_i128(&[big, big]).is_none());
    assert_eq!(phi_raw(&[big, big]), phi2_factored(big, big));
}

#[test]
fn tuples_reject_zero_and_short_input() {
    assert_eq!(FreqTuple::new(vec![3]), Err(PhaseError::TooShort { min: 2, got: 1 }));
    assert_eq!(FreqTuple::new(vec![3, 0, 1]), Err(PhaseError::ZeroEntry { index: 2 }));
    let t = tuple(&[3, -7, 5]);
    assert_eq!((t.star(1), t.star(2), t.star(3)), (7, 5, 3));
    assert_eq!(t.total(), 1);
}

#[test]
fn telescoping_example() {
    let parts = telescope_decompose(&tuple(&[1, 2, 3, 4])).unwrap();
    let values: Vec<BigInt> = parts.iter().map(|p| p.0.clone()).collect();
    assert_eq!(values, vec![BigInt::from(83160), BigInt::from(15540)]);
    assert_eq!(phi(&tuple(&[1, 2, 3, 4])).0, BigInt::from(98700));
}

#[test]
fn telescoping_domain() {
    assert!(matches!(
        telescope_decompose(&tuple(&[1, 2, 3])),
        Err(PhaseError::TooShort { min: 4, got: 3 })
    ));
    assert!(matches!(
        telescope_decompose_sorted(&tuple(&[3, 4, -3, 5])),
        Err(PhaseError::DegenerateTail { index: 3, .. })
    ));
}

#[test]
fn classification_examples() {
    assert_eq!(
        classify(&tuple(&[5, -5, 2])).unwrap(),
        ResonanceCase::Resonant { witness: 3 }
    );
    assert_eq!(classify(&tuple(&[100, 3, 2])).unwrap(), ResonanceCase::LargePhase);
    assert_eq!(
        classify(&tuple(&[100, -100, 7, 2])).unwrap(),
        ResonanceCase::PairCancellation
    );
    assert!(matches!(
        classify(&tuple(&[1, 2])),
        Err(PhaseError::TooShort { min: 3, got: 2 })
    ));
    assert_eq!(classify(&tuple(&[-17, -15, 16])).unwrap(), ResonanceCase::MidCascade);
}

#[test]
fn resonant_triples_have_vanishing_phase() {
    for a in -20..=20i64 {
        for b in -20..=20i64 {
            if a == 0 || b == 0 || a + b == 0 {
                continue;
            }
            let t = tuple(&[a, b, -a]);
            assert!(matches!(classify(&t).unwrap(), ResonanceCase::Resonant { .. }));
            assert!(phi(&t).0.is_zero());
        }
    }
}

#[test]
fn symbol_examples() {
    let v = eval_symbol(SymbolId::MR1, &tuple(&[1, 2])).unwrap();
    assert_eq!(v.value, rat(1, 14));
    assert!(v.indicator_active);

    let inactive = eval_symbol(SymbolId::MD1, &tuple(&[1, 1, -2, 5])).unwrap();
    assert_eq!(inactive.value, BigRational::zero());
    assert!(!inactive.indicator_active);

    let h = eval_symbol(SymbolId::H { l: 3, j: 1 }, &tuple(&[1, 1, 10, 2, -4])).unwrap();
    assert_eq!(h.value, BigRational::from_integer(BigInt::from(500_000_000_000_000i64)));
}

#[test]
fn symbol_domain_handling() {
    assert!(matches!(
        eval_symbol(SymbolId::MD1, &tuple(&[1, 2])),
        Err(PhaseError::Arity {
            expected: 4,
            got: 2,
            ..
        })
    ));
    assert!(matches!(
        eval_symbol(SymbolId::MB(5), &tuple(&[1, 2, 3, 4])),
        Err(PhaseError::Domain { .. })
    ));
    assert!(matches!(
        eval_symbol(SymbolId::H { l: 4, j: 2 }, &tuple(&[1, 2, 3, 4, 5])),
        Err(PhaseError::Domain { .. })
    ));
    assert!(matches!(
        eval_symbol(SymbolId::MR1, &tuple(&[3, -3])),
        Err(PhaseError::Domain { .. })
    ));
    assert!(matches!(
        eval_symbol(SymbolId::MAl(1), &tuple(&[3, -3, 1, 2, 4])),
        Err(PhaseError::Domain { .. })
    ));
    let off = eval_symbol(SymbolId::MA(1), &tuple(&[5, 1, 2, 3])).unwrap();
    assert!(!off.indicator_active && off.value.is_zero());
}

#[test]
fn resonant_symbols_agree_with_parents_on_resonance() {
    let t = tuple(&[-2, 1, 40, 1]);
    assert_eq!(t.total(), 40);
    let b3 = eval_symbol(SymbolId::MB(3), &t).unwrap();
    let d2 = eval_symbol(SymbolId::MD2, &t).unwrap();
    assert_eq!(b3, d2);
    assert!(b3.indicator_active);
}

#[test]
fn merged_polynomial_matches_on_first_resonance() {
    let t = tuple(&[1, 2, 60, -1, -2]);
    for l in 3..=4u8 {
        let h = eval_symbol(SymbolId::H { l, j: 1 }, &t).unwrap();
        let m = eval_symbol(SymbolId::HMerged { l, j: 1 }, &t).unwrap();
        assert_eq!(h, m);
    }
}

#[test]
fn symbol_ids_round_trip_through_names() {
    for id in SymbolId::all() {
        assert_eq!(id.to_string().parse::<SymbolId>().unwrap(), id);
    }
    for b in BoundId::all() {
        assert_eq!(b.to_string().parse::<BoundId>().unwrap(), b);
    }
}

#[test]
fn identity_examples() {
    let (l, r) = verify_resonant_reduction(2, 1).unwrap();
    assert_eq!(l, rat(25, 7));
    assert_eq!(r, rat(25, 7));
    let (l, r) = verify_re1_combination(1, 1).unwrap();
    assert_eq!(l, rat(-1, 3));
    assert_eq!(r, rat(-1, 3));
    assert!(verify_re1_combination(4, 0).is_err());
    assert!(verify_resonant_reduction(3, -3).is_err());
}

#[test]
fn first_bracket_terms_are_odd_in_n3() {
    for n in 1..30i64 {
        for n3 in 1..30i64 {
            let f = |m: i64| rat(n * n + m * m, m) - rat(n * n, 2 * m);
            assert!((f(n3) + f(-n3)).is_zero());
        }
    }
}

#[test]
fn bulk_identity_checks_pass() {
    for report in [
        check_resonant_reduction(10_000, 1000, 1),
        check_re1_combination(10_000, 1000, 2),
    ] {
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.checked, 10_000);
    }
    for p in 4..=6 {
        let report = check_telescoping(p, 10_000, 1000, p as u64);
        assert!(report.passed(), "{report:?}");
    }
}

#[test]
fn factorizations_hold_exhaustively() {
    for report in check_factorizations(50) {
        assert!(report.passed(), "{report:?}");
    }
}

#[test]
fn cancellations_vanish_on_hermitian_fields() {
    for kind in CancellationKind::ALL {
        assert!(is_exact_zero(
            &cancellation_sum(kind, &RationalField::zeros(8)).unwrap()
        ));
        for seed in 0..5 {
            let f = RationalField::random_hermitian(8, seed);
            let s = cancellation_sum(kind, &f).unwrap();
            assert!(is_exact_zero(&s), "{} seed {seed}: {s:?}", kind.name());
        }
    }
}

#[test]
fn cancellations_survive_hermitian_breaking_but_not_slot_breaking() {
    let f = RationalField::random_hermitian(8, 11);
    let delta = Complex::new(rat(7, 3), rat(-2, 5));
    let broken = f.perturbed(3, delta.clone());
    assert!(!broken.is_hermitian());
    assert_eq!(broken.hermitian_violation(), Some(3));
    let s = cancellation_sum(CancellationKind::A1A3, &broken).unwrap();
    assert!(is_exact_zero(&s));
    let control = slot_broken_control(CancellationKind::A1A3, &f, 3, delta).unwrap();
    assert!(!is_exact_zero(&control));
}

#[test]
fn slot_broken_controls_are_nonzero_unless_the_weight_vanishes_pointwise() {
    let f = RationalField::random_hermitian(8, 4);
    let delta = Complex::new(rat(7, 3), rat(-2, 5));
    for kind in CancellationKind::ALL {
        let control = slot_broken_control(kind, &f, 3, delta.clone()).unwrap();
        assert_eq!(is_exact_zero(&control), kind.vanishes_pointwise(), "{}", kind.name());
    }
}

#[test]
fn cancellation_inputs_are_validated() {
    let a = RationalField::zeros(4);
    let b = RationalField::zeros(5);
    assert!(cancellation_multilinear(CancellationKind::Affine, &[&a, &a]).is_err());
    assert!(cancellation_multilinear(CancellationKind::Affine, &[&a, &a, &b]).is_err());
    let mut bad = qal_spectral::Field64::zeros(2);
    bad.coeffs_mut()[0] = Complex::new(f64::NAN, 0.0);
    assert!(RationalField::from_field(&bad).is_err());
    let good = qal_spectral::random_sobolev_data(0.5, 6, 1);
    let exact = RationalField::from_field(&good).unwrap();
    assert!(exact.is_hermitian());
    assert!(is_exact_zero(
        &cancellation_sum(CancellationKind::InvN1N4, &exact).unwrap()
    ));
}

#[test]
fn pairing_radius_matches_its_definition() {
    let r = h_pairing_radius(H_PAIRING_EXTERNAL_FREQUENCY);
    let n4 = (H_PAIRING_EXTERNAL_FREQUENCY as i128).pow(4);
    assert!(4096 * (r as i128).pow(5) <= n4);
    assert!(4096 * ((r + 1) as i128).pow(5) > n4);
}

#[test]
fn exhaustive_small_sweep_is_finite() {
    let cfg = SweepConfig::default();
    let r = exhaustive_max(BoundId::NonresonantD1, 16, &cfg);
    assert_eq!(r.mode, SweepMode::Exhaustive);
    let max = r.max_ratio_f64.unwrap();
    assert!(max.is_finite() && max > 0.0);
    let w = r.witness.unwrap();
    assert!(w.iter().all(|x| x.abs() <= 16));
}

#[test]
fn resonant_sweep_respects_its_domain() {
    let cfg = SweepConfig::default();
    let r = sweep_shell(BoundId::ResonantB3Expanded, 5, &cfg);
    let w = r.witness.unwrap();
    let n: i64 = w.iter().sum();
    assert_eq!(w[2], n);
    let n2 = [w[0], w[1], w[3]].iter().map(|x| x.abs()).max().unwrap();
    assert!(n.abs() >= 8 * n2);
}

#[test]
fn sampled_sweeps_are_deterministic() {
    let cfg = SweepConfig {
        budget: 20_000,
        ..Default::default()
    };
    let a = sweep_shell(BoundId::NonresonantD2, 5, &cfg);
    let b = sweep_shell(BoundId::NonresonantD2, 5, &cfg);
    assert_eq!(a, b);
    assert_eq!(a.mode, SweepMode::Sampled);
    assert_eq!(a.evaluated, 20_000);
}

#[test]
fn sweep_rejects_small_limits() {
    assert!(bound_ratio_sweep(BoundId::NonresonantD1, 8, &SweepConfig::default()).is_err());
}

fn arb_entries(p: std::ops::RangeInclusive<usize>, b: i64) -> impl Strategy<Value = Vec<i64>> {
    p.prop_flat_map(move |p| prop::collection::vec((1..=b, any::<bool>()).prop_map(|(x, s)| if s { x } else { -x }), p))
}

proptest! {
    #[test]
    fn phase_is_a_multiple_of_30(e in arb_entries(2..=8, 1_000_000)) {
        prop_assert!(phi(&tuple(&e)).is_multiple_of_30());
    }

    #[test]
    fn closed_forms_match_on_large_entries(a in -100_000i64..100_000, b in -100_000i64..100_000, c in -100_000i64..100_000) {
        prop_assert_eq!(phi_raw(&[a, b]), phi2_factored(a, b));
        prop_assert_eq!(phi_raw(&[a, b, c]), phi3_factored(a, b, c));
    }

    #[test]
    fn telescoping_sums_to_the_phase(e in arb_entries(4..=7, 10_000)) {
        let t = tuple(&e);
        if let Ok(parts) = telescope_decompose(&t) {
            let total = parts.iter().fold(BigInt::zero(), |acc, p| acc + &p.0);
            prop_assert_eq!(total, phi(&t).0);
        }
    }

    #[test]
    fn classification_is_total_and_stable(e in arb_entries(3..=6, 200)) {
        let t = tuple(&e);
        let a = classify(&t).unwrap();
        prop_assert_eq!(a, classify(&t).unwrap());
        if let ResonanceCase::Resonant { witness } = a {
            prop_assert_eq!(e[witness - 1], t.total());
        }
    }

    #[test]
    fn mid_cascade_tuples_keep_a_cascade(e in arb_entries(3..=6, 40)) {
        let t = tuple(&e);
        if classify(&t).unwrap() == ResonanceCase::MidCascade {
            let floor = if e.len() == 3 { rat(1, 2) } else { rat(1, 1000) };
            prop_assert!(cascade_ratio(&t) >= floor, "{:?}", e);
        }
    }

    #[test]
    fn inactive_symbols_vanish(e in arb_entries(4..=4, 60)) {
        for id in [SymbolId::MD1, SymbolId::MD2, SymbolId::MB(3)] {
            if let Ok(v) = eval_symbol(id, &tuple(&e)) {
                if !v.indicator_active {
                    prop_assert!(v.value.is_zero());
                }
            }
        }
    }

    #[test]
    fn md2_matches_its_formula_in_both_arithmetic_paths(e in arb_entries(4..=4, 1_000_000), scale in prop::bool::ANY) {
        // Small entries stay in 128-bit arithmetic, large ones overflow it.
        let e: Vec<i64> = if scale { e } else { e.iter().map(|x| x % 50 + x.signum()).collect() };
        let t = tuple(&e);
        let Ok(v) = eval_symbol(SymbolId::MD2, &t) else { return Ok(()); };
        if !v.indicator_active {
            return Ok(());
        }
        let b = |x: i64| BigInt::from(x);
        let (n1, n2, n3, n4) = (e[0], e[1], e[2], e[3]);
        let (c, r, n) = (n3 + n4, n2 + n3 + n4, t.total());
        let num = b(n) * (b(n1) * b(n1) + b(r) * b(r)) * b(r) * (b(n2) * b(n2) + b(c) * b(c)) * b(c)
            * (b(n3) * b(n3) + b(n4) * b(n4));
        let den = phi_raw(&[n1, r]) * phi_raw(&[n1, n2, c]);
        prop_assert_eq!(v.value, BigRational::new(num, den));
    }

    #[test]
    fn cancellations_vanish_for_random_seeds(seed in any::<u64>(), n in 1usize..6) {
        let f = RationalField::random_hermitian(n, seed);
        for kind in CancellationKind::ALL {
            prop_assert!(is_exact_zero(&cancellation_sum(kind, &f).unwrap()));
        }
    }

    #[test]
    fn reduction_identities_hold(n in -5000i64..5000, n3 in -5000i64..5000) {
        if let Ok((l, r)) = verify_resonant_reduction(n, n3) {
            prop_assert_eq!(l, r);
        }
        if let Ok((l, r)) = verify_re1_combination(n, n3) {
            prop_assert_eq!(l, r);
        }
    }
}

#[test]
fn md2_is_symmetric_in_its_last_pair() {
    for t in [[3, 5, 40, -7], [-9, 2, 11, 13], [1, 1, 70, 2]] {
        let a = eval_symbol(SymbolId::MD2, &tuple(&t)).unwrap();
        let b = eval_symbol(SymbolId::MD2, &tuple(&[t[0], t[1], t[3], t[2]])).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn raw_and_reduced_values_agree() {
    let e = [7, -3, 50, 2];
    let raw = eval_raw(SymbolId::MD2, &e, DEFAULT_THRESHOLD).unwrap();
    let v = eval_symbol(SymbolId::MD2, &tuple(&e)).unwrap();
    assert_eq!(raw.to_rational(), v.value);
    assert!((raw.abs_f64() - v.value.to_f64().unwrap().abs()).abs() < 1e-12);
}
