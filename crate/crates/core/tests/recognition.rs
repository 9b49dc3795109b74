use proptest::prelude::*;
use stokes_core::precision::{gamma, BigReal, PrecisionContext};
use stokes_core::recognition::{
    build_basis, default_symbols, detection_limit, pslq, relation_residual, search_closed_form,
    PslqOutcome, RecognitionError, SearchOutcome, SearchSchedule, Symbol,
};

fn ctx(dps: u32) -> PrecisionContext {
    PrecisionContext::new(dps).unwrap()
}

#[test]
fn basis_sizes() {
    let sizes: Vec<usize> = (2..=11)
        .map(|m| default_symbols(m, stokes_core::recognition::unit_entry_default(m)).len())
        .collect();
    assert_eq!(sizes, [5, 5, 5, 6, 7, 6, 8, 7, 8, 7]);
}

#[test]
fn basis_values_are_logs() {
    let c = ctx(30);
    let v = BigReal::from_ratio(3, 7, c);
    let basis = build_basis(5, &v, c).unwrap();
    let values = basis.values();
    assert!(values[0].rel_diff(&v.ln()).log10_abs() < -28.0);
    let g = gamma(&BigReal::from_ratio(1, 4, c), c).unwrap().ln();
    assert!(values[1].rel_diff(&g).log10_abs() < -28.0);
    assert_eq!(basis.labels()[0], "ln|C|");
}

#[test]
fn too_few_values_and_low_precision_are_errors() {
    let c = ctx(30);
    assert!(matches!(
        pslq(&[BigReal::one(c)], 10, c),
        Err(RecognitionError::TooFewValues(1))
    ));
    let low = PrecisionContext::with_guard(10, 0).unwrap();
    let v = [BigReal::one(low), BigReal::from_i64(2, low)];
    assert!(matches!(
        pslq(&v, 10, low),
        Err(RecognitionError::PrecisionTooLow(10))
    ));
}

#[test]
fn search_recovers_cubic_sextic_form() {
    let c = ctx(60);
    let c3 = -&(&BigReal::from_i64(32, c).sqrt() / &BigReal::pi(c).powi(2));
    let schedule = SearchSchedule {
        maxcoeffs: vec![200],
        dps_levels: vec![30, 35, 40],
    };
    let r = search_closed_form(3, &c3, 50, &default_symbols(3, true), &schedule).unwrap();
    let SearchOutcome::Found { reduced, .. } = &r.outcome else {
        panic!("{:?}", r.outcome)
    };
    assert_eq!(reduced.to_string(), "C^2 · π^4 = 2^5 = 32");
}

#[test]
fn search_refuses_short_values() {
    let c = ctx(30);
    let schedule = SearchSchedule {
        maxcoeffs: vec![100],
        dps_levels: vec![15],
    };
    let err = search_closed_form(
        2,
        &BigReal::one(c),
        10,
        &default_symbols(2, true),
        &schedule,
    )
    .unwrap_err();
    assert!(matches!(err, RecognitionError::TooFewDigits(10)));
}

#[test]
fn random_values_have_no_small_relation() {
    let c = PrecisionContext::with_guard(40, 0).unwrap();
    let v: Vec<BigReal> = [
        "0.3713872611",
        "0.8429105538",
        "0.1190587432",
        "0.6659201847",
    ]
    .iter()
    .map(|s| {
        BigReal::parse(&format!("{s}{}", "7193824650".repeat(4)), c)
            .unwrap()
            .ln()
            .abs()
    })
    .collect();
    match pslq(&v, 50, c).unwrap() {
        PslqOutcome::NoRelation { norm_bound, .. } => assert!(norm_bound > 50.0),
        PslqOutcome::Found(r) => panic!("spurious relation {:?}", r.coefficients),
    }
    assert!(detection_limit(40, 4).to_f64() > 1e9);
}

fn primitive(v: &[i64]) -> Vec<i64> {
    let g = v
        .iter()
        .fold(0i64, |g, &n| num_integer::Integer::gcd(&g, &n));
    v.iter().map(|n| n / g).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn planted_relation_is_recovered(
        reals in prop::collection::vec(2u64..1_000_000, 5),
        mut coeffs in prop::collection::vec(-50i64..=50, 6),
    ) {
        if coeffs[5] == 0 {
            coeffs[5] = 7;
        }
        let c = ctx(40);
        let mut xs: Vec<BigReal> = reals
            .iter()
            .map(|&r| BigReal::from_ratio(r as i64, 997, c).ln())
            .collect();
        prop_assume!(xs.iter().all(|x| !x.is_zero()));
        let partial = xs.iter().zip(&coeffs).fold(BigReal::zero(c), |acc, (x, &n)| &acc + &x.mul_int(n));
        let last = -&partial.div_int(coeffs[5]);
        prop_assume!(!last.is_zero());
        xs.push(last);
        let PslqOutcome::Found(r) = pslq(&xs, 1000, c).unwrap() else {
            return Err(TestCaseError::fail("no relation"));
        };
        let want = primitive(&coeffs);
        let neg: Vec<i64> = want.iter().map(|n| -n).collect();
        prop_assert!(r.coefficients == want || r.coefficients == neg, "{:?} vs {:?}", r.coefficients, want);
        prop_assert!(relation_residual(&xs, &r.coefficients, c).log10_abs() < -30.0);
    }
}

#[test]
fn gamma_symbol_is_reduced() {
    assert_eq!(Symbol::gamma(2, 6), Symbol::gamma(1, 3));
}

#[test]
fn value_known_to_fewer_digits_than_the_context_carries() {
    let c = ctx(60);
    let c3 = &BigReal::from_i64(32, c).sqrt() / &BigReal::pi(c).powi(2);
    let schedule = SearchSchedule {
        maxcoeffs: vec![500],
        dps_levels: vec![20],
    };
    for digits in [16, 20, 25] {
        let r = search_closed_form(3, &c3, digits, &default_symbols(3, true), &schedule).unwrap();
        assert!(
            matches!(r.outcome, SearchOutcome::Found { .. }),
            "{digits} digits: {:?}",
            r.outcome
        );
    }
}
