//! Gamma against the lower incomplete-gamma series, which shares no code
//! with the Stirling/shift implementation.

use proptest::prelude::*;
use stokes_core::precision::{beta, gamma, log_gamma, BigReal, PrecisionContext};

/// `γ(x, X) = Σ (-1)^n X^{n+x} / (n! (n+x))`; the neglected upper tail is
/// below `e^{-X} X^{x-1}`.
fn gamma_by_series(x: &BigReal, big_x: i64, ctx: PrecisionContext) -> BigReal {
    let work = ctx.raised(60);
    let x = x.with_context(work);
    let xx = BigReal::from_i64(big_x, work);
    let mut term = xx.pow(&x);
    let mut sum = BigReal::zero(work);
    let eps = BigReal::from_i64(10, work).powi(-(work.dps() as i64 + 10));
    for n in 0..100_000i64 {
        let t = &term / &x.add_int(n);
        sum = &sum + &t;
        if n > big_x && t.abs() < eps {
            break;
        }
        term = -&(&term * &xx).div_int(n + 1);
    }
    sum.with_context(ctx)
}

fn ctx(dps: u32) -> PrecisionContext {
    PrecisionContext::new(dps).unwrap()
}

#[test]
fn rational_arguments_match_series() {
    let c = ctx(50);
    for (p, q) in [
        (1, 3),
        (1, 4),
        (2, 3),
        (3, 4),
        (1, 6),
        (5, 6),
        (7, 5),
        (5, 2),
    ] {
        let x = BigReal::from_ratio(p, q, c);
        let d = gamma(&x, c).unwrap().rel_diff(&gamma_by_series(&x, 150, c));
        assert!(d.log10_abs() < -48.0, "Γ({p}/{q}): {}", d.to_sci_string(3));
    }
}

#[test]
fn known_values() {
    let c = ctx(60);
    let half = BigReal::from_ratio(1, 2, c);
    let d = gamma(&half, c).unwrap().rel_diff(&BigReal::pi(c).sqrt());
    assert!(d.is_zero() || d.log10_abs() < -58.0);
    assert_eq!(
        gamma(&BigReal::from_i64(7, c), c).unwrap(),
        BigReal::from_i64(720, c)
    );
    let lg = log_gamma(&BigReal::from_i64(30, c), c).unwrap();
    let want = BigReal::parse("8841761993739701954543616000000", c)
        .unwrap()
        .ln();
    assert!(lg.rel_diff(&want).log10_abs() < -58.0);
}

#[test]
fn beta_symmetry_and_value() {
    let c = ctx(40);
    let (a, b) = (BigReal::from_ratio(1, 3, c), BigReal::from_ratio(3, 2, c));
    let ab = beta(&a, &b, c).unwrap();
    let ba = beta(&b, &a, c).unwrap();
    assert!(ab.rel_diff(&ba).log10_abs() < -38.0);
    let one = BigReal::one(c);
    let d = beta(&one, &b, c)
        .unwrap()
        .rel_diff(&BigReal::from_ratio(2, 3, c));
    assert!(d.is_zero() || d.log10_abs() < -38.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn recurrence_holds(p in 1i64..200, q in 1i64..50) {
        let c = ctx(40);
        let x = BigReal::from_ratio(p, q, c);
        let lhs = gamma(&x.add_int(1), c).unwrap();
        let rhs = &x * &gamma(&x, c).unwrap();
        prop_assert!(lhs.rel_diff(&rhs).log10_abs() < -37.0);
    }

    #[test]
    fn reflection_holds(p in 1i64..60, q in 2i64..61) {
        prop_assume!(p < q);
        let c = ctx(40);
        let x = BigReal::from_ratio(p, q, c);
        let y = BigReal::from_ratio(q - p, q, c);
        let pi = BigReal::pi(c);
        let lhs = &gamma(&x, c).unwrap() * &gamma(&y, c).unwrap();
        let rhs = &pi / &(&pi * &x).sin();
        prop_assert!(lhs.rel_diff(&rhs).log10_abs() < -38.0);
    }
}
