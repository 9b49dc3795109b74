//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use num_rational::Rational64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stokes_core::asymptotics::{
    extract, extract_c1, richardson, richardson_weights, Sequence, Window,
};
use stokes_core::pipeline::{desk_windows, verify_reference};
use stokes_core::precision::{gamma, BigRational, BigReal, PrecisionContext};
use stokes_core::recognition::{
    pslq, reduce_gamma, search_closed_form, verify_identity, ClosedForm, PslqOutcome,
    SearchOutcome, SearchSchedule, Symbol,
};
use stokes_core::rs::{
    compute_series, rational_oracle_series, rs_step, OscillatorSpec, SeriesCoefficients,
    WavefunctionState,
};

type Check = Result<String, String>;
type Exact = fn(PrecisionContext) -> BigReal;
type Criterion<'a> = (u32, &'static str, Duration, Box<dyn Fn() -> Check + 'a>);

fn ctx(dps: u32) -> PrecisionContext {
    PrecisionContext::new(dps).expect("positive precision")
}

fn ensure(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(x: &BigReal, exp10: i32) -> bool {
    x.is_zero() || x.log10_abs() <= exp10 as f64
}

fn series(m: u32, k: usize, dps: u32) -> SeriesCoefficients {
    compute_series(OscillatorSpec::new(m).unwrap(), k, ctx(dps))
}

fn c2_exact(c: PrecisionContext) -> BigReal {
    (BigReal::from_i64(6, c) / BigReal::pi(c).powi(3)).sqrt()
}

fn c3_exact(c: PrecisionContext) -> BigReal {
    &BigReal::from_i64(32, c).sqrt() / &BigReal::pi(c).powi(2)
}

fn c5_exact(c: PrecisionContext) -> BigReal {
    let g = gamma(&BigReal::from_ratio(1, 4, c), c).unwrap();
    &BigReal::from_i64(192, c).sqrt() / &(&g * &BigReal::pi(c).pow(&BigReal::from_ratio(5, 4, c)))
}

fn c7_exact(c: PrecisionContext) -> BigReal {
    let g = gamma(&BigReal::from_ratio(1, 3, c), c).unwrap();
    let num = &BigReal::from_i64(2, c).pow(&BigReal::from_ratio(10, 3, c))
        * &BigReal::from_i64(3, c).sqrt();
    &num / &(&g.pow(&BigReal::from_ratio(3, 2, c)) * &BigReal::pi(c))
}

fn form(pairs: &[(Symbol, i64)]) -> ClosedForm {
    ClosedForm::new(pairs.iter().map(|&(s, e)| (s, Rational64::from_integer(e))))
}

fn stokes_binary() -> &'static str {
    env!("CARGO_BIN_EXE_stokes")
}

fn criterion_1() -> Check {
    let r = verify_reference(50).map_err(|e| e.to_string())?;
    let worst = r.actions.iter().find(|a| !a.pass);
    ensure(worst.is_none(), format!("A_M mismatch: {worst:?}"))?;
    let out = Command::new(stokes_binary())
        .args(["verify", "--dps", "50"])
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        out.status.success(),
        format!("`stokes verify` exited with {}", out.status),
    )?;
    let max_err = r
        .actions
        .iter()
        .map(|a| a.rel_error.clone())
        .max_by(|a, b| {
            let pa: f64 = a.parse().unwrap_or(0.0);
            let pb: f64 = b.parse().unwrap_or(0.0);
            pa.partial_cmp(&pb).unwrap()
        });
    Ok(format!(
        "10 actions, worst rel. error {}",
        max_err.unwrap_or_default()
    ))
}

fn criterion_2() -> Check {
    let c = ctx(50);
    for m in 2..=11 {
        let spec = OscillatorSpec::new(m).unwrap();
        let exact = spec.first_order_exact();
        let rational = &rational_oracle_series(spec, 1)[1];
        ensure(
            *rational == exact,
            format!("M={m}: rational a_1 = {rational}, want {exact}"),
        )?;
        let float = compute_series(spec, 1, c);
        let diff = float
            .get(1)
            .unwrap()
            .rel_diff(&BigReal::from_rational(&exact, c));
        ensure(
            within(&diff, -50),
            format!("M={m}: float a_1 off by {}", diff.to_sci_string(3)),
        )?;
    }
    Ok("a_1 = (2M-1)!!/2^M for M = 2..11 (rational exact, float to all 50 digits)".into())
}

fn criterion_3() -> Check {
    let c = ctx(100);
    let mut worst = BigReal::zero(c);
    for m in [2, 3] {
        let spec = OscillatorSpec::new(m).unwrap();
        let exact = rational_oracle_series(spec, 30);
        let float = compute_series(spec, 30, c);
        for (k, q) in exact.iter().enumerate() {
            let d = float
                .get(k)
                .unwrap()
                .rel_diff(&BigReal::from_rational(q, c));
            if d > worst {
                worst = d;
            }
        }
    }
    ensure(
        within(&worst, -95),
        format!("worst relative deviation {}", worst.to_sci_string(3)),
    )?;
    Ok(format!(
        "M in {{2,3}}, k <= 30, worst relative deviation {}",
        worst.to_sci_string(3)
    ))
}

fn criterion_4(s2: &SeriesCoefficients) -> Check {
    let e =
        extract(s2, &[Window::new(200, 40), Window::new(240, 40)]).map_err(|e| e.to_string())?;
    let c = s2.ctx();
    let err_c = e.stokes.limit.abs().rel_diff(&c2_exact(c));
    let err_b = (&e.shift.limit + &BigReal::from_ratio(1, 2, c)).abs();
    ensure(
        within(&err_c, -12),
        format!("|C2| rel. error {}", err_c.to_sci_string(3)),
    )?;
    ensure(
        within(&err_b, -8),
        format!("b error {}", err_b.to_sci_string(3)),
    )?;
    Ok(format!(
        "|C2| rel. error {}, |b + 1/2| = {}",
        err_c.to_sci_string(3),
        err_b.to_sci_string(3)
    ))
}

fn criterion_5() -> Check {
    let s3 = series(3, 300, 150);
    let e = extract(&s3, &desk_windows(300, 60)).map_err(|e| e.to_string())?;
    let err = e.stokes.limit.abs().rel_diff(&c3_exact(s3.ctx()));
    ensure(
        within(&err, -10),
        format!("|C3| rel. error {}", err.to_sci_string(3)),
    )?;
    Ok(format!(
        "|C3| rel. error {} ({} stable digits)",
        err.to_sci_string(3),
        e.stokes.reliable_digits
    ))
}

fn identity_forms() -> [(u32, ClosedForm, Exact); 4] {
    use Symbol::*;
    let (g4, g3) = (Symbol::gamma(1, 4), Symbol::gamma(1, 3));
    [
        (
            2,
            form(&[(AbsC, 2), (Pi, 3), (Two, -1), (Three, -1)]),
            c2_exact,
        ),
        (3, form(&[(AbsC, 2), (Pi, 4), (Two, -5)]), c3_exact),
        (
            5,
            form(&[(AbsC, 4), (g4, 4), (Pi, 5), (Two, -12), (Three, -2)]),
            c5_exact,
        ),
        (
            7,
            form(&[(AbsC, 6), (g3, 9), (Pi, 6), (Two, -20), (Three, -3)]),
            c7_exact,
        ),
    ]
}

fn criterion_6() -> Check {
    let c = ctx(40);
    let mut worst = BigReal::zero(c);
    for (m, f, value) in identity_forms() {
        let r = verify_identity(&f, &value(c), c).map_err(|e| e.to_string())?;
        ensure(
            within(&r, -20),
            format!("M={m}: residual {}", r.to_sci_string(3)),
        )?;
        if r > worst {
            worst = r;
        }
    }
    Ok(format!(
        "four identities, worst residual {}",
        if worst.is_zero() {
            "0".into()
        } else {
            worst.to_sci_string(3)
        }
    ))
}

fn relation(values: &[BigReal], c: PrecisionContext) -> Result<Vec<i64>, String> {
    match pslq(values, 1000, c).map_err(|e| e.to_string())? {
        PslqOutcome::Found(r) => Ok(r.coefficients),
        PslqOutcome::NoRelation { .. } => Err("no relation found".into()),
    }
}

fn same_up_to_sign(a: &[i64], b: &[i64]) -> bool {
    a == b || a.iter().zip(b).all(|(x, y)| *x == -*y)
}

fn criterion_7() -> Check {
    let c = ctx(40);
    let logs = |syms: &[Symbol], v: &BigReal| -> Vec<BigReal> {
        syms.iter().map(|s| s.log_value(v, c).unwrap()).collect()
    };
    use Symbol::*;
    let cases: [(&str, Vec<Symbol>, BigReal, Vec<i64>); 3] = [
        (
            "C2",
            vec![AbsC, Pi, Two, Three],
            c2_exact(c),
            vec![2, 3, -1, -1],
        ),
        (
            "C5",
            vec![AbsC, Symbol::gamma(1, 4), Pi, Two, Three, E],
            c5_exact(c),
            vec![-4, -4, -5, 12, 2, 0],
        ),
        (
            "C7",
            vec![AbsC, Symbol::gamma(1, 6), Pi, Two, Three, E],
            c7_exact(c),
            vec![24, 18, 33, -74, -21, 0],
        ),
    ];
    for (name, syms, v, want) in cases {
        let got = relation(&logs(&syms, &v), c)?;
        ensure(
            same_up_to_sign(&got, &want),
            format!("{name}: got {got:?}, want {want:?}"),
        )?;
    }
    Ok("C2 (2,3,-1,-1), C5 [-4,-4,-5,12,2,0], C7 [24,18,33,-74,-21,0] recovered".into())
}

fn criterion_8() -> Check {
    use Symbol::*;
    let raw = ClosedForm::from_relation(
        &[AbsC, Symbol::gamma(1, 6), Pi, Two, Three, E],
        &[24, 18, 33, -74, -21, 0],
    );
    let reduced = reduce_gamma(&raw);
    let want = form(&[
        (AbsC, 6),
        (Symbol::gamma(1, 3), 9),
        (Pi, 6),
        (Two, -20),
        (Three, -3),
    ]);
    ensure(
        reduced == want,
        format!("symbolic reduction gave {reduced}"),
    )?;
    let c = ctx(50);
    let v = c7_exact(c);
    let r_red = verify_identity(&reduced, &v, c).map_err(|e| e.to_string())?;
    let r_raw = verify_identity(&raw, &v, c).map_err(|e| e.to_string())?;
    ensure(
        within(&r_red, -30),
        format!("reduced residual {}", r_red.to_sci_string(3)),
    )?;
    ensure(
        within(&r_raw, -30),
        format!("raw residual {}", r_raw.to_sci_string(3)),
    )?;
    Ok(format!(
        "{reduced}; numerical residual {}",
        if r_red.is_zero() {
            "0".into()
        } else {
            r_red.to_sci_string(3)
        }
    ))
}

fn criterion_9(s2: &SeriesCoefficients) -> Check {
    let c = s2.ctx();
    let windows = [Window::new(200, 40), Window::new(240, 40)];
    let r = extract_c1(s2, &-c2_exact(c), &windows).map_err(|e| e.to_string())?;
    let err = (&r.limit + &BigReal::from_ratio(95, 72, c)).abs();
    ensure(
        within(&err, -8),
        format!(
            "c1 = {}, error {}",
            r.limit.to_decimal_string(20),
            err.to_sci_string(3)
        ),
    )?;
    Ok(format!(
        "c1 = {} ({} digits)",
        r.limit.to_decimal_string(r.reliable_digits.max(10)),
        r.reliable_digits
    ))
}

fn criterion_10() -> Check {
    let s4 = series(4, 400, 200);
    let e = extract(&s4, &desk_windows(400, 100)).map_err(|e| e.to_string())?;
    let digits = e.stokes.reliable_digits;
    ensure(digits >= 15, format!("only {digits} stable digits"))?;
    let abs = e.stokes.limit.abs().to_decimal_string(digits);
    ensure(
        abs.starts_with("0.740051498259358"),
        format!("|C4| = {abs}"),
    )?;
    use Symbol::*;
    let basis = [AbsC, Symbol::gamma(1, 3), Pi, Two, Three];
    let schedule = SearchSchedule {
        maxcoeffs: vec![100],
        dps_levels: vec![15],
    };
    let report =
        search_closed_form(4, &e.stokes.limit, 15, &basis, &schedule).map_err(|e| e.to_string())?;
    ensure(
        matches!(report.outcome, SearchOutcome::Excluded { .. }),
        format!("search outcome {:?}", report.outcome),
    )?;
    Ok(format!(
        "{digits} stable digits, |C4| = {}…; no relation with max|n| <= 100 at 15 digits",
        &abs[..20]
    ))
}

fn property_gamma(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let dps = 40;
    let c = ctx(dps);
    let pi = BigReal::pi(c);
    for _ in 0..20 {
        let den = rng.gen_range(2..=24);
        let num = rng.gen_range(1..den);
        let x = BigReal::from_ratio(num, den, c);
        let one_minus = BigReal::from_ratio(den - num, den, c);
        let lhs = &gamma(&x, c).unwrap() * &gamma(&one_minus, c).unwrap();
        let rhs = &pi / &(&pi * &x).sin();
        let d = lhs.rel_diff(&rhs);
        ensure(
            within(&d, -(dps as i32 - 2)),
            format!("reflection at {num}/{den}: {}", d.to_sci_string(3)),
        )?;
        let half = BigReal::from_ratio(1, 2, c);
        let lhs = &gamma(&x, c).unwrap() * &gamma(&(&x + &half), c).unwrap();
        let two_x = x.mul_int(2);
        let rhs = &(&BigReal::from_i64(2, c).pow(&(&BigReal::one(c) - &two_x)) * &pi.sqrt())
            * &gamma(&two_x, c).unwrap();
        let d = lhs.rel_diff(&rhs);
        ensure(
            within(&d, -(dps as i32 - 2)),
            format!("duplication at {num}/{den}: {}", d.to_sci_string(3)),
        )?;
    }
    Ok(())
}

fn property_richardson(rng: &mut ChaCha8Rng) -> Result<(), String> {
    let dps = 60;
    let c = ctx(dps);
    for _ in 0..10 {
        let n = rng.gen_range(1..=12usize);
        let k0 = rng.gen_range(5..=40usize);
        let coeffs: Vec<BigRational> = (0..=n)
            .map(|_| {
                BigRational::new(
                    rng.gen_range(-50i64..=50).into(),
                    rng.gen_range(1i64..=9).into(),
                )
            })
            .collect();
        let values = (1..=k0 + n)
            .map(|k| {
                let kk = BigRational::from_integer((k as i64).into());
                let mut acc = BigRational::from_integer(0.into());
                for (i, ci) in coeffs.iter().enumerate() {
                    let mut p = BigRational::from_integer(1.into());
                    for _ in 0..i {
                        p /= kk.clone();
                    }
                    acc += ci * p;
                }
                BigReal::from_rational(&acc, c)
            })
            .collect();
        let seq = Sequence::new(1, values);
        let r = richardson(&seq, k0, n, c).map_err(|e| e.to_string())?;
        let want = BigReal::from_rational(&coeffs[0], c);
        let d = (&r - &want).abs();
        ensure(
            within(&d, -(dps as i32 - 15)),
            format!("annihilation N={n} k0={k0}: {}", d.to_sci_string(3)),
        )?;
        let sum: BigRational = richardson_weights(k0, n).into_iter().sum();
        ensure(
            sum == BigRational::from_integer(1.into()),
            format!("weights N={n} k0={k0} sum to {sum}"),
        )?;
    }
    Ok(())
}

fn primitive(v: &[i64]) -> Vec<i64> {
    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }
    let g = v.iter().fold(0, |g, &n| gcd(g, n));
    v.iter().map(|n| n / g).collect()
}

/// Six logs of random reals, the last solved from a random relation with
/// `|nᵢ| <= 50`.
fn property_pslq(rng: &mut ChaCha8Rng) -> Result<usize, String> {
    let c = ctx(40);
    let mut recovered = 0;
    for _ in 0..100 {
        let mut planted: Vec<i64> = (0..6).map(|_| rng.gen_range(-50..=50)).collect();
        while planted[5] == 0 {
            planted[5] = rng.gen_range(-50..=50);
        }
        let mut values: Vec<BigReal> = (0..5)
            .map(|_| {
                let digits: String = (0..50)
                    .map(|_| char::from(b'0' + rng.gen_range(0..10u8)))
                    .collect();
                BigReal::parse(&format!("{}.{digits}", rng.gen_range(2..100u32)), c)
                    .unwrap()
                    .ln()
            })
            .collect();
        let partial = values
            .iter()
            .zip(&planted)
            .fold(BigReal::zero(c), |acc, (v, &n)| &acc + &v.mul_int(n));
        values.push(-&partial.div_int(planted[5]));
        if values[5].is_zero() {
            continue;
        }
        let want = primitive(&planted);
        if let Ok(PslqOutcome::Found(r)) = pslq(&values, 1000, c) {
            if same_up_to_sign(&r.coefficients, &want) {
                recovered += 1;
            }
        }
    }
    Ok(recovered)
}

fn property_series() -> Result<(), String> {
    let c = ctx(50);
    for m in 2..=5 {
        let spec = OscillatorSpec::new(m).unwrap();
        let mut history = vec![WavefunctionState::ground(c)];
        let mut energies = vec![BigReal::from_ratio(1, 2, c)];
        for k in 1..=25 {
            let (a, psi) = rs_step(&history, &energies, spec, c).map_err(|e| e.to_string())?;
            let sign_ok = a.signum() == if k % 2 == 1 { 1 } else { -1 };
            ensure(sign_ok, format!("M={m} k={k}: a_k has the wrong sign"))?;
            ensure(
                psi.max_level() <= 2 * m as usize * k,
                format!("M={m} k={k}: support to level {}", psi.max_level()),
            )?;
            ensure(
                psi.component(0).is_some_and(BigReal::is_zero),
                format!("M={m} k={k}: <0|psi> nonzero"),
            )?;
            energies.push(a);
            history.push(psi);
        }
        let s = series(m, 60, 50);
        ensure(
            s.sign_violations().is_empty(),
            format!("M={m}: sign violations {:?}", s.sign_violations()),
        )?;
    }
    Ok(())
}

fn criterion_11() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(20240611);
    property_gamma(&mut rng)?;
    property_richardson(&mut rng)?;
    let recovered = property_pslq(&mut rng)?;
    ensure(
        recovered >= 99,
        format!("planted relations recovered {recovered}/100"),
    )?;
    property_series()?;
    Ok(format!(
        "Gamma reflection/duplication, Richardson annihilation and weight sums, planted PSLQ {recovered}/100, series sign/support"
    ))
}

fn pipeline_run(dir: &Path, extra: &[&str]) -> Result<(), String> {
    let out = Command::new(stokes_binary())
        .args(["pipeline", "--desk-scale", "--M-range", "2-3", "--out-dir"])
        .arg(dir)
        .args(extra)
        .output()
        .map_err(|e| e.to_string())?;
    ensure(
        out.status.success(),
        format!(
            "pipeline exited with {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ),
    )
}

fn criterion_12() -> Check {
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let a = tmp.path().join("a");
    let b = tmp.path().join("b");
    pipeline_run(&a, &[])?;
    let first: Vec<Vec<u8>> = ["report.json", "report.txt", "tables.json", "tables.txt"]
        .iter()
        .map(|f| std::fs::read(a.join(f)).map_err(|e| format!("{f}: {e}")))
        .collect::<Result<_, _>>()?;
    pipeline_run(&a, &[])?;
    pipeline_run(&b, &["--parallelism", "2"])?;
    for dir in [&a, &b] {
        for (f, want) in ["report.json", "report.txt", "tables.json", "tables.txt"]
            .iter()
            .zip(&first)
        {
            let got = std::fs::read(dir.join(f)).map_err(|e| format!("{f}: {e}"))?;
            ensure(&got == want, format!("{} differs", dir.join(f).display()))?;
        }
    }
    Ok("repeat run (cache replay) and fresh parallel run give byte-identical reports".into())
}

fn main() {
    let t = Instant::now();
    let s2 = series(2, 300, 150);
    let s2_time = t.elapsed();
    let criteria: Vec<Criterion> = vec![
        (
            1,
            "instanton-action table",
            Duration::from_secs(10),
            Box::new(criterion_1),
        ),
        (
            2,
            "first-order coefficient",
            Duration::from_secs(1),
            Box::new(criterion_2),
        ),
        (
            3,
            "oracle equivalence",
            Duration::from_secs(60),
            Box::new(criterion_3),
        ),
        (
            4,
            "desk-scale C2 and b",
            Duration::from_secs(300),
            Box::new(|| criterion_4(&s2)),
        ),
        (
            5,
            "desk-scale C3",
            Duration::from_secs(300),
            Box::new(criterion_5),
        ),
        (
            6,
            "identity suite",
            Duration::from_secs(5),
            Box::new(criterion_6),
        ),
        (
            7,
            "PSLQ golden relations",
            Duration::from_secs(30),
            Box::new(criterion_7),
        ),
        (
            8,
            "Gamma reduction",
            Duration::from_secs(30),
            Box::new(criterion_8),
        ),
        (
            9,
            "c1 extraction",
            Duration::from_secs(300),
            Box::new(|| criterion_9(&s2)),
        ),
        (
            10,
            "C4 digits and exclusion",
            Duration::from_secs(600),
            Box::new(criterion_10),
        ),
        (
            11,
            "property suites",
            Duration::from_secs(600),
            Box::new(criterion_11),
        ),
        (
            12,
            "pipeline determinism",
            Duration::from_secs(600),
            Box::new(criterion_12),
        ),
    ];
    let mut failures = 0;
    for (n, name, budget, check) in &criteria {
        let start = Instant::now();
        let result = check();
        let mut elapsed = start.elapsed();
        if matches!(n, 4 | 9) {
            elapsed += s2_time;
        }
        let outcome = match result {
            Ok(detail) if elapsed <= *budget => format!("PASS [{n:>2}] {name}: {detail}"),
            Ok(detail) => format!("FAIL [{n:>2}] {name}: over time budget {budget:?}: {detail}"),
            Err(why) => format!("FAIL [{n:>2}] {name}: {why}"),
        };
        if outcome.starts_with("FAIL") {
            failures += 1;
        }
        println!("{outcome} ({:.1}s)", elapsed.as_secs_f64());
    }
    println!(
        "{} of {} criteria passed",
        criteria.len() - failures,
        criteria.len()
    );
    if failures > 0 {
        std::process::exit(1);
    }
}
