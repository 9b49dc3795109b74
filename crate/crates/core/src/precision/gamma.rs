//! Gamma, log-Gamma and Beta at arbitrary precision.
//!
//! Positive arguments are shifted upward until the Stirling series converges
//! to the working precision within a modest number of terms, then shifted back
//! with the recurrence. Negative non-integers go through the reflection
//! formula.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use super::{BigRational, BigReal, PrecisionContext, PrecisionError};

/// `B_2, B_4, …, B_{2n}` exactly, via the integer tangent-number recurrence.
pub fn bernoulli_numbers(n: usize) -> Vec<BigRational> {
    if n == 0 {
        return Vec::new();
    }
    let mut t = vec![BigUint::zero(); n + 1];
    t[1] = BigUint::one();
    for k in 2..=n {
        t[k] = &t[k - 1] * (k as u64 - 1);
    }
    for k in 2..=n {
        for j in k..=n {
            t[j] = &t[j - 1] * (j - k) as u64 + &t[j] * (j - k + 2) as u64;
        }
    }
    (1..=n)
        .map(|k| {
            let four_k = BigUint::one() << (2 * k);
            let den = &four_k * (&four_k - 1u32);
            let num = BigInt::from(&t[k] * (2 * k) as u64);
            let num = if k % 2 == 1 { num } else { -num };
            BigRational::new(num, den.into())
        })
        .collect()
}

/// Number of Stirling correction terms needed at `bits` precision for
/// argument `z`.
fn stirling_terms(bits: usize, z: f64) -> usize {
    let goal = -((bits + 16) as f64) * std::f64::consts::LN_2;
    let two_pi_ln = (2.0 * std::f64::consts::PI).ln();
    let mut ln_fact = 0.0; // ln (2j)!
    for j in 1..10_000usize {
        let m = 2 * j;
        ln_fact += ((m - 1) as f64).ln() + (m as f64).ln();
        let ln_bern = std::f64::consts::LN_2 + ln_fact - m as f64 * two_pi_ln;
        let ln_term = ln_bern - ((m * (m - 1)) as f64).ln() - (m - 1) as f64 * z.ln();
        if ln_term < goal {
            return j;
        }
    }
    panic!("Stirling series does not converge for z = {z}");
}

/// Extra guard digits so that cancellation between `lnΓ(z)` and the shift
/// product, and the final exponential, cost nothing at the caller's precision.
fn guard_for(x: f64, bits: usize) -> u32 {
    let z = x.abs().max(bits as f64) + 2.0;
    12 + (z * z.ln()).log10().ceil() as u32
}

fn ln_gamma_positive(x: &BigReal, work: PrecisionContext) -> BigReal {
    let x = x.with_context(work);
    let bits = work.bits();
    let xf = x.to_f64();
    let target = bits as f64;
    let shift = if xf < target {
        (target - xf).ceil() as i64
    } else {
        0
    };
    let z = x.add_int(shift);
    let mut prod = BigReal::one(work);
    for i in 0..shift {
        prod = &prod * &x.add_int(i);
    }

    let terms = stirling_terms(bits, xf + shift as f64);
    let bern = bernoulli_numbers(terms);
    let half = BigReal::from_ratio(1, 2, work);
    let two_pi = BigReal::pi(work).mul_int(2);
    let mut acc = &(&(&z - &half) * &z.ln()) - &z;
    acc = &acc + &(&two_pi.ln() * &half);
    let z_inv = z.recip();
    let z_inv2 = &z_inv * &z_inv;
    let mut power = z_inv;
    for (i, b) in bern.iter().enumerate() {
        let j = (i + 1) as i64;
        let coef = b / BigRational::from_integer(BigInt::from(2 * j * (2 * j - 1)));
        acc = &acc + &(&BigReal::from_rational(&coef, work) * &power);
        power = &power * &z_inv2;
    }
    if shift > 0 {
        acc = &acc - &prod.ln();
    }
    acc
}

fn domain(func: &'static str, x: &BigReal) -> PrecisionError {
    PrecisionError::Domain {
        func,
        arg: x.to_decimal_string(20),
    }
}

/// `Γ(x)` to `ctx.dps` significant digits. Poles at non-positive integers.
pub fn gamma(x: &BigReal, ctx: PrecisionContext) -> Result<BigReal, PrecisionError> {
    if x.is_integer() && !x.is_positive() {
        return Err(PrecisionError::Pole(x.to_decimal_string(20)));
    }
    let xf = x.to_f64();
    if x.is_positive() {
        let work = ctx.raised(guard_for(xf, ctx.bits()));
        return Ok(ln_gamma_positive(x, work).exp().with_context(ctx));
    }
    // Γ(x) = π / (sin(πx) Γ(1-x)); sin(πx) loses digits near the poles.
    let dist = (xf - xf.round()).abs().max(1e-300);
    let extra = guard_for(xf, ctx.bits()) + (-dist.log10()).ceil().max(0.0) as u32;
    let work = ctx.raised(extra);
    let xw = x.with_context(work);
    let pi = BigReal::pi(work);
    let one_minus = &BigReal::one(work) - &xw;
    let g = ln_gamma_positive(&one_minus, work).exp();
    let s = (&pi * &xw).sin();
    Ok((&pi / &(&s * &g)).with_context(ctx))
}

/// `ln Γ(x)` for `x > 0`.
pub fn log_gamma(x: &BigReal, ctx: PrecisionContext) -> Result<BigReal, PrecisionError> {
    if !x.is_positive() {
        return Err(domain("log_gamma", x));
    }
    if x.is_integer() && x.to_f64() <= 2.0 {
        return Ok(BigReal::zero(ctx));
    }
    let work = ctx.raised(guard_for(x.to_f64(), ctx.bits()));
    Ok(ln_gamma_positive(x, work).with_context(ctx))
}

/// `B(a, b) = Γ(a)Γ(b)/Γ(a+b)` for positive arguments.
pub fn beta(a: &BigReal, b: &BigReal, ctx: PrecisionContext) -> Result<BigReal, PrecisionError> {
    if !a.is_positive() {
        return Err(domain("beta", a));
    }
    if !b.is_positive() {
        return Err(domain("beta", b));
    }
    let largest = a.to_f64() + b.to_f64();
    let work = ctx.raised(guard_for(largest, ctx.bits()));
    let sum = &a.with_context(work) + &b.with_context(work);
    let l = &(&ln_gamma_positive(a, work) + &ln_gamma_positive(b, work))
        - &ln_gamma_positive(&sum, work);
    Ok(l.exp().with_context(ctx))
}
