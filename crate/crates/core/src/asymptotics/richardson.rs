use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use super::{AsymptoticsError, Sequence};
use crate::precision::{binomial, factorial, BigRational, BigReal, PrecisionContext};

/// Integer numerators `(-1)^{N-j} C(N,j) (k₀+j)^N`; the weights are these
/// divided by `N!`.
fn numerators(k0: usize, n: usize) -> Vec<BigInt> {
    (0..=n)
        .map(|j| {
            let w = BigInt::from(binomial(n as u64, j as u64))
                * num_traits::pow(BigInt::from(k0 + j), n);
            if (n - j) % 2 == 1 {
                -w
            } else {
                w
            }
        })
        .collect()
}

/// Exact weights `(-1)^{N-j} C(N,j) (k₀+j)^N / N!` for `j = 0 … N`.
pub fn richardson_weights(k0: usize, n: usize) -> Vec<BigRational> {
    let den = BigInt::from(factorial(n as u64));
    numerators(k0, n)
        .into_iter()
        .map(|w| BigRational::new(w, den.clone()))
        .collect()
}

fn log10_big(x: &BigInt) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let top: BigInt = x.abs() >> shift;
    let top = top.to_string().parse::<f64>().unwrap_or(1.0);
    top.log10() + shift as f64 * std::f64::consts::LOG10_2
}

/// `log10 Σ|w_j|`: decimal digits of the input values that the weighted sum
/// cancels away.
pub fn richardson_loss_digits(k0: usize, n: usize) -> f64 {
    let total: BigInt = numerators(k0, n).iter().map(|w| w.abs()).sum();
    log10_big(&total) - log10_big(&BigInt::from(factorial(n as u64)))
}

/// `R_N = Σ_{j=0}^{N} (-1)^{N-j} C(N,j) (k₀+j)^N / N! · s_{k₀+j}`.
///
/// The sum runs at a raised precision so that the integer weights are exact
/// and no rounding beyond the inputs' own error is introduced; the result is
/// rounded to `ctx`.
pub fn richardson(
    seq: &Sequence,
    k0: usize,
    n: usize,
    ctx: PrecisionContext,
) -> Result<BigReal, AsymptoticsError> {
    let out_of_range = || AsymptoticsError::OutOfRange {
        k0,
        n,
        first: seq.first(),
        last: seq.last(),
    };
    if k0 < seq.first() || seq.last().is_none_or(|l| k0 + n > l) {
        return Err(out_of_range());
    }
    let nums = numerators(k0, n);
    let widest = nums.iter().map(log10_big).fold(0.0, f64::max);
    let work = ctx.raised(widest.ceil() as u32 + 10);
    let mut acc = BigReal::zero(work);
    for (j, w) in nums.iter().enumerate() {
        let s = seq.get(k0 + j).ok_or_else(out_of_range)?.with_context(work);
        acc = &acc + &(&BigReal::from_bigint(w, work) * &s);
    }
    let nf = BigReal::from_bigint(&BigInt::from(factorial(n as u64)), work);
    Ok((&acc / &nf).with_context(ctx))
}
