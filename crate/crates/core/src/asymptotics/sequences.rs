use super::AsymptoticsError;
use crate::precision::{gamma, BigReal, PrecisionContext};
use crate::rs::SeriesCoefficients;

/// Values `s_k` for consecutive `k = first, first+1, …`.
#[derive(Clone, Debug, PartialEq)]
pub struct Sequence {
    first: usize,
    values: Vec<BigReal>,
}

impl Sequence {
    pub fn new(first: usize, values: Vec<BigReal>) -> Self {
        Self { first, values }
    }

    pub fn first(&self) -> usize {
        self.first
    }

    /// Last defined index, or `None` for an empty sequence.
    pub fn last(&self) -> Option<usize> {
        (!self.values.is_empty()).then(|| self.first + self.values.len() - 1)
    }

    pub fn get(&self, k: usize) -> Option<&BigReal> {
        k.checked_sub(self.first).and_then(|i| self.values.get(i))
    }

    pub fn values(&self) -> &[BigReal] {
        &self.values
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigReal)> {
        self.values
            .iter()
            .enumerate()
            .map(move |(i, v)| (self.first + i, v))
    }

    pub fn map(&self, f: impl Fn(usize, &BigReal) -> BigReal) -> Self {
        Self::new(self.first, self.iter().map(|(k, v)| f(k, v)).collect())
    }
}

fn nonzero(series: &SeriesCoefficients, k: usize) -> Result<&BigReal, AsymptoticsError> {
    let a = series.get(k).expect("index within series");
    if a.is_zero() {
        Err(AsymptoticsError::Malformed(format!("a_{k} is zero")))
    } else {
        Ok(a)
    }
}

/// `P_k(0) = ∏_{j=0}^{M-2} ((M-1)k - j)`.
fn falling(m: u32, k: usize, ctx: PrecisionContext) -> BigReal {
    let n = (m - 1) as i64;
    (0..n).fold(BigReal::one(ctx), |acc, j| acc.mul_int(n * k as i64 - j))
}

/// `Ã_k = ∏_{j=0}^{M-2}((M-1)k - j) / (-r_k)` with `r_k = a_k/a_{k-1}`, for
/// `k = 2 … K`.
pub fn action_sequence(series: &SeriesCoefficients) -> Result<Sequence, AsymptoticsError> {
    let k_max = series.order();
    if k_max < 2 {
        return Err(AsymptoticsError::TooShort {
            needed: 2,
            have: k_max,
        });
    }
    let ctx = series.ctx();
    let m = series.m();
    let values = (2..=k_max)
        .map(|k| {
            let r = nonzero(series, k)? / nonzero(series, k - 1)?;
            Ok(&falling(m, k, ctx) / &-r)
        })
        .collect::<Result<_, _>>()?;
    Ok(Sequence::new(2, values))
}

/// First-order solve of `P_k(b) = -r_k·A` with
/// `P_k(b) = ∏_{j=0}^{M-2}((M-1)k - j + b)`:
/// `b̃_k = (-r_k·A - P_k(0)) / (P_k(0) · Σ_j 1/((M-1)k - j))`.
pub fn shift_sequence(
    series: &SeriesCoefficients,
    a_exact: &BigReal,
) -> Result<Sequence, AsymptoticsError> {
    let k_max = series.order();
    if k_max < 2 {
        return Err(AsymptoticsError::TooShort {
            needed: 2,
            have: k_max,
        });
    }
    let ctx = series.ctx();
    let m = series.m();
    let n = (m - 1) as i64;
    let values = (2..=k_max)
        .map(|k| {
            let r = nonzero(series, k)? / nonzero(series, k - 1)?;
            let lhs = &-r * a_exact;
            let p0 = falling(m, k, ctx);
            let harmonic = (0..n).fold(BigReal::zero(ctx), |acc, j| {
                &acc + &BigReal::from_ratio(1, n * k as i64 - j, ctx)
            });
            Ok(&(&lhs - &p0) / &(&p0 * &harmonic))
        })
        .collect::<Result<_, _>>()?;
    Ok(Sequence::new(2, values))
}

/// `C̃_k = a_k·(-A)^k / Γ((M-1)k + 1/2)` for `k = 1 … K`. Signed: the
/// sequence converges to the negative multiplier.
pub fn stokes_sequence(
    series: &SeriesCoefficients,
    a_exact: &BigReal,
    ctx: PrecisionContext,
) -> Result<Sequence, AsymptoticsError> {
    let k_max = series.order();
    if k_max < 1 {
        return Err(AsymptoticsError::TooShort {
            needed: 1,
            have: k_max,
        });
    }
    let work = ctx.raised(10);
    let n = (series.m() - 1) as i64;
    let neg_a = -&a_exact.with_context(work);
    // Γ(x) at x = n + 1/2, then stepped upward by n per order.
    let mut g = gamma(&BigReal::from_ratio(2 * n + 1, 2, work), work).expect("positive");
    let mut x2 = 2 * n + 1; // twice the current argument
    let mut power = neg_a.clone();
    let mut values = Vec::with_capacity(k_max);
    for k in 1..=k_max {
        if k > 1 {
            for _ in 0..n {
                g = g.mul_int(x2).div_int(2);
                x2 += 2;
            }
            power = &power * &neg_a;
        }
        let a = series
            .get(k)
            .expect("index within series")
            .with_context(work);
        values.push((&(&a * &power) / &g).with_context(ctx));
    }
    Ok(Sequence::new(1, values))
}

/// `c̃_{1,k} = k (C̃_k / C - 1)`.
pub fn c1_sequence(stokes: &Sequence, c_exact: &BigReal) -> Sequence {
    stokes.map(|k, v| (v / c_exact).add_int(-1).mul_int(k as i64))
}
