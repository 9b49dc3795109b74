//! Exact large-order models with injectable parameters, used as test
//! fixtures for every extraction sequence.

use crate::precision::{gamma, BigRational, BigReal, PrecisionContext};
use crate::rs::SeriesCoefficients;

/// `a_k = C · (-A)^{-k} · Γ((M-1)k + b + 1) · (1 + c₁/k)` for `k ≥ 1`, and
/// `a_0 = C · Γ(b + 1)`.
#[derive(Clone, Debug)]
pub struct SyntheticModel {
    pub m: u32,
    pub a: BigReal,
    pub b: BigRational,
    pub c: BigReal,
    pub c1: BigReal,
    pub ctx: PrecisionContext,
}

impl SyntheticModel {
    /// Model with `b = -1/2` and no subleading correction.
    pub fn new(m: u32, a: BigReal, c: BigReal, ctx: PrecisionContext) -> Self {
        Self {
            m,
            a,
            b: BigRational::new((-1).into(), 2.into()),
            c,
            c1: BigReal::zero(ctx),
            ctx,
        }
    }

    pub fn with_shift(mut self, b: BigRational) -> Self {
        self.b = b;
        self
    }

    pub fn with_c1(mut self, c1: BigReal) -> Self {
        self.c1 = c1;
        self
    }
}

pub fn synthetic_series(model: &SyntheticModel, k_max: usize) -> SeriesCoefficients {
    let ctx = model.ctx;
    let work = ctx.raised(10);
    let n = (model.m - 1) as i64;
    let x0 = BigReal::from_rational(&model.b, work).add_int(1);
    assert!(x0.is_positive(), "b + 1 must be positive");
    let mut g = gamma(&x0, work).expect("positive argument");
    let mut x = x0;
    let inv = -&model.a.with_context(work).recip();
    let c = model.c.with_context(work);
    let c1 = model.c1.with_context(work);
    let mut power = BigReal::one(work);
    let mut values = vec![(&c * &g).with_context(ctx)];
    for k in 1..=k_max {
        for _ in 0..n {
            g = &g * &x;
            x = x.add_int(1);
        }
        power = &power * &inv;
        let corr = c1.div_int(k as i64).add_int(1);
        values.push((&(&(&c * &power) * &g) * &corr).with_context(ctx));
    }
    SeriesCoefficients::new(model.m, values, ctx)
}
