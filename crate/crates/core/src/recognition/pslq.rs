//! PSLQ integer-relation detection in fixed-point big-integer arithmetic.
//!
//! Every quantity is an integer scaled by `2^prec`, so a run is bit-for-bit
//! reproducible on any host. The structure follows the classical
//! Ferguson–Bailey iteration with `γ = √(4/3)`; termination without a
//! relation is certified by the bound `1/max_j |H_jj|` on the norm of any
//! relation.

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use super::RecognitionError;
use crate::precision::{BigReal, PrecisionContext};

/// Integer vector `n` with `Σ nᵢ vᵢ ≈ 0`, primitive (gcd 1).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegerRelation {
    pub coefficients: Vec<i64>,
    /// `|Σ nᵢ vᵢ|` at the precision of the search.
    #[serde(serialize_with = "super::ser_real")]
    pub residual: BigReal,
    pub max_abs_coeff: u64,
}

impl IntegerRelation {
    /// Same relation with the sign flipped so that entry `idx` is positive.
    pub fn oriented(mut self, idx: usize) -> Self {
        if self.coefficients.get(idx).is_some_and(|&c| c < 0) {
            self.coefficients.iter_mut().for_each(|c| *c = -*c);
        }
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PslqOutcome {
    Found(IntegerRelation),
    /// No relation with `max |nᵢ| <= maxcoeff`; any relation has Euclidean
    /// norm at least `norm_bound`.
    NoRelation {
        #[serde(serialize_with = "super::ser_sci")]
        norm_bound: f64,
        iterations: usize,
    },
}

/// `10^{dps / n}`: largest coefficient size PSLQ can resolve with `dps`
/// digits over `n` values.
pub fn detection_limit(dps: u32, basis_size: usize) -> BigReal {
    assert!(basis_size >= 2, "a relation needs at least two values");
    let ctx = PrecisionContext::new(20).expect("positive");
    let e = BigReal::from_ratio(dps as i64, basis_size as i64, ctx);
    BigReal::from_i64(10, ctx).pow(&e)
}

fn round_fixed(x: &BigInt, prec: usize) -> BigInt {
    ((x + (BigInt::one() << (prec - 1))) >> prec) << prec
}

fn sqrt_fixed(x: &BigInt, prec: usize) -> BigInt {
    (x << prec).sqrt()
}

fn max_abs(v: &[i64]) -> u64 {
    v.iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
}

struct State {
    n: usize,
    prec: usize,
    y: Vec<BigInt>,
    h: Vec<Vec<BigInt>>,
    a: Vec<Vec<BigInt>>,
    b: Vec<Vec<BigInt>>,
}

impl State {
    /// Size-reduces row `i` against row `j` of `H`, updating `y`, `A`, `B`.
    fn reduce(&mut self, i: usize, j: usize) -> bool {
        let prec = self.prec;
        if self.h[j][j].is_zero() {
            return false;
        }
        let t = round_fixed(&(&self.h[i][j] << prec).div_floor(&self.h[j][j]), prec);
        if t.is_zero() {
            return true;
        }
        let ty = (&t * &self.y[i]) >> prec;
        self.y[j] += ty;
        for k in 0..=j {
            let d = (&t * &self.h[j][k]) >> prec;
            self.h[i][k] -= d;
        }
        for k in 0..self.n {
            let d = (&t * &self.a[j][k]) >> prec;
            self.a[i][k] -= d;
            let e = (&t * &self.b[k][i]) >> prec;
            self.b[k][j] += e;
        }
        true
    }
}

/// Searches for integers `nᵢ`, not all zero, with `|nᵢ| <= maxcoeff` and
/// `Σ nᵢ vᵢ = 0` to the precision of `ctx`.
///
/// Inputs are taken to `ctx.dps()` digits. A returned relation has residual
/// below `10^{-(dps-10)}·max|vᵢ|`.
/// [`RecognitionError::PrecisionExhausted`] is returned when the reduction
/// degenerates or the step cap is hit before either a relation or the
/// coefficient bound is reached; that outcome says nothing about whether a
/// relation exists.
pub fn pslq(
    values: &[BigReal],
    maxcoeff: u64,
    ctx: PrecisionContext,
) -> Result<PslqOutcome, RecognitionError> {
    let n = values.len();
    if n < 2 {
        return Err(RecognitionError::TooFewValues(n));
    }
    if ctx.dps() < 15 {
        return Err(RecognitionError::PrecisionTooLow(ctx.dps()));
    }
    if let Some(i) = values.iter().position(BigReal::is_zero) {
        return Err(RecognitionError::ZeroValue(i));
    }
    // Inputs are quantised to `dps` digits even when the context carries
    // more bits, so the tolerance and the no-relation bound refer to what
    // the values are actually known to.
    let bits = (ctx.dps() as f64 * std::f64::consts::LOG2_10).ceil() as usize;
    let prec = bits + 60;
    let tol = BigInt::one() << (prec - (bits * 3 / 4));
    let x: Vec<BigInt> = values
        .iter()
        .map(|v| v.with_context(ctx).to_fixed(bits) << 60)
        .collect();
    let minx = x.iter().map(|v| v.abs()).min().expect("n >= 2");
    if minx < &tol / 100 {
        return Err(RecognitionError::ZeroValue(
            x.iter().position(|v| v.abs() == minx).unwrap_or(0),
        ));
    }
    let one = BigInt::one() << prec;
    let g = sqrt_fixed(&((BigInt::from(4) << prec) / 3), prec);

    let mut identity = vec![vec![BigInt::zero(); n]; n];
    for (i, row) in identity.iter_mut().enumerate() {
        row[i] = one.clone();
    }
    let mut s: Vec<BigInt> = (0..n)
        .map(|k| {
            let t: BigInt = x[k..].iter().map(|v| (v * v) >> prec).sum();
            sqrt_fixed(&t, prec)
        })
        .collect();
    let t = s[0].clone();
    let y: Vec<BigInt> = x.iter().map(|v| (v << prec).div_floor(&t)).collect();
    for sk in s.iter_mut() {
        *sk = (&*sk << prec).div_floor(&t);
    }
    let mut h = vec![vec![BigInt::zero(); n]; n];
    for i in 0..n {
        if i + 1 < n && !s[i].is_zero() {
            h[i][i] = (&s[i + 1] << prec).div_floor(&s[i]);
        }
        for j in 0..i {
            let sjj = &s[j] * &s[j + 1];
            if !sjj.is_zero() {
                h[i][j] = ((-(&y[i] * &y[j])) << prec).div_floor(&sjj);
            }
        }
    }
    let mut st = State {
        n,
        prec,
        y,
        h,
        a: identity.clone(),
        b: identity,
    };
    for i in 1..n {
        for j in (0..i).rev() {
            st.reduce(i, j);
        }
    }

    let max_steps = 20 * (ctx.dps() as usize).pow(2) + 1000;
    let mut best_bound = 0.0f64;
    for step in 0..max_steps {
        // Pick the row maximising γ^i |H_ii|.
        let mut m = 0;
        let mut best = BigInt::from(-1);
        let mut gpow = g.clone();
        for i in 0..n - 1 {
            let sz = (&gpow * st.h[i][i].abs()) >> (prec * i);
            if sz > best {
                best = sz;
                m = i;
            }
            gpow = &gpow * &g;
        }
        st.y.swap(m, m + 1);
        st.h.swap(m, m + 1);
        st.a.swap(m, m + 1);
        for row in st.b.iter_mut() {
            row.swap(m, m + 1);
        }
        if m + 2 < n {
            let hm = &st.h[m];
            let t0 = sqrt_fixed(&((&hm[m] * &hm[m] + &hm[m + 1] * &hm[m + 1]) >> prec), prec);
            if t0.is_zero() {
                return Err(RecognitionError::PrecisionExhausted {
                    iterations: step,
                    norm_bound: best_bound,
                });
            }
            let t1 = (&hm[m] << prec).div_floor(&t0);
            let t2 = (&hm[m + 1] << prec).div_floor(&t0);
            for i in m..n {
                let t3 = st.h[i][m].clone();
                let t4 = st.h[i][m + 1].clone();
                st.h[i][m] = (&t1 * &t3 + &t2 * &t4) >> prec;
                st.h[i][m + 1] = (-(&t2 * &t3) + &t1 * &t4) >> prec;
            }
        }
        for i in m + 1..n {
            for j in (0..=(i - 1).min(m + 1)).rev() {
                if !st.reduce(i, j) {
                    break;
                }
            }
        }

        for i in 0..n {
            if st.y[i].abs() < tol {
                let vec: Vec<i64> = (0..n)
                    .map(|j| {
                        (round_fixed(&st.b[j][i], prec) >> prec)
                            .to_i64()
                            .unwrap_or(i64::MAX)
                    })
                    .collect();
                // A near-relation with oversized coefficients is not an
                // answer; the iteration carries on towards the bound.
                if max_abs(&vec) <= maxcoeff && vec.iter().any(|&c| c != 0) {
                    return accept(values, vec, ctx, step, best_bound);
                }
            }
        }

        let diag_max = (0..n - 1)
            .map(|j| st.h[j][j].abs())
            .max()
            .unwrap_or_default();
        if diag_max.is_zero() {
            return Err(RecognitionError::PrecisionExhausted {
                iterations: step,
                norm_bound: best_bound,
            });
        }
        let bound = fixed_to_f64(&((BigInt::one() << (2 * prec)) / &diag_max), prec);
        best_bound = best_bound.max(bound);
        if best_bound >= maxcoeff as f64 {
            return Ok(PslqOutcome::NoRelation {
                norm_bound: best_bound,
                iterations: step + 1,
            });
        }
    }
    Err(RecognitionError::PrecisionExhausted {
        iterations: max_steps,
        norm_bound: best_bound,
    })
}

fn fixed_to_f64(x: &BigInt, prec: usize) -> f64 {
    let bits = x.bits() as usize;
    let shift = bits.saturating_sub(60);
    let top = (x.abs() >> shift).to_f64().unwrap_or(0.0);
    let v = top * 2f64.powi(shift as i32 - prec as i32);
    if x.sign() == Sign::Minus {
        -v
    } else {
        v
    }
}

fn accept(
    values: &[BigReal],
    vec: Vec<i64>,
    ctx: PrecisionContext,
    step: usize,
    bound: f64,
) -> Result<PslqOutcome, RecognitionError> {
    let g = vec.iter().fold(0i64, |g, &c| g.gcd(&c));
    let vec: Vec<i64> = vec.into_iter().map(|c| c / g).collect();
    let residual = relation_residual(values, &vec, ctx);
    if residual > threshold(values, ctx.dps(), ctx) {
        return Err(RecognitionError::PrecisionExhausted {
            iterations: step,
            norm_bound: bound,
        });
    }
    Ok(PslqOutcome::Found(IntegerRelation {
        max_abs_coeff: max_abs(&vec),
        coefficients: vec,
        residual,
    }))
}

/// `|Σ nᵢ vᵢ|` at `ctx`.
pub fn relation_residual(values: &[BigReal], coeffs: &[i64], ctx: PrecisionContext) -> BigReal {
    values
        .iter()
        .zip(coeffs)
        .fold(BigReal::zero(ctx), |acc, (v, &c)| {
            &acc + &v.with_context(ctx).mul_int(c)
        })
        .abs()
}

/// Acceptance bound `10^{-(dps-10)} · max |vᵢ|`.
pub fn threshold(values: &[BigReal], dps: u32, ctx: PrecisionContext) -> BigReal {
    let norm = values
        .iter()
        .map(BigReal::abs)
        .fold(BigReal::zero(ctx), |m, v| if v > m { v } else { m });
    &norm * &BigReal::from_i64(10, ctx).powi(-(dps as i64 - 10))
}
