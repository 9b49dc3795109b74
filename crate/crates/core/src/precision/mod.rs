//! Arbitrary-precision reals, exact rationals and the handful of special
//! functions the rest of the crate consumes.
//!
//! Every value carries the [`PrecisionContext`] it was produced under. There is
//! no ambient precision: binary operations run at the wider of the two operand
//! contexts, and transcendental functions take their context from the
//! receiver.

mod arith;
mod exact;
mod gamma;

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use astro_float::{BigFloat, Consts, RoundingMode};
use num_bigint::{BigInt, BigUint, Sign as IntSign};
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use arith::{
    binomial, coprime_residues, double_factorial, factorial, independent_gamma_count, is_prime,
    totient,
};
pub use gamma::{bernoulli_numbers, beta, gamma, log_gamma};
pub use num_rational::BigRational;

/// Guard digits added on top of the requested precision unless overridden.
pub const DEFAULT_GUARD_DIGITS: u32 = 30;

const RM: RoundingMode = RoundingMode::ToEven;
const LOG2_10: f64 = std::f64::consts::LOG2_10;
const LIMB_BITS: usize = 64;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PrecisionError {
    #[error("precision must be at least one decimal digit")]
    ZeroPrecision,
    #[error("gamma has a pole at {0}")]
    Pole(String),
    #[error("{func} is undefined at {arg}")]
    Domain { func: &'static str, arg: String },
    #[error("cannot parse {0:?} as a decimal number")]
    Parse(String),
}

/// Requested decimal digits plus guard digits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionContext {
    dps: u32,
    guard: u32,
}

impl PrecisionContext {
    pub fn new(dps: u32) -> Result<Self, PrecisionError> {
        Self::with_guard(dps, DEFAULT_GUARD_DIGITS)
    }

    pub fn with_guard(dps: u32, guard: u32) -> Result<Self, PrecisionError> {
        if dps == 0 {
            return Err(PrecisionError::ZeroPrecision);
        }
        Ok(Self { dps, guard })
    }

    pub fn dps(&self) -> u32 {
        self.dps
    }

    pub fn guard(&self) -> u32 {
        self.guard
    }

    /// Binary precision of the working representation. Always a multiple of
    /// 64 so results do not depend on the host word size.
    pub fn bits(&self) -> usize {
        let raw = ((self.dps + self.guard) as f64 * LOG2_10).ceil() as usize + 8;
        raw.div_ceil(LIMB_BITS) * LIMB_BITS
    }

    /// Decimal digits actually carried, always strictly more than `dps`.
    pub fn effective_digits(&self) -> u32 {
        (self.bits() as f64 / LOG2_10).floor() as u32
    }

    /// Digits needed so that a decimal rendering reloads to the identical
    /// binary value.
    pub fn round_trip_digits(&self) -> usize {
        (self.bits() as f64 / LOG2_10).ceil() as usize + 2
    }

    /// Same guard, different requested digits.
    pub fn with_dps(&self, dps: u32) -> Result<Self, PrecisionError> {
        Self::with_guard(dps, self.guard)
    }

    /// Context with `extra` more guard digits; `dps` is unchanged.
    pub fn raised(&self, extra: u32) -> Self {
        Self {
            dps: self.dps,
            guard: self.guard + extra,
        }
    }

    fn wider(self, other: Self) -> Self {
        match self.bits().cmp(&other.bits()) {
            Ordering::Less => other,
            Ordering::Greater => self,
            Ordering::Equal => {
                if (other.dps, other.guard) > (self.dps, self.guard) {
                    other
                } else {
                    self
                }
            }
        }
    }
}

/// An arbitrary-precision real tagged with its context.
#[derive(Clone)]
pub struct BigReal {
    value: BigFloat,
    ctx: PrecisionContext,
}

fn consts() -> Consts {
    Consts::new().expect("allocating constant cache")
}

impl BigReal {
    fn wrap(value: BigFloat, ctx: PrecisionContext) -> Self {
        assert!(
            !value.is_nan() && !value.is_inf(),
            "arithmetic produced a non-finite value"
        );
        Self { value, ctx }
    }

    pub fn zero(ctx: PrecisionContext) -> Self {
        Self::wrap(BigFloat::from_word(0, ctx.bits()), ctx)
    }

    pub fn one(ctx: PrecisionContext) -> Self {
        Self::from_i64(1, ctx)
    }

    pub fn from_i64(n: i64, ctx: PrecisionContext) -> Self {
        Self::wrap(BigFloat::from_i64(n, ctx.bits()), ctx)
    }

    pub fn from_u64(n: u64, ctx: PrecisionContext) -> Self {
        Self::wrap(BigFloat::from_u64(n, ctx.bits()), ctx)
    }

    /// Exact binary value of an `f64`; meant for tests and tolerances.
    pub fn from_f64(x: f64, ctx: PrecisionContext) -> Self {
        let mut v = BigFloat::from_f64(x, 64);
        v.set_precision(ctx.bits(), RM).expect("precision");
        Self::wrap(v, ctx)
    }

    pub fn from_bigint(n: &BigInt, ctx: PrecisionContext) -> Self {
        let neg = n.sign() == IntSign::Minus;
        Self::wrap(exact::from_parts(neg, n.magnitude(), 0, ctx.bits()), ctx)
    }

    /// Correctly rounded value of an exact rational.
    pub fn from_rational(q: &BigRational, ctx: PrecisionContext) -> Self {
        let neg = q.is_negative();
        Self::wrap(
            exact::from_ratio(
                neg,
                q.numer().magnitude(),
                q.denom().magnitude(),
                ctx.bits(),
            ),
            ctx,
        )
    }

    pub fn from_ratio(num: i64, den: i64, ctx: PrecisionContext) -> Self {
        Self::from_rational(&BigRational::new(num.into(), den.into()), ctx)
    }

    /// `n / 2^frac_bits`, the inverse of [`BigReal::to_fixed`].
    pub fn from_fixed(n: &BigInt, frac_bits: usize, ctx: PrecisionContext) -> Self {
        let neg = n.sign() == IntSign::Minus;
        Self::wrap(
            exact::from_parts(neg, n.magnitude(), -(frac_bits as i64), ctx.bits()),
            ctx,
        )
    }

    /// Correctly rounded parse of a decimal string.
    pub fn parse(s: &str, ctx: PrecisionContext) -> Result<Self, PrecisionError> {
        let (neg, digits, exp10) = exact::parse_decimal(s)?;
        let ten = BigUint::from(10u32);
        let (num, den) = if exp10 >= 0 {
            (
                digits * num_traits::pow(ten, exp10 as usize),
                BigUint::from(1u32),
            )
        } else {
            (digits, num_traits::pow(ten, (-exp10) as usize))
        };
        Ok(Self::wrap(
            exact::from_ratio(neg, &num, &den, ctx.bits()),
            ctx,
        ))
    }

    pub fn pi(ctx: PrecisionContext) -> Self {
        let mut cc = consts();
        Self::wrap(cc.pi(ctx.bits(), RM), ctx)
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.ctx
    }

    /// The same number re-rounded (or exactly extended) to `ctx`.
    pub fn with_context(&self, ctx: PrecisionContext) -> Self {
        let mut v = self.value.clone();
        v.set_precision(ctx.bits(), RM).expect("precision");
        Self::wrap(v, ctx)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        !self.is_zero() && self.value.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        !self.is_zero() && self.value.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.value.is_int()
    }

    pub fn signum(&self) -> i32 {
        if self.is_zero() {
            0
        } else if self.value.is_negative() {
            -1
        } else {
            1
        }
    }

    pub fn abs(&self) -> Self {
        Self::wrap(self.value.abs(), self.ctx)
    }

    pub fn recip(&self) -> Self {
        assert!(!self.is_zero(), "division by zero");
        Self::wrap(self.value.reciprocal(self.ctx.bits(), RM), self.ctx)
    }

    pub fn sqrt(&self) -> Self {
        assert!(!self.is_negative(), "square root of a negative number");
        Self::wrap(self.value.sqrt(self.ctx.bits(), RM), self.ctx)
    }

    /// Natural logarithm; panics for non-positive input.
    pub fn ln(&self) -> Self {
        assert!(self.is_positive(), "logarithm of a non-positive number");
        let mut cc = consts();
        Self::wrap(self.value.ln(self.ctx.bits(), RM, &mut cc), self.ctx)
    }

    pub fn exp(&self) -> Self {
        let mut cc = consts();
        Self::wrap(self.value.exp(self.ctx.bits(), RM, &mut cc), self.ctx)
    }

    pub fn sin(&self) -> Self {
        let mut cc = consts();
        Self::wrap(self.value.sin(self.ctx.bits(), RM, &mut cc), self.ctx)
    }

    pub fn cos(&self) -> Self {
        let mut cc = consts();
        Self::wrap(self.value.cos(self.ctx.bits(), RM, &mut cc), self.ctx)
    }

    pub fn powi(&self, n: i64) -> Self {
        let p = Self::wrap(
            self.value
                .powi(n.unsigned_abs() as usize, self.ctx.bits(), RM),
            self.ctx,
        );
        if n < 0 {
            p.recip()
        } else {
            p
        }
    }

    /// `self^y` for positive `self`.
    pub fn pow(&self, y: &BigReal) -> Self {
        (&self.ln() * y).exp()
    }

    pub fn mul_int(&self, n: i64) -> Self {
        let f = BigFloat::from_i64(n, LIMB_BITS);
        Self::wrap(self.value.mul(&f, self.ctx.bits(), RM), self.ctx)
    }

    pub fn div_int(&self, n: i64) -> Self {
        assert!(n != 0, "division by zero");
        let f = BigFloat::from_i64(n, LIMB_BITS);
        Self::wrap(self.value.div(&f, self.ctx.bits(), RM), self.ctx)
    }

    pub fn add_int(&self, n: i64) -> Self {
        let f = BigFloat::from_i64(n, LIMB_BITS);
        Self::wrap(self.value.add(&f, self.ctx.bits(), RM), self.ctx)
    }

    /// Nearest `f64`; saturates to ±inf outside the double range.
    pub fn to_f64(&self) -> f64 {
        if self.is_zero() {
            return 0.0;
        }
        let p = exact::to_parts(&self.value);
        let len = p.mantissa.bits() as i64;
        let top = if len > 60 {
            &p.mantissa >> (len - 60) as u64
        } else {
            p.mantissa.clone()
        };
        let shift = p.exp2 + (len - 60).max(0);
        let mag = top.to_u64_digits().first().copied().unwrap_or(0) as f64;
        let v = mag * 2f64.powi(shift.clamp(-2000, 2000) as i32);
        if p.neg {
            -v
        } else {
            v
        }
    }

    /// Rough `log10 |x|`, usable for magnitudes far beyond the `f64` range.
    pub fn log10_abs(&self) -> f64 {
        if self.is_zero() {
            return f64::NEG_INFINITY;
        }
        let p = exact::to_parts(&self.value);
        let len = p.mantissa.bits() as i64;
        let top = (&p.mantissa >> (len - 53).max(0) as u64)
            .to_u64_digits()
            .first()
            .copied()
            .unwrap_or(1) as f64;
        top.log10() + ((len - 53).max(0) + p.exp2) as f64 * std::f64::consts::LOG10_2
    }

    /// `round(x · 2^frac_bits)` as an exact integer (ties to even).
    pub fn to_fixed(&self, frac_bits: usize) -> BigInt {
        if self.is_zero() {
            return BigInt::zero();
        }
        let p = exact::to_parts(&self.value);
        let shift = p.exp2 + frac_bits as i64;
        let mag = if shift >= 0 {
            p.mantissa << shift as u64
        } else {
            let s = (-shift) as u64;
            let q = &p.mantissa >> s;
            let rem = &p.mantissa - (&q << s);
            let half = BigUint::from(1u32) << (s - 1);
            if rem > half || (rem == half && q.bit(0)) {
                q + 1u32
            } else {
                q
            }
        };
        let sign = if p.neg { IntSign::Minus } else { IntSign::Plus };
        BigInt::from_biguint(sign, mag)
    }

    /// Sign, `digits` significant decimal digits (rounded half-even) and the
    /// decimal exponent of the leading digit.
    pub fn significand(&self, digits: usize) -> (bool, String, i64) {
        let p = exact::to_parts(&self.value);
        let (d, e) = exact::decimal_digits(&p.mantissa, p.exp2, digits);
        (p.neg && !self.is_zero(), d, e)
    }

    /// Scientific rendering `-d.ddd…e-N` with `digits` significant digits.
    pub fn to_sci_string(&self, digits: usize) -> String {
        let (neg, d, e) = self.significand(digits);
        let sign = if neg { "-" } else { "" };
        if digits == 1 {
            format!("{sign}{d}e{e}")
        } else {
            format!("{sign}{}.{}e{e}", &d[..1], &d[1..])
        }
    }

    /// Positional rendering with `digits` significant digits when the
    /// exponent is moderate, scientific otherwise.
    pub fn to_decimal_string(&self, digits: usize) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        let (neg, d, e) = self.significand(digits);
        let sign = if neg { "-" } else { "" };
        if e < -6 || e >= digits as i64 {
            return self.to_sci_string(digits);
        }
        if e < 0 {
            format!("{sign}0.{}{d}", "0".repeat((-e - 1) as usize))
        } else {
            let split = (e + 1) as usize;
            if split == d.len() {
                format!("{sign}{d}")
            } else {
                format!("{sign}{}.{}", &d[..split], &d[split..])
            }
        }
    }

    /// Lossless decimal form: reparsing under the same context restores the
    /// identical binary value.
    pub fn to_round_trip_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.to_sci_string(self.ctx.round_trip_digits())
    }

    /// Truncates toward zero after `digits` significant decimal digits.
    pub fn truncate_digits(&self, digits: usize) -> Self {
        if self.is_zero() || digits == 0 {
            return Self::zero(self.ctx);
        }
        // Render with spare digits, then chop; the spare digits make a
        // rounding carry into the kept digits impossible except for runs of 9s
        // that exactly hit the boundary, which do not occur for inexact values.
        let (neg, d, e) = self.significand(digits + 8);
        let kept = &d[..digits];
        let s = format!(
            "{}{}.{}e{e}",
            if neg { "-" } else { "" },
            &kept[..1],
            &kept[1..]
        );
        Self::parse(&s, self.ctx).expect("self-rendered decimal")
    }

    /// Number of leading significant digits two values share, capped at
    /// `digits`. Values of different sign or decade share none.
    pub fn common_digits(&self, other: &BigReal, digits: usize) -> usize {
        let (n1, d1, e1) = self.significand(digits);
        let (n2, d2, e2) = other.significand(digits);
        if n1 != n2 || e1 != e2 {
            return 0;
        }
        d1.bytes()
            .zip(d2.bytes())
            .take_while(|(a, b)| a == b)
            .count()
    }

    /// Digits to which two values agree: the longer of the shared decimal
    /// prefix and `floor(-log10 |self/other - 1|)`, capped at `digits`. The
    /// second measure handles values straddling a decade boundary such as
    /// `-0.5000…` and `-0.4999…`.
    pub fn agreement_digits(&self, other: &BigReal, digits: usize) -> usize {
        let prefix = self.common_digits(other, digits);
        if self == other {
            return digits;
        }
        if other.is_zero() || self.signum() != other.signum() {
            return prefix;
        }
        let rel = -self.rel_diff(other).log10_abs();
        let by_diff = if rel.is_finite() && rel > 0.0 {
            rel.floor() as usize
        } else {
            0
        };
        prefix.max(by_diff).min(digits)
    }

    /// `|self - other| / |other|`.
    pub fn rel_diff(&self, other: &BigReal) -> BigReal {
        (self - other).abs() / other.abs()
    }

    /// Exact binary decomposition `(negative, mantissa, exp2)`.
    pub(crate) fn to_binary_parts(&self) -> (bool, BigUint, i64) {
        let p = exact::to_parts(&self.value);
        (p.neg, p.mantissa, p.exp2)
    }

    pub(crate) fn from_binary_parts(
        neg: bool,
        mantissa: &BigUint,
        exp2: i64,
        ctx: PrecisionContext,
    ) -> Self {
        Self::wrap(exact::from_parts(neg, mantissa, exp2, ctx.bits()), ctx)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = f.precision().unwrap_or(self.ctx.dps as usize).max(1);
        f.write_str(&self.to_decimal_string(digits))
    }
}

impl fmt::Debug for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "BigReal({}, dps={})",
            self.to_sci_string(20),
            self.ctx.dps
        )
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.value.cmp(&other.value) == Some(0)
    }
}

impl PartialOrd for BigReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.cmp(&other.value).map(|c| c.cmp(&0))
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident, $op:ident) => {
        impl $trait<&BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                let ctx = self.ctx.wider(rhs.ctx);
                BigReal::wrap(self.value.$op(&rhs.value, ctx.bits(), RM), ctx)
            }
        }
        impl $trait<BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&BigReal> for BigReal {
            type Output = BigReal;
            fn $method(self, rhs: &BigReal) -> BigReal {
                (&self).$method(rhs)
            }
        }
        impl $trait<BigReal> for &BigReal {
            type Output = BigReal;
            fn $method(self, rhs: BigReal) -> BigReal {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add, add);
binop!(Sub, sub, sub);
binop!(Mul, mul, mul);

impl Div<&BigReal> for &BigReal {
    type Output = BigReal;
    fn div(self, rhs: &BigReal) -> BigReal {
        assert!(!rhs.is_zero(), "division by zero");
        let ctx = self.ctx.wider(rhs.ctx);
        BigReal::wrap(self.value.div(&rhs.value, ctx.bits(), RM), ctx)
    }
}

impl Div<BigReal> for BigReal {
    type Output = BigReal;
    fn div(self, rhs: BigReal) -> BigReal {
        &self / &rhs
    }
}

impl Div<&BigReal> for BigReal {
    type Output = BigReal;
    fn div(self, rhs: &BigReal) -> BigReal {
        &self / rhs
    }
}

impl Div<BigReal> for &BigReal {
    type Output = BigReal;
    fn div(self, rhs: BigReal) -> BigReal {
        self / &rhs
    }
}

impl Neg for &BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        BigReal::wrap(self.value.clone().neg(), self.ctx)
    }
}

impl Neg for BigReal {
    type Output = BigReal;
    fn neg(self) -> BigReal {
        -&self
    }
}
