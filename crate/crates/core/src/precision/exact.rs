//! Exact conversions between binary floats, big integers and decimal strings.
//!
//! Every conversion here is correctly rounded (round-half-even) against the
//! exact value, which is what makes decimal caches reload bit-identically.

use astro_float::{BigFloat, Sign, Word};
use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, Pow, Zero};

use super::PrecisionError;

const WORD_BYTES: usize = std::mem::size_of::<Word>();
const LOG10_2: f64 = std::f64::consts::LOG10_2;

/// A finite binary float split as `(-1)^neg * mantissa * 2^exp2`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct Parts {
    pub neg: bool,
    pub mantissa: BigUint,
    pub exp2: i64,
}

pub(crate) fn to_parts(x: &BigFloat) -> Parts {
    let (words, _, sign, exponent, _) = x
        .as_raw_parts()
        .expect("non-finite value reached an exact conversion");
    let mut bytes = Vec::with_capacity(words.len() * WORD_BYTES);
    for w in words {
        bytes.extend_from_slice(&w.to_le_bytes());
    }
    let mantissa = BigUint::from_bytes_le(&bytes);
    if mantissa.is_zero() {
        return Parts {
            neg: false,
            mantissa,
            exp2: 0,
        };
    }
    let p = (words.len() * WORD_BYTES * 8) as i64;
    Parts {
        neg: sign == Sign::Neg,
        mantissa,
        exp2: exponent as i64 - p,
    }
}

/// Builds a float of `bits` precision from `±n * 2^exp2`, rounding `n` half-even
/// when it does not fit.
pub(crate) fn from_parts(neg: bool, n: &BigUint, exp2: i64, bits: usize) -> BigFloat {
    debug_assert!(bits.is_multiple_of(WORD_BYTES * 8));
    if n.is_zero() {
        return BigFloat::from_word(0, bits);
    }
    let len = n.bits() as usize;
    let (q, e) = if len > bits {
        let shift = len - bits;
        let (mut q, rem) = (n >> shift, n & ((BigUint::one() << shift) - 1u32));
        let half = BigUint::one() << (shift - 1);
        if rem > half || (rem == half && q.bit(0)) {
            q += 1u32;
        }
        (q, exp2 + shift as i64)
    } else {
        (n.clone(), exp2)
    };
    // q may have grown to bits + 1 through the carry; the shift below absorbs it.
    let qlen = q.bits() as usize;
    let (m, exponent) = if qlen > bits {
        (q >> 1u32, e + 1 + qlen as i64 - 1)
    } else {
        (q << (bits - qlen), e + qlen as i64)
    };
    let exponent = i32::try_from(exponent).expect("binary exponent out of range");
    let mut bytes = m.to_bytes_le();
    bytes.resize(bits / 8, 0);
    let words: Vec<Word> = bytes
        .chunks_exact(WORD_BYTES)
        .map(|c| Word::from_le_bytes(c.try_into().unwrap()))
        .collect();
    let sign = if neg { Sign::Neg } else { Sign::Pos };
    BigFloat::from_words(&words, sign, exponent)
}

/// Correctly rounded `±num/den` at `bits` precision.
pub(crate) fn from_ratio(neg: bool, num: &BigUint, den: &BigUint, bits: usize) -> BigFloat {
    assert!(!den.is_zero(), "zero denominator");
    if num.is_zero() {
        return BigFloat::from_word(0, bits);
    }
    let e = num.bits() as i64 - den.bits() as i64;
    // Choose s so that floor(num * 2^s / den) has bits or bits+1 bits, then
    // keep one extra bit and a sticky remainder for the rounding decision.
    let s = bits as i64 - e + 1;
    let (a, b) = if s >= 0 {
        (num << s as u64, den.clone())
    } else {
        (num.clone(), den << (-s) as u64)
    };
    let (q, r) = a.div_rem(&b);
    // q carries between bits and bits+2 significant bits; fold the remainder
    // in as a sticky bit so from_parts sees the exact rounding context.
    let q = (q << 1u32) | BigUint::from(!r.is_zero() as u32);
    from_parts(neg, &q, -s - 1, bits)
}

/// Significant decimal digits of a positive value `n * 2^exp2`, rounded
/// half-even to exactly `digits` digits. Returns `(digits, exp10)` meaning
/// `d.ddd… × 10^exp10`.
pub(crate) fn decimal_digits(n: &BigUint, exp2: i64, digits: usize) -> (String, i64) {
    assert!(digits > 0);
    if n.is_zero() {
        return ("0".repeat(digits), 0);
    }
    let ten = BigUint::from(10u32);
    let lower = Pow::pow(&ten, (digits - 1) as u32);
    let upper = &lower * &ten;
    let mut e10 = ((n.bits() as i64 - 1 + exp2) as f64 * LOG10_2).floor() as i64;
    loop {
        let k = digits as i64 - 1 - e10;
        let mut num = n.clone();
        let mut den = BigUint::one();
        if k >= 0 {
            num *= Pow::pow(&ten, k as u64);
        } else {
            den *= Pow::pow(&ten, (-k) as u64);
        }
        if exp2 >= 0 {
            num <<= exp2 as u64;
        } else {
            den <<= (-exp2) as u64;
        }
        let q = round_half_even(&num, &den);
        if q >= upper {
            e10 += 1;
        } else if q < lower {
            e10 -= 1;
        } else {
            return (q.to_str_radix(10), e10);
        }
    }
}

fn round_half_even(num: &BigUint, den: &BigUint) -> BigUint {
    let (q, r) = num.div_rem(den);
    let twice = r << 1u32;
    if &twice > den || (&twice == den && q.bit(0)) {
        q + 1u32
    } else {
        q
    }
}

/// Parses `[+-]digits[.digits][e[+-]digits]` into `(neg, integer, exp10)`.
pub(crate) fn parse_decimal(s: &str) -> Result<(bool, BigUint, i64), PrecisionError> {
    let err = || PrecisionError::Parse(s.to_string());
    let t = s.trim();
    let (neg, t) = match t.as_bytes().first() {
        Some(b'-') => (true, &t[1..]),
        Some(b'+') => (false, &t[1..]),
        _ => (false, t),
    };
    let (mant, exp) = match t.find(['e', 'E']) {
        Some(i) => (&t[..i], t[i + 1..].parse::<i64>().map_err(|_| err())?),
        None => (t, 0),
    };
    let (int, frac) = match mant.find('.') {
        Some(i) => (&mant[..i], &mant[i + 1..]),
        None => (mant, ""),
    };
    if int.is_empty() && frac.is_empty() {
        return Err(err());
    }
    if !int.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return Err(err());
    }
    let all = format!("{int}{frac}");
    let value = BigUint::parse_bytes(all.as_bytes(), 10).ok_or_else(err)?;
    Ok((neg, value, exp - frac.len() as i64))
}
