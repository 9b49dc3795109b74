//! Exact-rational recursion, used only to validate the floating-point path.
//!
//! States are expanded in the rescaled basis `e_n = √(n!)|n⟩`, where
//! `x e_n = (e_{n+1} + n e_{n-1})/√2`. Two applications give
//! `x² e_m = ½(e_{m+2} + (2m+1)e_m + m(m-1)e_{m-2})`, so every coefficient
//! stays rational.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use super::OscillatorSpec;
use crate::precision::{factorial, BigRational, BigReal, PrecisionContext};

/// Even-level coefficients of `ψ^{(k)}` in the rescaled basis: entry `i`
/// multiplies `e_{2i}`.
#[derive(Clone, Debug, PartialEq)]
pub struct RationalState {
    pub order: usize,
    pub rescaled: Vec<BigRational>,
}

impl RationalState {
    /// Orthonormal-basis coefficients `⟨n|ψ⟩ = d_n √(n!)` at `ctx`.
    pub fn to_orthonormal(&self, ctx: PrecisionContext) -> Vec<BigReal> {
        self.rescaled
            .iter()
            .enumerate()
            .map(|(i, d)| {
                let f = BigReal::from_bigint(&factorial(2 * i as u64).into(), ctx).sqrt();
                &BigReal::from_rational(d, ctx) * &f
            })
            .collect()
    }
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn apply_x2(d: &[BigRational]) -> Vec<BigRational> {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    (0..=d.len())
        .map(|i| {
            let n = 2 * i as u64;
            let mut acc = BigRational::zero();
            if i >= 1 {
                acc += &d[i - 1];
            }
            if i < d.len() {
                acc += &d[i] * int(2 * n + 1);
            }
            if i + 1 < d.len() {
                acc += &d[i + 1] * int((n + 2) * (n + 1));
            }
            acc * &half
        })
        .collect()
}

/// Exact `a_0 … a_K` together with the states `ψ^{(0)} … ψ^{(K)}`.
pub fn rational_oracle_states(
    spec: OscillatorSpec,
    k_max: usize,
) -> (Vec<BigRational>, Vec<RationalState>) {
    let m = spec.m() as usize;
    let mut energies = vec![BigRational::new(BigInt::one(), BigInt::from(2))];
    let mut states = vec![RationalState {
        order: 0,
        rescaled: vec![BigRational::one()],
    }];
    for k in 1..=k_max {
        let mut v = states[k - 1].rescaled.clone();
        for _ in 0..m {
            v = apply_x2(&v);
        }
        energies.push(v[0].clone());
        let mut d = vec![BigRational::zero(); m * k + 1];
        for (i, slot) in d.iter_mut().enumerate().skip(1) {
            let mut acc = v[i].clone();
            for j in 1..k {
                if let Some(c) = states[k - j].rescaled.get(i) {
                    acc -= &energies[j] * c;
                }
            }
            *slot = -acc / int(2 * i as u64);
        }
        states.push(RationalState {
            order: k,
            rescaled: d,
        });
    }
    (energies, states)
}

/// Exact `a_0 … a_K`.
pub fn rational_oracle_series(spec: OscillatorSpec, k_max: usize) -> Vec<BigRational> {
    rational_oracle_states(spec, k_max).0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn low_orders() {
        let s2 = rational_oracle_series(OscillatorSpec::new(2).unwrap(), 2);
        assert_eq!(s2, vec![q(1, 2), q(3, 4), q(-21, 8)]);
        let s3 = rational_oracle_series(OscillatorSpec::new(3).unwrap(), 1);
        assert_eq!(s3, vec![q(1, 2), q(15, 8)]);
    }

    #[test]
    fn first_order_matches_double_factorial() {
        for m in 2..=11 {
            let spec = OscillatorSpec::new(m).unwrap();
            assert_eq!(rational_oracle_series(spec, 1)[1], spec.first_order_exact());
        }
    }

    #[test]
    fn quartic_third_order() {
        // a_3 = 333/16 for the x^4 oscillator
        let s = rational_oracle_series(OscillatorSpec::new(2).unwrap(), 3);
        assert_eq!(s[3], q(333, 16));
    }
}
