use std::collections::BTreeMap;
use std::fmt;

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};
use serde::{Serialize, Serializer};

use super::{RecognitionError, Symbol};
use crate::precision::{BigReal, PrecisionContext};

/// Monomial identity `∏ symbol^exponent = 1` over `|C|`, Gamma values, π,
/// 2, 3 and e. Displayed with `C`, Gamma and π on the left and the
/// algebraic part on the right.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosedForm {
    exponents: BTreeMap<Symbol, Rational64>,
}

impl ClosedForm {
    pub fn new(pairs: impl IntoIterator<Item = (Symbol, Rational64)>) -> Self {
        let mut exponents = BTreeMap::new();
        for (s, e) in pairs {
            *exponents.entry(s).or_insert_with(Rational64::zero) += e;
        }
        exponents.retain(|_, e| !e.is_zero());
        Self { exponents }
    }

    /// `∏ symbolᵢ^{nᵢ} = 1` from an integer relation over a log basis.
    pub fn from_relation(symbols: &[Symbol], coeffs: &[i64]) -> Self {
        assert_eq!(
            symbols.len(),
            coeffs.len(),
            "relation and basis differ in length"
        );
        Self::new(
            symbols
                .iter()
                .zip(coeffs)
                .map(|(s, &c)| (*s, Rational64::from_integer(c))),
        )
    }

    pub fn exponent(&self, s: Symbol) -> Rational64 {
        self.exponents
            .get(&s)
            .copied()
            .unwrap_or_else(Rational64::zero)
    }

    pub fn exponents(&self) -> &BTreeMap<Symbol, Rational64> {
        &self.exponents
    }

    pub fn gamma_symbols(&self) -> Vec<Symbol> {
        self.exponents
            .keys()
            .filter(|s| matches!(s, Symbol::Gamma { .. }))
            .copied()
            .collect()
    }

    /// Integer exponents with gcd 1 and a positive power of `C` (or of the
    /// first symbol when `C` is absent).
    pub fn normalized(&self) -> Self {
        if self.exponents.is_empty() {
            return self.clone();
        }
        let lcm = self.exponents.values().fold(1i64, |l, e| l.lcm(e.denom()));
        let ints: Vec<(Symbol, i64)> = self
            .exponents
            .iter()
            .map(|(s, e)| (*s, (e * lcm).to_integer()))
            .collect();
        let g = ints.iter().fold(0i64, |g, (_, e)| g.gcd(e));
        let lead = self
            .exponents
            .get(&Symbol::AbsC)
            .or_else(|| self.exponents.values().next())
            .copied()
            .unwrap_or_else(Rational64::one);
        let sign = if lead.is_negative() { -1 } else { 1 };
        Self::new(
            ints.into_iter()
                .map(|(s, e)| (s, Rational64::from_integer(sign * e / g))),
        )
    }

    /// Value of `ln ∏ symbol^exponent`; zero for an exact identity.
    pub fn log_value(
        &self,
        c: &BigReal,
        ctx: PrecisionContext,
    ) -> Result<BigReal, RecognitionError> {
        let mut acc = BigReal::zero(ctx);
        for (s, e) in &self.exponents {
            let l = s.log_value(c, ctx)?;
            acc = &acc + &l.mul_int(*e.numer()).div_int(*e.denom());
        }
        Ok(acc)
    }

    /// `|C|` implied by the identity, or `None` when `C` does not occur.
    pub fn solve_abs_c(&self, ctx: PrecisionContext) -> Result<Option<BigReal>, RecognitionError> {
        let e = self.exponent(Symbol::AbsC);
        if e.is_zero() {
            return Ok(None);
        }
        let work = ctx.raised(10);
        let mut rest = self.clone();
        rest.exponents.remove(&Symbol::AbsC);
        let l = rest.log_value(&BigReal::one(work), work)?;
        let ln_c = (-l).mul_int(*e.denom()).div_int(*e.numer());
        Ok(Some(ln_c.exp().with_context(ctx)))
    }

    fn side(&self, lhs: bool) -> Vec<(Symbol, Rational64)> {
        self.exponents
            .iter()
            .filter(|(s, _)| matches!(s, Symbol::AbsC | Symbol::Gamma { .. } | Symbol::Pi) == lhs)
            .map(|(s, e)| (*s, if lhs { *e } else { -e }))
            .collect()
    }
}

fn render(factors: &[(Symbol, Rational64)]) -> String {
    if factors.is_empty() {
        return "1".into();
    }
    factors
        .iter()
        .map(|(s, e)| {
            if e.is_one() {
                s.to_string()
            } else if e.is_integer() {
                format!("{s}^{e}")
            } else {
                format!("{s}^({e})")
            }
        })
        .collect::<Vec<_>>()
        .join(" · ")
}

impl fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let lhs = self.side(true);
        let rhs = self.side(false);
        write!(f, "{} = {}", render(&lhs), render(&rhs))?;
        let integral = !rhs.is_empty()
            && rhs.iter().all(|(s, e)| {
                matches!(s, Symbol::Two | Symbol::Three) && e.is_integer() && !e.is_negative()
            });
        if integral && (rhs.len() > 1 || !rhs[0].1.is_one()) {
            let v = rhs.iter().fold(num_bigint::BigUint::one(), |acc, (s, e)| {
                let base = if *s == Symbol::Two { 2u32 } else { 3u32 };
                acc * num_bigint::BigUint::from(base).pow(e.to_integer() as u32)
            });
            write!(f, " = {v}")?;
        }
        Ok(())
    }
}

impl Serialize for ClosedForm {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// `1/sin(π a/n)` as `(α, β)` with value `2^α 3^β`, for the denominators
/// where it is of that shape.
fn inverse_sine(num: u32, den: u32) -> Option<(Rational64, Rational64)> {
    let r = |n, d| Rational64::new(n, d);
    match (num, den) {
        (1 | 2, 3) => Some((r(1, 1), r(-1, 2))),
        (1 | 3, 4) => Some((r(1, 2), r(0, 1))),
        (1 | 5, 6) => Some((r(1, 1), r(0, 1))),
        _ => None,
    }
}

/// Rewrites Gamma factors into a smaller set: `Γ(1) = 1`,
/// `Γ(1/2) = π^{1/2}`, reflection `Γ(x) = π / (sin(πx) Γ(1-x))` for
/// `x > 1/2` at denominators 3, 4 and 6, and the duplication identity
/// `Γ(1/6) = Γ(1/3)² · 3^{1/2} · 2^{-1/3} · π^{-1/2}`. The result is
/// normalized to primitive integer exponents.
pub fn reduce_gamma(form: &ClosedForm) -> ClosedForm {
    let mut exps = form.exponents.clone();
    loop {
        let mut changed = false;
        for s in exps.keys().copied().collect::<Vec<_>>() {
            let Symbol::Gamma { num, den } = s else {
                continue;
            };
            let q = exps[&s];
            let mut add = Vec::new();
            if num == den {
                // Γ(1) = 1
            } else if 2 * num == den {
                add.push((Symbol::Pi, q / 2));
            } else if 2 * num > den && num < den {
                let Some((alpha, beta)) = inverse_sine(num, den) else {
                    continue;
                };
                add.extend([
                    (Symbol::Pi, q),
                    (Symbol::Two, q * alpha),
                    (Symbol::Three, q * beta),
                    (Symbol::gamma(den - num, den), -q),
                ]);
            } else if (num, den) == (1, 6) {
                add.extend([
                    (Symbol::gamma(1, 3), q * 2),
                    (Symbol::Three, q / 2),
                    (Symbol::Two, -q / 3),
                    (Symbol::Pi, -q / 2),
                ]);
            } else {
                continue;
            }
            exps.remove(&s);
            for (t, e) in add {
                *exps.entry(t).or_insert_with(Rational64::zero) += e;
            }
            exps.retain(|_, e| !e.is_zero());
            changed = true;
            break;
        }
        if !changed {
            break;
        }
    }
    ClosedForm { exponents: exps }.normalized()
}

/// `|lhs/rhs - 1|` for the identity evaluated with multiplier `c`.
pub fn verify_identity(
    form: &ClosedForm,
    c: &BigReal,
    ctx: PrecisionContext,
) -> Result<BigReal, RecognitionError> {
    let work = ctx.raised(10);
    let l = form.log_value(c, work)?;
    Ok((&l.exp() - &BigReal::one(work)).abs().with_context(ctx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(n: i64) -> Rational64 {
        Rational64::from_integer(n)
    }

    fn raw_c7() -> ClosedForm {
        let syms = [
            Symbol::AbsC,
            Symbol::gamma(1, 6),
            Symbol::Pi,
            Symbol::Two,
            Symbol::Three,
            Symbol::E,
        ];
        ClosedForm::from_relation(&syms, &[24, 18, 33, -74, -21, 0])
    }

    #[test]
    fn c7_reduction_symbolic() {
        let reduced = reduce_gamma(&raw_c7());
        let want = ClosedForm::new([
            (Symbol::AbsC, r(6)),
            (Symbol::gamma(1, 3), r(9)),
            (Symbol::Pi, r(6)),
            (Symbol::Two, r(-20)),
            (Symbol::Three, r(-3)),
        ]);
        assert_eq!(reduced, want);
        assert_eq!(
            reduced.to_string(),
            "C^6 · Γ(1/3)^9 · π^6 = 2^20 · 3^3 = 28311552"
        );
    }

    #[test]
    fn no_gamma_unchanged() {
        let f = ClosedForm::from_relation(
            &[Symbol::AbsC, Symbol::Pi, Symbol::Two, Symbol::Three],
            &[2, 3, -1, -1],
        );
        assert_eq!(reduce_gamma(&f), f);
        assert_eq!(f.to_string(), "C^2 · π^3 = 2 · 3 = 6");
    }

    #[test]
    fn reflection_pair() {
        // Γ(1/3)Γ(2/3) = 2π/√3
        let f = ClosedForm::new([(Symbol::gamma(1, 3), r(1)), (Symbol::gamma(2, 3), r(1))]);
        let red = reduce_gamma(&f);
        assert!(red.gamma_symbols().is_empty());
        assert_eq!(red.exponent(Symbol::Pi), r(2));
        assert_eq!(red.exponent(Symbol::Two), r(2));
        assert_eq!(red.exponent(Symbol::Three), r(-1));
    }

    #[test]
    fn trivial_gammas() {
        let f = ClosedForm::new([
            (Symbol::AbsC, r(2)),
            (Symbol::gamma(1, 2), r(2)),
            (Symbol::gamma(1, 1), r(5)),
        ]);
        let red = reduce_gamma(&f);
        assert_eq!(
            red,
            ClosedForm::new([(Symbol::AbsC, r(2)), (Symbol::Pi, r(1))])
        );
    }

    #[test]
    fn normalization() {
        let f = ClosedForm::new([
            (Symbol::AbsC, r(-4)),
            (Symbol::Pi, r(-2)),
            (Symbol::Two, Rational64::new(6, 1)),
        ]);
        assert_eq!(
            f.normalized(),
            ClosedForm::new([
                (Symbol::AbsC, r(2)),
                (Symbol::Pi, r(1)),
                (Symbol::Two, r(-3))
            ])
        );
        let half = ClosedForm::new([(Symbol::Pi, Rational64::new(1, 2)), (Symbol::Two, r(-1))]);
        assert_eq!(
            half.normalized(),
            ClosedForm::new([(Symbol::Pi, r(1)), (Symbol::Two, r(-2))])
        );
    }

    #[test]
    fn identity_residual_for_quartic() {
        let ctx = PrecisionContext::new(40).unwrap();
        let c2 = -(BigReal::from_i64(6, ctx) / BigReal::pi(ctx).powi(3)).sqrt();
        let f = ClosedForm::from_relation(
            &[Symbol::AbsC, Symbol::Pi, Symbol::Two, Symbol::Three],
            &[2, 3, -1, -1],
        );
        assert!(verify_identity(&f, &c2, ctx).unwrap().log10_abs() < -37.0);
        let wrong =
            ClosedForm::from_relation(&[Symbol::AbsC, Symbol::Pi, Symbol::Two], &[2, 3, -1]);
        assert!(verify_identity(&wrong, &c2, ctx).unwrap().log10_abs() > -2.0);
        let solved = f.solve_abs_c(ctx).unwrap().unwrap();
        assert!(solved.rel_diff(&c2.abs()).log10_abs() < -38.0);
        assert!(ClosedForm::new([(Symbol::Pi, r(1))])
            .solve_abs_c(ctx)
            .unwrap()
            .is_none());
    }
}
