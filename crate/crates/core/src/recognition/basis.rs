use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use serde::{Serialize, Serializer};

use super::RecognitionError;
use crate::precision::{coprime_residues, log_gamma, totient, BigReal, PrecisionContext};

/// A factor of a monomial identity. In a log basis each symbol contributes
/// `ln(value)`; [`Symbol::E`] contributes `ln e = 1`, the unit entry.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Symbol {
    AbsC,
    Gamma { num: u32, den: u32 },
    Pi,
    Two,
    Three,
    E,
}

impl Symbol {
    /// `Γ(a/n)` in lowest terms.
    pub fn gamma(a: u32, n: u32) -> Self {
        assert!(a > 0 && n > 0, "Gamma symbol needs a positive rational");
        let g = a.gcd(&n);
        Symbol::Gamma {
            num: a / g,
            den: n / g,
        }
    }

    /// Label of the corresponding log-basis entry.
    pub fn log_label(&self) -> String {
        match self {
            Symbol::AbsC => "ln|C|".into(),
            Symbol::Gamma { num, den } => format!("lnΓ({num}/{den})"),
            Symbol::Pi => "lnπ".into(),
            Symbol::Two => "ln2".into(),
            Symbol::Three => "ln3".into(),
            Symbol::E => "1".into(),
        }
    }

    /// `ln(value)` at `ctx`; `c` supplies the multiplier.
    pub fn log_value(
        &self,
        c: &BigReal,
        ctx: PrecisionContext,
    ) -> Result<BigReal, RecognitionError> {
        Ok(match self {
            Symbol::AbsC => {
                if c.is_zero() {
                    return Err(RecognitionError::ZeroValue(0));
                }
                c.with_context(ctx).abs().ln()
            }
            Symbol::Gamma { num, den } => {
                log_gamma(&BigReal::from_ratio(*num as i64, *den as i64, ctx), ctx)?
            }
            Symbol::Pi => BigReal::pi(ctx).ln(),
            Symbol::Two => BigReal::from_i64(2, ctx).ln(),
            Symbol::Three => BigReal::from_i64(3, ctx).ln(),
            Symbol::E => BigReal::one(ctx),
        })
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Symbol::AbsC => f.write_str("C"),
            Symbol::Gamma { num, den } => write!(f, "Γ({num}/{den})"),
            Symbol::Pi => f.write_str("π"),
            Symbol::Two => f.write_str("2"),
            Symbol::Three => f.write_str("3"),
            Symbol::E => f.write_str("e"),
        }
    }
}

impl FromStr for Symbol {
    type Err = RecognitionError;

    /// Accepts `C`, `pi`/`π`, `2`, `3`, `1`/`e`, and `G(a/n)`, `gamma(a/n)`
    /// or `Γ(a/n)`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        let bad = || RecognitionError::UnknownSymbol(s.to_string());
        Ok(match t.to_ascii_lowercase().as_str() {
            "c" | "|c|" => Symbol::AbsC,
            "pi" | "π" => Symbol::Pi,
            "2" => Symbol::Two,
            "3" => Symbol::Three,
            "1" | "e" => Symbol::E,
            _ => {
                let inner = ["gamma(", "g(", "γ("]
                    .iter()
                    .find_map(|p| t.to_lowercase().strip_prefix(p).map(str::to_string))
                    .and_then(|r| r.strip_suffix(')').map(str::to_string))
                    .ok_or_else(bad)?;
                let (a, n) = inner.split_once('/').ok_or_else(bad)?;
                let a: u32 = a.trim().parse().map_err(|_| bad())?;
                let n: u32 = n.trim().parse().map_err(|_| bad())?;
                if a == 0 || n == 0 {
                    return Err(bad());
                }
                Symbol::gamma(a, n)
            }
        })
    }
}

impl Serialize for Symbol {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Labeled logarithms fed to PSLQ, all at one precision.
#[derive(Clone, Debug)]
pub struct LogBasis {
    entries: Vec<(Symbol, BigReal)>,
    ctx: PrecisionContext,
}

impl LogBasis {
    /// Evaluates `symbols` at `ctx`. Entries that are exactly zero are
    /// rejected rather than silently dropped.
    pub fn from_symbols(
        symbols: &[Symbol],
        c: &BigReal,
        ctx: PrecisionContext,
    ) -> Result<Self, RecognitionError> {
        let entries = symbols
            .iter()
            .enumerate()
            .map(|(i, s)| {
                let v = s.log_value(c, ctx)?;
                if v.is_zero() {
                    Err(RecognitionError::ZeroValue(i))
                } else {
                    Ok((*s, v))
                }
            })
            .collect::<Result<_, _>>()?;
        Ok(Self { entries, ctx })
    }

    pub fn symbols(&self) -> Vec<Symbol> {
        self.entries.iter().map(|(s, _)| *s).collect()
    }

    pub fn labels(&self) -> Vec<String> {
        self.entries.iter().map(|(s, _)| s.log_label()).collect()
    }

    pub fn values(&self) -> Vec<BigReal> {
        self.entries.iter().map(|(_, v)| v.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn ctx(&self) -> PrecisionContext {
        self.ctx
    }
}

/// Whether the basis for degree `M` carries the unit entry by default.
/// It is left out for `M = 4`, whose exclusion search uses the five
/// transcendental entries only.
pub fn unit_entry_default(m: u32) -> bool {
    m != 4
}

/// `Γ(a/(M-1))` for the first `⌈φ(M-1)/2⌉` residues coprime to `M-1`, after
/// dropping `Γ(1) = 1` and `Γ(1/2) = √π` (already spanned by `ln π`).
pub fn gamma_symbols(m: u32) -> Vec<Symbol> {
    let n = m - 1;
    let count = totient(n as u64).div_ceil(2) as usize;
    let residues = if n == 1 {
        vec![1]
    } else {
        coprime_residues(n as u64)
    };
    residues
        .into_iter()
        .take(count)
        .map(|a| Symbol::gamma(a as u32, n))
        .filter(|s| *s != Symbol::gamma(1, 1) && *s != Symbol::gamma(1, 2))
        .collect()
}

/// `(C, Γ…, π, 2, 3[, e])` for degree `M`.
pub fn default_symbols(m: u32, include_unit: bool) -> Vec<Symbol> {
    let mut out = vec![Symbol::AbsC];
    out.extend(gamma_symbols(m));
    out.extend([Symbol::Pi, Symbol::Two, Symbol::Three]);
    if include_unit {
        out.push(Symbol::E);
    }
    out
}

/// The standard basis for degree `M` with the default unit-entry choice.
pub fn build_basis(
    m: u32,
    c: &BigReal,
    ctx: PrecisionContext,
) -> Result<LogBasis, RecognitionError> {
    LogBasis::from_symbols(&default_symbols(m, unit_entry_default(m)), c, ctx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_sizes_per_degree() {
        let sizes: Vec<usize> = (2..=11)
            .map(|m| default_symbols(m, unit_entry_default(m)).len())
            .collect();
        assert_eq!(sizes, vec![5, 5, 5, 6, 7, 6, 8, 7, 8, 7]);
    }

    #[test]
    fn gamma_entries() {
        assert!(gamma_symbols(2).is_empty());
        assert!(gamma_symbols(3).is_empty());
        assert_eq!(gamma_symbols(5), vec![Symbol::gamma(1, 4)]);
        assert_eq!(
            gamma_symbols(11),
            vec![Symbol::gamma(1, 10), Symbol::gamma(3, 10)]
        );
        let labels: Vec<String> = default_symbols(5, true)
            .iter()
            .map(Symbol::log_label)
            .collect();
        assert_eq!(labels, ["ln|C|", "lnΓ(1/4)", "lnπ", "ln2", "ln3", "1"]);
    }

    #[test]
    fn symbol_parsing() {
        assert_eq!("G(2/4)".parse::<Symbol>().unwrap(), Symbol::gamma(1, 2));
        assert_eq!("gamma(1/3)".parse::<Symbol>().unwrap(), Symbol::gamma(1, 3));
        assert_eq!("Γ(1/6)".parse::<Symbol>().unwrap(), Symbol::gamma(1, 6));
        assert_eq!("pi".parse::<Symbol>().unwrap(), Symbol::Pi);
        assert_eq!("1".parse::<Symbol>().unwrap(), Symbol::E);
        assert!("G(0/3)".parse::<Symbol>().is_err());
        assert!("zeta(3)".parse::<Symbol>().is_err());
    }

    #[test]
    fn evaluated_basis() {
        let ctx = PrecisionContext::new(30).unwrap();
        let c = BigReal::from_ratio(-3, 7, ctx);
        let b = build_basis(5, &c, ctx).unwrap();
        assert_eq!(b.len(), 6);
        assert_eq!(b.values()[0], BigReal::from_ratio(3, 7, ctx).ln());
        assert!(LogBasis::from_symbols(&[Symbol::AbsC], &BigReal::one(ctx), ctx).is_err());
    }
}
