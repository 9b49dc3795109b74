use num_rational::Rational64;
use serde::Serialize;

use super::PipelineError;
use crate::asymptotics::instanton_action_exact;
use crate::precision::{gamma, BigReal, PrecisionContext};
use crate::recognition::{verify_identity, ClosedForm, Symbol};
use crate::rs::{compute_series, rational_oracle_series, OscillatorSpec};

/// Published `A_M`, 25 significant digits.
pub const ACTION_REFERENCE: [(u32, &str); 10] = [
    (2, "0.3333333333333333333333333"),
    (3, "0.3084251375340424568385778"),
    (4, "0.2977398851423706587732447"),
    (5, "0.2917788890883238461312676"),
    (6, "0.2879724878472640917187288"),
    (7, "0.2853303025393469272083473"),
    (8, "0.2833887041043899219979632"),
    (9, "0.2819015212115488616285270"),
    (10, "0.2807258717535532885346806"),
    (11, "0.2797731136891152693101861"),
];

/// Published `|C_M|` for the degrees with a closed form, 20 significant digits.
pub const MULTIPLIER_REFERENCE: [(u32, &str); 4] = [
    (2, "0.43989681358154543367"),
    (3, "0.57315916825075626287"),
    (5, "0.91376011702492846899"),
    (7, "1.26735986467847453438"),
];

#[derive(Clone, Debug, Serialize)]
pub struct ActionCheck {
    #[serde(rename = "M")]
    pub m: u32,
    pub computed: String,
    pub reference: String,
    pub rel_error: String,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct FirstOrderCheck {
    #[serde(rename = "M")]
    pub m: u32,
    pub exact: String,
    /// Agreement to every requested digit; the ladder factors are irrational.
    pub float_matches: bool,
    /// Bit-exact equality of rationals.
    pub rational_matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct IdentityCheck {
    #[serde(rename = "M")]
    pub m: u32,
    pub identity: String,
    pub value: String,
    pub residual: String,
    /// Digits shared with the published `|C_M|`.
    pub reference_digits: usize,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub dps: u32,
    pub actions: Vec<ActionCheck>,
    pub first_order: Vec<FirstOrderCheck>,
    pub identities: Vec<IdentityCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.actions.iter().all(|c| c.pass)
            && self
                .first_order
                .iter()
                .all(|c| c.float_matches && c.rational_matches)
            && self.identities.iter().all(|c| c.pass)
    }

    pub fn to_text(&self) -> String {
        let ok = |b: bool| if b { "ok" } else { "FAIL" };
        let mut out = format!("verification at {} digits\n\ninstanton action\n", self.dps);
        for c in &self.actions {
            out.push_str(&format!(
                "  M={:<2} {}  rel. error {}  {}\n",
                c.m,
                c.computed,
                c.rel_error,
                ok(c.pass)
            ));
        }
        out.push_str("\nfirst-order coefficient a_1 = (2M-1)!!/2^M\n");
        for c in &self.first_order {
            out.push_str(&format!(
                "  M={:<2} {:<14} float {}  rational {}\n",
                c.m,
                c.exact,
                ok(c.float_matches),
                ok(c.rational_matches)
            ));
        }
        out.push_str("\nclosed-form identities\n");
        for c in &self.identities {
            out.push_str(&format!(
                "  M={} {}  |C|={}  residual {}  reference digits {}  {}\n",
                c.m,
                c.identity,
                c.value,
                c.residual,
                c.reference_digits,
                ok(c.pass)
            ));
        }
        out
    }
}

fn form(pairs: &[(Symbol, i64)]) -> ClosedForm {
    ClosedForm::new(pairs.iter().map(|&(s, e)| (s, Rational64::from_integer(e))))
}

/// `|C_M|` from its explicit expression, independent of the identity form.
fn explicit_multiplier(m: u32, ctx: PrecisionContext) -> Result<BigReal, PipelineError> {
    let pi = BigReal::pi(ctx);
    let r = |a, b| BigReal::from_ratio(a, b, ctx);
    Ok(match m {
        2 => (BigReal::from_i64(6, ctx) / pi.powi(3)).sqrt(),
        3 => &BigReal::from_i64(32, ctx).sqrt() / &pi.powi(2),
        5 => {
            let g = gamma(&r(1, 4), ctx)?;
            &BigReal::from_i64(192, ctx).sqrt() / &(&g * &pi.pow(&r(5, 4)))
        }
        7 => {
            let g = gamma(&r(1, 3), ctx)?;
            let num = &BigReal::from_i64(2, ctx).pow(&r(10, 3)) * &BigReal::from_i64(3, ctx).sqrt();
            &num / &(&g.pow(&r(3, 2)) * &pi)
        }
        _ => unreachable!("no closed form for M={m}"),
    })
}

/// Checks the instanton-action table, the first-order coefficient in both
/// float and exact arithmetic, and the four closed-form identities.
pub fn verify_reference(dps: u32) -> Result<VerifyReport, PipelineError> {
    let ctx = PrecisionContext::new(dps)?;
    let actions = ACTION_REFERENCE
        .iter()
        .map(|&(m, reference)| {
            let computed = instanton_action_exact(m, ctx);
            let want = BigReal::parse(reference, ctx)?;
            let err = computed.rel_diff(&want);
            Ok(ActionCheck {
                m,
                computed: computed.to_decimal_string(30.min(dps as usize)),
                reference: reference.into(),
                rel_error: err.to_sci_string(3),
                pass: err.is_zero() || err.log10_abs() <= -24.0,
            })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;

    let first_order = (2..=11)
        .map(|m| {
            let spec = OscillatorSpec::new(m)?;
            let exact = spec.first_order_exact();
            let float = compute_series(spec, 1, ctx);
            let rational = rational_oracle_series(spec, 1);
            Ok(FirstOrderCheck {
                m,
                exact: exact.to_string(),
                float_matches: float.get(1).is_some_and(|a| {
                    let d = a.rel_diff(&BigReal::from_rational(&exact, ctx));
                    d.is_zero() || d.log10_abs() <= -(dps as f64)
                }),
                rational_matches: rational.get(1) == Some(&exact),
            })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;

    let (c, g4, g3, pi, two, three) = (
        Symbol::AbsC,
        Symbol::gamma(1, 4),
        Symbol::gamma(1, 3),
        Symbol::Pi,
        Symbol::Two,
        Symbol::Three,
    );
    let forms = [
        (2, form(&[(c, 2), (pi, 3), (two, -1), (three, -1)])),
        (3, form(&[(c, 2), (pi, 4), (two, -5)])),
        (
            5,
            form(&[(c, 4), (g4, 4), (pi, 5), (two, -12), (three, -2)]),
        ),
        (
            7,
            form(&[(c, 6), (g3, 9), (pi, 6), (two, -20), (three, -3)]),
        ),
    ];
    let identities = forms
        .iter()
        .zip(MULTIPLIER_REFERENCE)
        .map(|((m, f), (_, reference))| {
            let value = explicit_multiplier(*m, ctx)?;
            let residual = verify_identity(f, &value, ctx)?;
            let digits = value.agreement_digits(&BigReal::parse(reference, ctx)?, 20);
            Ok(IdentityCheck {
                m: *m,
                identity: f.to_string(),
                value: value.to_decimal_string(25.min(dps as usize)),
                residual: if residual.is_zero() {
                    "0".into()
                } else {
                    residual.to_sci_string(3)
                },
                reference_digits: digits,
                pass: (residual.is_zero() || residual.log10_abs() <= -20.0) && digits >= 19,
            })
        })
        .collect::<Result<Vec<_>, PipelineError>>()?;

    Ok(VerifyReport {
        dps,
        actions,
        first_order,
        identities,
    })
}
