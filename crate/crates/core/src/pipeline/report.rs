use std::path::{Path, PathBuf};

use serde::Serialize;

use super::{PipelineError, ResolvedParams};
use crate::asymptotics::ExtrapolationResult;
use crate::recognition::{SearchOutcome, SearchReport};

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WindowRecord {
    pub k0: usize,
    pub n: usize,
    pub estimate: String,
}

/// An extrapolated value with its window evidence, all as decimal strings.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub value: String,
    pub reliable_digits: usize,
    /// `max |estimate - limit|` over the windows; meaningful when the
    /// limit is near zero and relative agreement is not.
    pub spread: String,
    pub loss_digits: String,
    pub windows: Vec<WindowRecord>,
}

impl Estimate {
    /// The limit to its reliable digits (10 digits if none agree); window
    /// estimates with five more.
    pub fn from_result(r: &ExtrapolationResult, dps: usize) -> Self {
        let shown = if r.reliable_digits == 0 {
            10.min(dps)
        } else {
            r.reliable_digits
        };
        let detail = (r.reliable_digits + 5).clamp(10, dps.max(10)).min(dps);
        let pivot = r
            .windows
            .iter()
            .max_by_key(|w| w.k0 * w.n)
            .map(|w| &w.estimate)
            .unwrap_or(&r.limit);
        let spread = r
            .windows
            .iter()
            .map(|w| (&w.estimate - pivot).abs())
            .max_by(|a, b| a.partial_cmp(b).expect("finite"))
            .filter(|d| !d.is_zero())
            .map_or_else(|| "0".to_string(), |d| d.to_sci_string(3));
        Self {
            value: r.limit.to_decimal_string(shown),
            reliable_digits: r.reliable_digits,
            spread,
            loss_digits: format!("{:.1}", r.loss_digits),
            windows: r
                .windows
                .iter()
                .map(|w| WindowRecord {
                    k0: w.k0,
                    n: w.n,
                    estimate: w.estimate.to_decimal_string(detail),
                })
                .collect(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StokesRecord {
    pub signed: String,
    pub abs: String,
    #[serde(flatten)]
    pub estimate: Estimate,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RecognitionRecord {
    Skipped { reason: String },
    Searched(SearchReport),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeResult {
    pub orders: usize,
    pub dps: u32,
    /// Orders whose coefficient breaks the sign pattern `(-1)^{k+1}`.
    pub sign_violations: Vec<usize>,
    pub action_exact: String,
    pub action: Estimate,
    pub action_rel_error: String,
    pub shift: Estimate,
    pub stokes: StokesRecord,
    pub recognition: RecognitionRecord,
    /// Reduced identity, present only when it also passes the numerical check.
    pub closed_form: Option<String>,
    pub identity_residual: Option<String>,
    pub c1: Option<Estimate>,
}

impl DegreeResult {
    /// `Some(true)` for a verified closed form, `Some(false)` for a
    /// completed exclusion, `None` when the search was skipped or inconclusive.
    pub fn has_closed_form(&self) -> Option<bool> {
        if self.closed_form.is_some() {
            return Some(true);
        }
        match &self.recognition {
            RecognitionRecord::Searched(r)
                if matches!(r.outcome, SearchOutcome::Excluded { .. }) =>
            {
                Some(false)
            }
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum DegreeStatus {
    Ok(Box<DegreeResult>),
    Failed { error: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DegreeRecord {
    #[serde(rename = "M")]
    pub m: u32,
    /// `floor(φ(M-1)/2)`.
    pub phi_half: u64,
    pub m_prime: bool,
    pub params: ResolvedParams,
    #[serde(flatten)]
    pub status: DegreeStatus,
}

impl DegreeRecord {
    pub fn result(&self) -> Option<&DegreeResult> {
        match &self.status {
            DegreeStatus::Ok(r) => Some(r),
            DegreeStatus::Failed { .. } => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PipelineReport {
    pub desk_scale: bool,
    #[serde(rename = "M_range")]
    pub m_range: Vec<u32>,
    pub degrees: Vec<DegreeRecord>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ActionRow {
    #[serde(rename = "M")]
    pub m: u32,
    pub exact: String,
    pub extracted: String,
    pub rel_error: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TotientRow {
    #[serde(rename = "M")]
    pub m: u32,
    pub m_minus_1: u32,
    pub phi_half: u64,
    pub closed_form: String,
    pub m_prime: bool,
    pub basis: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StokesRow {
    #[serde(rename = "M")]
    pub m: u32,
    pub signed: String,
    pub abs: String,
    pub digits: usize,
    pub closed_form: String,
}

/// Summary tables over the successful degrees.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Tables {
    pub action: Vec<ActionRow>,
    pub totient: Vec<TotientRow>,
    pub stokes: Vec<StokesRow>,
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "Yes"
    } else {
        "No"
    }
}

/// At most `digits` significant digits of a rendered decimal, truncated.
fn clip(s: &str, digits: usize) -> String {
    let (mantissa, exp) = s.split_once('e').map_or((s, None), |(m, e)| (m, Some(e)));
    let mut seen = 0;
    let mut out = String::new();
    for ch in mantissa.chars() {
        if ch.is_ascii_digit() && (seen > 0 || ch != '0') {
            if seen == digits {
                break;
            }
            seen += 1;
        }
        out.push(ch);
    }
    if let Some(e) = exp {
        out.push('e');
        out.push_str(e);
    }
    out
}

/// Left-aligned columns separated by two spaces.
fn align(rows: &[Vec<String>]) -> String {
    let cols = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..cols)
        .map(|c| {
            rows.iter()
                .filter_map(|r| r.get(c))
                .map(|s| s.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    let mut out = String::new();
    for r in rows {
        let line: Vec<String> = r
            .iter()
            .enumerate()
            .map(|(i, s)| format!("{s}{}", " ".repeat(widths[i] - s.chars().count())))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    out
}

impl Tables {
    pub fn to_text(&self) -> String {
        let mut out = String::from("Instanton action A_M\n");
        let mut rows = vec![vec![
            "M".into(),
            "exact".into(),
            "extracted".into(),
            "rel. error".into(),
        ]];
        rows.extend(self.action.iter().map(|r| {
            vec![
                r.m.to_string(),
                clip(&r.exact, 25),
                clip(&r.extracted, 25),
                r.rel_error.clone(),
            ]
        }));
        out.push_str(&align(&rows));

        out.push_str("\nGamma count and closed forms\n");
        let mut rows = vec![vec![
            "M".into(),
            "M-1".into(),
            "phi(M-1)/2".into(),
            "closed form?".into(),
            "M prime?".into(),
            "basis".into(),
        ]];
        rows.extend(self.totient.iter().map(|r| {
            vec![
                r.m.to_string(),
                r.m_minus_1.to_string(),
                r.phi_half.to_string(),
                r.closed_form.clone(),
                yes_no(r.m_prime).into(),
                r.basis.join(", "),
            ]
        }));
        out.push_str(&align(&rows));

        out.push_str("\nStokes multipliers C_M\n");
        let mut rows = vec![vec![
            "M".into(),
            "C_M".into(),
            "|C_M|".into(),
            "digits".into(),
            "closed form".into(),
        ]];
        rows.extend(self.stokes.iter().map(|r| {
            vec![
                r.m.to_string(),
                clip(&r.signed, 25),
                clip(&r.abs, 25),
                r.digits.to_string(),
                r.closed_form.clone(),
            ]
        }));
        out.push_str(&align(&rows));
        out
    }
}

impl PipelineReport {
    /// Degrees whose per-degree run failed.
    pub fn failed(&self) -> Vec<u32> {
        self.degrees
            .iter()
            .filter(|d| d.result().is_none())
            .map(|d| d.m)
            .collect()
    }

    pub fn tables(&self) -> Tables {
        let ok: Vec<(&DegreeRecord, &DegreeResult)> = self
            .degrees
            .iter()
            .filter_map(|d| d.result().map(|r| (d, r)))
            .collect();
        Tables {
            action: ok
                .iter()
                .map(|(d, r)| ActionRow {
                    m: d.m,
                    exact: r.action_exact.clone(),
                    extracted: r.action.value.clone(),
                    rel_error: r.action_rel_error.clone(),
                })
                .collect(),
            totient: ok
                .iter()
                .map(|(d, r)| TotientRow {
                    m: d.m,
                    m_minus_1: d.m - 1,
                    phi_half: d.phi_half,
                    closed_form: match r.has_closed_form() {
                        Some(b) => yes_no(b).into(),
                        None => "?".into(),
                    },
                    m_prime: d.m_prime,
                    basis: d.params.basis.clone(),
                })
                .collect(),
            stokes: ok
                .iter()
                .map(|(d, r)| StokesRow {
                    m: d.m,
                    signed: r.stokes.signed.clone(),
                    abs: r.stokes.abs.clone(),
                    digits: r.stokes.estimate.reliable_digits,
                    closed_form: r.closed_form.clone().unwrap_or_else(|| "-".into()),
                })
                .collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "desk_scale = {}\nM_range = {:?}\n",
            self.desk_scale, self.m_range
        );
        for d in &self.degrees {
            let p = &d.params;
            out.push_str(&format!(
                "\n== M = {} ==\nparams: max_order={} dps={} richardson_order={} pslq_maxcoeff={}\nwindows: {}\nbasis: {}\nphi(M-1)/2 = {}\n",
                d.m,
                p.params.max_order,
                p.params.dps,
                p.params.richardson_order,
                p.params.pslq_maxcoeff,
                p.windows.iter().map(|w| format!("({}, {})", w.k0, w.n)).collect::<Vec<_>>().join(" "),
                p.basis.join(", "),
                d.phi_half,
            ));
            let r = match &d.status {
                DegreeStatus::Failed { error } => {
                    out.push_str(&format!("FAILED: {error}\n"));
                    continue;
                }
                DegreeStatus::Ok(r) => r,
            };
            out.push_str(&format!(
                "orders: {} at {} digits, sign violations: {}\n",
                r.orders,
                r.dps,
                r.sign_violations.len()
            ));
            out.push_str(&format!(
                "A exact     = {}\nA extracted = {} ({} digits, rel. error {})\n",
                r.action_exact, r.action.value, r.action.reliable_digits, r.action_rel_error
            ));
            out.push_str(&format!(
                "b           = {} ({} digits)\n",
                r.shift.value, r.shift.reliable_digits
            ));
            out.push_str(&format!(
                "C           = {}\n|C|         = {} ({} digits, Richardson loss {} digits)\n",
                r.stokes.signed,
                r.stokes.abs,
                r.stokes.estimate.reliable_digits,
                r.stokes.estimate.loss_digits
            ));
            for w in &r.stokes.estimate.windows {
                out.push_str(&format!("  window k0={} N={}: {}\n", w.k0, w.n, w.estimate));
            }
            match &r.recognition {
                RecognitionRecord::Skipped { reason } => {
                    out.push_str(&format!("recognition skipped: {reason}\n"))
                }
                RecognitionRecord::Searched(s) => {
                    for line in s.to_text().lines().skip(3) {
                        out.push_str(&format!("  {line}\n"));
                    }
                }
            }
            if let (Some(f), Some(res)) = (&r.closed_form, &r.identity_residual) {
                out.push_str(&format!("closed form: {f} (residual {res})\n"));
            }
            if let Some(c1) = &r.c1 {
                out.push_str(&format!(
                    "c1          = {} ({} digits, window spread {})\n",
                    c1.value, c1.reliable_digits, c1.spread
                ));
            }
        }
        out
    }

    /// Writes `report.json` and `report.txt`, plus `tables.json` and
    /// `tables.txt` when any degree succeeded. Returns the written paths.
    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, PipelineError> {
        std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
        let mut files = vec![
            ("report.json", self.to_json()),
            ("report.txt", self.to_text()),
        ];
        let tables = self.tables();
        if !tables.action.is_empty() {
            files.push((
                "tables.json",
                serde_json::to_string_pretty(&tables).expect("tables serialize") + "\n",
            ));
            files.push(("tables.txt", tables.to_text()));
        }
        let mut written = Vec::new();
        for (name, text) in files {
            let path = dir.join(name);
            std::fs::write(&path, text).map_err(|e| PipelineError::io(&path, e))?;
            written.push(path);
        }
        Ok(written)
    }
}
