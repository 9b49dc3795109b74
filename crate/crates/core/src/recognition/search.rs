use serde::{Deserialize, Serialize};

use super::{
    pslq, reduce_gamma, relation_residual, threshold, ClosedForm, LogBasis, PslqOutcome,
    RecognitionError, Symbol,
};
use crate::precision::{BigReal, PrecisionContext};

/// Grid of `(dps, maxcoeff)` cells, tried in ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchSchedule {
    pub maxcoeffs: Vec<u64>,
    pub dps_levels: Vec<u32>,
}

impl Default for SearchSchedule {
    fn default() -> Self {
        Self {
            maxcoeffs: vec![200, 500, 1000, 2000],
            dps_levels: vec![30, 35, 40],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum CellOutcome {
    Relation {
        coefficients: Vec<i64>,
        residual: String,
        recheck_residual: String,
    },
    NoRelation {
        #[serde(serialize_with = "super::ser_sci")]
        norm_bound: f64,
    },
    Inconclusive {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CellReport {
    pub dps: u32,
    pub maxcoeff: u64,
    /// `10^{dps / basis size}`.
    #[serde(serialize_with = "super::ser_sci")]
    pub detection_limit: f64,
    pub outcome: CellOutcome,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SearchOutcome {
    Found {
        relation: Vec<i64>,
        raw: ClosedForm,
        reduced: ClosedForm,
    },
    /// Every cell ran to its coefficient bound without a relation.
    Excluded {
        maxcoeff: u64,
        dps: u32,
        #[serde(serialize_with = "super::ser_sci")]
        detection_limit: f64,
    },
    /// Some cell ran out of precision before reaching its bound.
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SearchReport {
    pub m: u32,
    pub basis: Vec<String>,
    pub reliable_digits: usize,
    pub maxcoeff_levels: Vec<u64>,
    pub dps_levels: Vec<u32>,
    pub cells: Vec<CellReport>,
    pub outcome: SearchOutcome,
}

impl SearchReport {
    pub fn closed_form(&self) -> Option<&ClosedForm> {
        match &self.outcome {
            SearchOutcome::Found { reduced, .. } => Some(reduced),
            _ => None,
        }
    }

    /// Line-oriented rendering with a fixed field order.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("M = {}\n", self.m));
        out.push_str(&format!("basis = {}\n", self.basis.join(", ")));
        out.push_str(&format!("reliable_digits = {}\n", self.reliable_digits));
        for c in &self.cells {
            let what = match &c.outcome {
                CellOutcome::Relation {
                    coefficients,
                    residual,
                    recheck_residual,
                } => format!(
                    "relation {coefficients:?} residual={residual} recheck={recheck_residual}"
                ),
                CellOutcome::NoRelation { norm_bound } => {
                    format!("none norm_bound={norm_bound:.3e}")
                }
                CellOutcome::Inconclusive { reason } => format!("inconclusive ({reason})"),
            };
            out.push_str(&format!(
                "cell dps={} maxcoeff={} detection_limit={:.3e}: {what}\n",
                c.dps, c.maxcoeff, c.detection_limit
            ));
        }
        let summary = match &self.outcome {
            SearchOutcome::Found { relation, raw, reduced } => {
                format!("found {relation:?}: {raw}; reduced: {reduced}")
            }
            SearchOutcome::Excluded {
                maxcoeff,
                dps,
                detection_limit,
            } => format!(
                "excluded: no relation with max|n| <= {maxcoeff} at {dps} digits (detection limit {detection_limit:.3e})"
            ),
            SearchOutcome::Inconclusive => "inconclusive".into(),
        };
        out.push_str(&format!("outcome = {summary}\n"));
        out
    }
}

fn sci(x: &BigReal) -> String {
    if x.is_zero() {
        "0".into()
    } else {
        x.to_sci_string(3)
    }
}

/// PSLQ over `symbols` for every cell of `schedule`, with the multiplier
/// truncated to `reliable_digits` and each cell's precision capped there.
///
/// A candidate relation is accepted only if it also holds, to the same
/// tolerance, when the basis is recomputed with ten more digits. The first
/// accepted relation ends the search.
pub fn search_closed_form(
    m: u32,
    c: &BigReal,
    reliable_digits: usize,
    symbols: &[Symbol],
    schedule: &SearchSchedule,
) -> Result<SearchReport, RecognitionError> {
    if reliable_digits < 15 {
        return Err(RecognitionError::TooFewDigits(reliable_digits));
    }
    let c = c.truncate_digits(reliable_digits);
    let mut levels: Vec<u32> = schedule
        .dps_levels
        .iter()
        .map(|&d| d.min(reliable_digits as u32))
        .collect();
    levels.sort_unstable();
    levels.dedup();
    let mut coeffs = schedule.maxcoeffs.clone();
    coeffs.sort_unstable();
    coeffs.dedup();

    let c_index = symbols.iter().position(|s| *s == Symbol::AbsC);
    let mut cells = Vec::new();
    let mut found = None;
    'outer: for &dps in &levels {
        let ctx = PrecisionContext::with_guard(dps, 0)?;
        let basis = LogBasis::from_symbols(symbols, &c, ctx)?;
        let values = basis.values();
        let limit = 10f64.powf(dps as f64 / symbols.len() as f64);
        for &maxcoeff in &coeffs {
            let outcome = match pslq(&values, maxcoeff, ctx) {
                Ok(PslqOutcome::Found(rel)) => {
                    let rel = match c_index {
                        Some(i) => rel.oriented(i),
                        None => rel,
                    };
                    let hi = PrecisionContext::with_guard(dps + 10, 0)?;
                    let hi_values = LogBasis::from_symbols(symbols, &c, hi)?.values();
                    let recheck = relation_residual(&hi_values, &rel.coefficients, hi);
                    if recheck < threshold(&hi_values, dps, hi) {
                        found = Some(rel.coefficients.clone());
                        cells.push(CellReport {
                            dps,
                            maxcoeff,
                            detection_limit: limit,
                            outcome: CellOutcome::Relation {
                                coefficients: rel.coefficients,
                                residual: sci(&rel.residual),
                                recheck_residual: sci(&recheck),
                            },
                        });
                        break 'outer;
                    }
                    CellOutcome::Inconclusive {
                        reason: format!(
                            "candidate {:?} failed the higher-precision recheck",
                            rel.coefficients
                        ),
                    }
                }
                Ok(PslqOutcome::NoRelation { norm_bound, .. }) => {
                    CellOutcome::NoRelation { norm_bound }
                }
                Err(RecognitionError::PrecisionExhausted { .. }) => CellOutcome::Inconclusive {
                    reason: "precision exhausted".into(),
                },
                Err(e) => return Err(e),
            };
            cells.push(CellReport {
                dps,
                maxcoeff,
                detection_limit: limit,
                outcome,
            });
        }
    }

    let outcome = if let Some(rel) = found {
        let raw = ClosedForm::from_relation(symbols, &rel);
        let reduced = reduce_gamma(&raw);
        SearchOutcome::Found {
            relation: rel,
            raw,
            reduced,
        }
    } else if cells
        .iter()
        .all(|c| matches!(c.outcome, CellOutcome::NoRelation { .. }))
    {
        let last = cells.last().expect("schedule has at least one cell");
        SearchOutcome::Excluded {
            maxcoeff: last.maxcoeff,
            dps: last.dps,
            detection_limit: last.detection_limit,
        }
    } else {
        SearchOutcome::Inconclusive
    };
    Ok(SearchReport {
        m,
        basis: symbols.iter().map(Symbol::log_label).collect(),
        reliable_digits,
        maxcoeff_levels: coeffs,
        dps_levels: levels,
        cells,
        outcome,
    })
}
