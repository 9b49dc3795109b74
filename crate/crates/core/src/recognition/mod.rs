//! Integer-relation search over logarithms of Gamma values and elementary
//! constants, closed-form bookkeeping and Gamma-identity reduction.

mod basis;
mod closed_form;
mod pslq;
mod search;

use serde::Serializer;
use thiserror::Error;

use crate::precision::{BigReal, PrecisionError};

pub use basis::{
    build_basis, default_symbols, gamma_symbols, unit_entry_default, LogBasis, Symbol,
};
pub use closed_form::{reduce_gamma, verify_identity, ClosedForm};
pub use pslq::{detection_limit, pslq, relation_residual, threshold, IntegerRelation, PslqOutcome};
pub use search::{
    search_closed_form, CellOutcome, CellReport, SearchOutcome, SearchReport, SearchSchedule,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RecognitionError {
    #[error("PSLQ needs at least two values, got {0}")]
    TooFewValues(usize),
    #[error("value {0} is zero at working precision")]
    ZeroValue(usize),
    #[error("PSLQ needs at least 15 digits, got {0}")]
    PrecisionTooLow(u32),
    #[error("precision exhausted after {iterations} iterations (norm bound {norm_bound:.3e})")]
    PrecisionExhausted { iterations: usize, norm_bound: f64 },
    #[error("unknown basis symbol {0:?}")]
    UnknownSymbol(String),
    #[error("a closed-form search needs at least 15 reliable digits, got {0}")]
    TooFewDigits(usize),
    #[error(transparent)]
    Precision(#[from] PrecisionError),
}

pub(crate) fn ser_sci<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{x:.3e}"))
}

pub(crate) fn ser_real<S: Serializer>(x: &BigReal, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_sci_string(6))
}
