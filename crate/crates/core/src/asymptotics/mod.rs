//! Large-order parameters of the coefficient series: exact instanton
//! actions, ratio-based extraction sequences, Richardson extrapolation and
//! multi-window reliability assessment.

mod action;
mod extract;
mod richardson;
mod sequences;
mod stability;
pub mod synthetic;

use thiserror::Error;

pub use action::{classical_action_prefactor, instanton_action_exact};
pub use extract::{extract, extract_c1, Extraction, LargeOrderParams};
pub use richardson::{richardson, richardson_loss_digits, richardson_weights};
pub use sequences::{action_sequence, c1_sequence, shift_sequence, stokes_sequence, Sequence};
pub use stability::{
    assess_stability, default_windows, ExtrapolationResult, Window, WindowEstimate,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AsymptoticsError {
    #[error("series needs at least {needed} orders, has {have}")]
    TooShort { needed: usize, have: usize },
    #[error("window k0={k0}, N={n} needs indices outside the sequence ({first}..={last:?})")]
    OutOfRange {
        k0: usize,
        n: usize,
        first: usize,
        last: Option<usize>,
    },
    #[error("malformed series: {0}")]
    Malformed(String),
    #[error("stability assessment needs at least two windows, got {0}")]
    TooFewWindows(usize),
}
