use serde::{Deserialize, Serialize};

use super::{richardson, richardson_loss_digits, AsymptoticsError, Sequence};
use crate::precision::{BigReal, PrecisionContext};

#[derive(Clone, Debug)]
pub struct WindowEstimate {
    pub k0: usize,
    pub n: usize,
    pub estimate: BigReal,
}

#[derive(Clone, Debug)]
pub struct ExtrapolationResult {
    /// Estimate of the preferred window, truncated to `reliable_digits`.
    pub limit: BigReal,
    pub windows: Vec<WindowEstimate>,
    /// Leading significant digits on which every window estimate agrees,
    /// capped at the input precision left after the Richardson loss.
    pub reliable_digits: usize,
    /// Worst-case digits cancelled by the Richardson weights over all windows.
    pub loss_digits: f64,
}

/// A `(k₀, N)` pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Window {
    pub k0: usize,
    pub n: usize,
}

impl Window {
    pub fn new(k0: usize, n: usize) -> Self {
        Self { k0, n }
    }
}

/// `(K/2, N)`, `(3K/5, N)`, `(7K/10 - N, N)`, keeping only windows that fit
/// inside `min_k ..= K` and dropping duplicates.
pub fn default_windows(k_max: usize, n: usize, min_k: usize) -> Vec<Window> {
    let candidates = [k_max / 2, 3 * k_max / 5, (7 * k_max / 10).saturating_sub(n)];
    let mut out: Vec<Window> = Vec::new();
    for k0 in candidates {
        let w = Window::new(k0, n);
        if k0 >= min_k && k0 + n <= k_max && !out.contains(&w) {
            out.push(w);
        }
    }
    out
}

/// Extrapolates every window and measures how many leading digits they share.
///
/// The central value comes from the window with the largest `k₀·N` (the
/// first such window on ties), since it sits deepest in the asymptotic regime.
pub fn assess_stability(
    seq: &Sequence,
    windows: &[Window],
    ctx: PrecisionContext,
) -> Result<ExtrapolationResult, AsymptoticsError> {
    if windows.len() < 2 {
        return Err(AsymptoticsError::TooFewWindows(windows.len()));
    }
    let estimates = windows
        .iter()
        .map(|w| {
            Ok(WindowEstimate {
                k0: w.k0,
                n: w.n,
                estimate: richardson(seq, w.k0, w.n, ctx)?,
            })
        })
        .collect::<Result<Vec<_>, AsymptoticsError>>()?;
    let best = estimates.iter().enumerate().fold(0, |b, (i, e)| {
        if e.k0 * e.n > estimates[b].k0 * estimates[b].n {
            i
        } else {
            b
        }
    });
    let dps = ctx.dps() as usize;
    let pivot = &estimates[best].estimate;
    let loss = windows
        .iter()
        .map(|w| richardson_loss_digits(w.k0, w.n))
        .fold(0.0, f64::max);
    // Agreement beyond what the inputs can carry through the weights is
    // shared rounding noise, not signal.
    let input_digits = seq
        .values()
        .first()
        .map_or(dps as f64, |v| v.ctx().effective_digits() as f64);
    let floor = (input_digits - loss - 2.0).max(0.0) as usize;
    let reliable = estimates
        .iter()
        .map(|e| pivot.agreement_digits(&e.estimate, dps))
        .min()
        .unwrap_or(0)
        .min(floor);
    let limit = if reliable == 0 {
        pivot.clone()
    } else {
        pivot.truncate_digits(reliable)
    };
    Ok(ExtrapolationResult {
        limit,
        windows: estimates,
        reliable_digits: reliable,
        loss_digits: loss,
    })
}
