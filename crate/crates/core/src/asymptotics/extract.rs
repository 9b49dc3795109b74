use super::{
    action_sequence, assess_stability, c1_sequence, instanton_action_exact, shift_sequence,
    stokes_sequence, AsymptoticsError, ExtrapolationResult, Window,
};
use crate::precision::BigReal;
use crate::rs::SeriesCoefficients;

/// Leading large-order data for one `M`.
#[derive(Clone, Debug)]
pub struct LargeOrderParams {
    pub m: u32,
    pub a: BigReal,
    pub b: BigReal,
    /// Signed multiplier; negative for every degree studied.
    pub c: BigReal,
    pub c1: Option<BigReal>,
}

/// Extrapolated action, shift and multiplier from one series.
#[derive(Clone, Debug)]
pub struct Extraction {
    pub m: u32,
    pub a_exact: BigReal,
    pub action: ExtrapolationResult,
    pub shift: ExtrapolationResult,
    pub stokes: ExtrapolationResult,
}

impl Extraction {
    pub fn params(&self) -> LargeOrderParams {
        LargeOrderParams {
            m: self.m,
            a: self.action.limit.clone(),
            b: self.shift.limit.clone(),
            c: self.stokes.limit.clone(),
            c1: None,
        }
    }

    /// `|A_extracted / A_exact - 1|`.
    pub fn action_error(&self) -> BigReal {
        self.action.limit.rel_diff(&self.a_exact)
    }
}

/// Runs all three sequences through the same windows. The shift and the
/// multiplier use the exact action, and the multiplier assumes `b = -1/2`.
pub fn extract(
    series: &SeriesCoefficients,
    windows: &[Window],
) -> Result<Extraction, AsymptoticsError> {
    let ctx = series.ctx();
    let a_exact = instanton_action_exact(series.m(), ctx);
    let action = assess_stability(&action_sequence(series)?, windows, ctx)?;
    let shift = assess_stability(&shift_sequence(series, &a_exact)?, windows, ctx)?;
    let stokes = assess_stability(&stokes_sequence(series, &a_exact, ctx)?, windows, ctx)?;
    Ok(Extraction {
        m: series.m(),
        a_exact,
        action,
        shift,
        stokes,
    })
}

/// First subleading correction, given the multiplier in closed form.
pub fn extract_c1(
    series: &SeriesCoefficients,
    c_exact: &BigReal,
    windows: &[Window],
) -> Result<ExtrapolationResult, AsymptoticsError> {
    let ctx = series.ctx();
    let a_exact = instanton_action_exact(series.m(), ctx);
    let stokes = stokes_sequence(series, &a_exact, ctx)?;
    assess_stability(&c1_sequence(&stokes, c_exact), windows, ctx)
}
