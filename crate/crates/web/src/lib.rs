//! Browser bindings. Every function returns a JSON string; errors come back
//! as `{"error": "..."}` so the page has one code path.

use serde_json::{json, Value};
use stokes_core::asymptotics::{extract, instanton_action_exact};
use stokes_core::pipeline::{desk_windows, schedule_for};
use stokes_core::precision::{BigReal, PrecisionContext};
use stokes_core::recognition::{
    default_symbols, search_closed_form, unit_entry_default, SearchOutcome,
};
use stokes_core::rs::{compute_series, OscillatorSpec};
use wasm_bindgen::prelude::*;

/// Keeps a single call to a few seconds in the browser.
pub const MAX_ORDERS: usize = 300;
pub const MAX_DPS: u32 = 150;

fn render(r: Result<Value, String>) -> String {
    r.unwrap_or_else(|e| json!({ "error": e })).to_string()
}

fn context(dps: u32) -> Result<PrecisionContext, String> {
    if !(15..=MAX_DPS).contains(&dps) {
        return Err(format!("precision must be between 15 and {MAX_DPS} digits"));
    }
    PrecisionContext::new(dps).map_err(|e| e.to_string())
}

fn degree(m: u32) -> Result<OscillatorSpec, String> {
    OscillatorSpec::new(m).map_err(|e| e.to_string())
}

/// Exact instanton action `A_M` to `digits` digits.
#[wasm_bindgen]
pub fn instanton_action(m: u32, digits: u32) -> String {
    render((|| {
        degree(m)?;
        let c = context(digits)?;
        Ok(
            json!({ "M": m, "action": instanton_action_exact(m, c).to_decimal_string(digits as usize) }),
        )
    })())
}

/// Computes `orders` coefficients and extrapolates the multiplier, with the
/// per-window estimates so the page can show convergence.
#[wasm_bindgen]
pub fn stokes_multiplier(m: u32, orders: usize, dps: u32) -> String {
    render((|| {
        let spec = degree(m)?;
        let c = context(dps)?;
        if !(60..=MAX_ORDERS).contains(&orders) {
            return Err(format!("orders must be between 60 and {MAX_ORDERS}"));
        }
        let series = compute_series(spec, orders, c);
        let windows = desk_windows(orders, (orders / 6).max(10));
        let e = extract(&series, &windows).map_err(|e| e.to_string())?;
        let digits = e.stokes.reliable_digits;
        let shown = digits.clamp(10, dps as usize);
        Ok(json!({
            "M": m,
            "orders": orders,
            "C": e.stokes.limit.to_decimal_string(shown),
            "reliable_digits": digits,
            "b": e.shift.limit.to_decimal_string(shown.min(20)),
            "windows": e.stokes.windows.iter().map(|w| json!({
                "k0": w.k0,
                "N": w.n,
                "C": w.estimate.to_decimal_string(shown),
            })).collect::<Vec<_>>(),
        }))
    })())
}

/// Searches for a monomial identity for `value` in the degree-`m` basis.
#[wasm_bindgen]
pub fn identify(value: &str, m: u32, maxcoeff: u32) -> String {
    render((|| {
        degree(m)?;
        let digits = value
            .trim()
            .trim_start_matches(['-', '+'])
            .split(['e', 'E'])
            .next()
            .unwrap_or("")
            .chars()
            .filter(char::is_ascii_digit)
            .skip_while(|&d| d == '0')
            .count();
        let c = context((digits as u32 + 10).clamp(15, MAX_DPS))?;
        let v = BigReal::parse(value.trim(), c).map_err(|e| e.to_string())?;
        let symbols = default_symbols(m, unit_entry_default(m));
        let mut schedule = schedule_for(maxcoeff.max(1) as u64);
        schedule.dps_levels = vec![digits.saturating_sub(5).max(15) as u32];
        let report =
            search_closed_form(m, &v, digits, &symbols, &schedule).map_err(|e| e.to_string())?;
        Ok(match &report.outcome {
            SearchOutcome::Found {
                reduced, relation, ..
            } => json!({
                "found": true,
                "identity": reduced.to_string(),
                "relation": relation,
                "basis": report.basis,
            }),
            SearchOutcome::Excluded { maxcoeff, dps, .. } => json!({
                "found": false,
                "excluded_up_to": maxcoeff,
                "dps": dps,
                "basis": report.basis,
            }),
            SearchOutcome::Inconclusive => {
                json!({ "found": false, "inconclusive": true, "basis": report.basis })
            }
        })
    })())
}
