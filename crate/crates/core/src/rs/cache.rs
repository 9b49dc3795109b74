//! Line-oriented coefficient cache, one record per order:
//!
//! ```text
//! schema=1 M=2 k=3 dps=150 guard=30 value=3.0937500000…e1
//! ```
//!
//! Values are written with enough digits to reload bit-identically.

use std::io::Write;
use std::path::{Path, PathBuf};

use super::{RsError, SeriesCoefficients};
use crate::precision::{BigReal, PrecisionContext};

const SCHEMA: u32 = 1;

pub fn cache_path(dir: &Path, m: u32, dps: u32) -> PathBuf {
    dir.join(format!("coeffs_M{m}_dps{dps}_v{SCHEMA}.txt"))
}

/// Replaces the cache file atomically.
pub fn write_cache(path: &Path, series: &SeriesCoefficients) -> Result<(), RsError> {
    let mut text = String::new();
    for (k, a) in series.coefficients().iter().enumerate() {
        text.push_str(&format!(
            "schema={SCHEMA} M={} k={k} dps={} guard={} value={}\n",
            series.m(),
            series.dps_used(),
            series.guard_used(),
            a.to_round_trip_string()
        ));
    }
    let tmp = path.with_extension("txt.tmp");
    let mut f = std::fs::File::create(&tmp).map_err(|e| RsError::io(&tmp, e))?;
    f.write_all(text.as_bytes())
        .and_then(|_| f.sync_data())
        .map_err(|e| RsError::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| RsError::io(path, e))
}

/// Reads and validates a cache written under the same `M` and context.
pub fn read_cache(
    path: &Path,
    m: u32,
    ctx: PrecisionContext,
) -> Result<SeriesCoefficients, RsError> {
    let text = std::fs::read_to_string(path).map_err(|e| RsError::io(path, e))?;
    let bad = |line: usize, reason: String| RsError::Cache {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut values = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let fields: Vec<(&str, &str)> = line
            .split_whitespace()
            .map(|f| {
                f.split_once('=')
                    .ok_or_else(|| bad(lineno, format!("malformed field {f:?}")))
            })
            .collect::<Result<_, _>>()?;
        let keys: Vec<&str> = fields.iter().map(|(k, _)| *k).collect();
        if keys != ["schema", "M", "k", "dps", "guard", "value"] {
            return Err(bad(lineno, format!("unexpected fields {keys:?}")));
        }
        let num = |idx: usize| -> Result<u64, RsError> {
            fields[idx]
                .1
                .parse()
                .map_err(|_| bad(lineno, format!("{} is not an integer", fields[idx].0)))
        };
        let expect = [
            (0, SCHEMA as u64, "schema version"),
            (1, m as u64, "M"),
            (2, values.len() as u64, "order"),
            (3, ctx.dps() as u64, "dps"),
            (4, ctx.guard() as u64, "guard"),
        ];
        for (idx, want, what) in expect {
            let got = num(idx)?;
            if got != want {
                return Err(bad(lineno, format!("{what} is {got}, expected {want}")));
            }
        }
        let v = BigReal::parse(fields[5].1, ctx).map_err(|e| bad(lineno, e.to_string()))?;
        values.push(v);
    }
    if values.is_empty() {
        return Err(bad(0, "cache holds no coefficients".into()));
    }
    Ok(SeriesCoefficients::new(m, values, ctx))
}
