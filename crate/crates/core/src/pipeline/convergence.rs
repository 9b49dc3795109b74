use std::path::Path;

use super::PipelineError;
use crate::asymptotics::{richardson, AsymptoticsError, Sequence};
use crate::precision::PrecisionContext;

/// `N_max/5, 2·N_max/5, …, N_max`.
pub fn default_sweep(n_max: usize) -> Vec<usize> {
    let mut out: Vec<usize> = (1..=5).map(|i| (i * n_max / 5).max(1)).collect();
    out.dedup();
    out
}

/// Two comma-separated blocks separated by a blank line: the raw sequence
/// (`k,C_k`) and its Richardson extrapolations from `k0` (`N,k0,R_N`).
pub fn convergence_csv(
    stokes: &Sequence,
    k0: usize,
    ns: &[usize],
    digits: usize,
    ctx: PrecisionContext,
) -> Result<String, AsymptoticsError> {
    if ns.is_empty() {
        return Err(AsymptoticsError::Malformed(
            "no Richardson orders requested".into(),
        ));
    }
    let extrapolated = ns
        .iter()
        .map(|&n| richardson(stokes, k0, n, ctx).map(|r| (n, r)))
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = String::from("k,C_k\n");
    for (k, v) in stokes.iter() {
        out.push_str(&format!("{k},{}\n", v.to_sci_string(digits)));
    }
    out.push_str("\nN,k0,R_N\n");
    for (n, r) in extrapolated {
        out.push_str(&format!("{n},{k0},{}\n", r.to_sci_string(digits)));
    }
    Ok(out)
}

/// Writes [`convergence_csv`] to `path`.
pub fn emit_convergence(
    stokes: &Sequence,
    k0: usize,
    ns: &[usize],
    digits: usize,
    ctx: PrecisionContext,
    path: &Path,
) -> Result<(), PipelineError> {
    let text = convergence_csv(stokes, k0, ns, digits, ctx)?;
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| PipelineError::io(dir, e))?;
    }
    std::fs::write(path, text).map_err(|e| PipelineError::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::precision::BigReal;

    #[test]
    fn sweep() {
        assert_eq!(default_sweep(100), vec![20, 40, 60, 80, 100]);
        assert_eq!(default_sweep(3), vec![1, 2, 3]);
    }

    #[test]
    fn constant_series_gives_constant_column() {
        let ctx = PrecisionContext::new(30).unwrap();
        let c = BigReal::from_ratio(-3, 4, ctx);
        let seq = Sequence::new(1, vec![c; 60]);
        let csv = convergence_csv(&seq, 20, &[5, 10, 20], 12, ctx).unwrap();
        let (raw, ext) = csv.split_once("\n\n").unwrap();
        assert_eq!(raw.lines().count(), 61);
        let rows: Vec<&str> = ext.lines().skip(1).collect();
        assert_eq!(
            rows,
            [
                "5,20,-7.50000000000e-1",
                "10,20,-7.50000000000e-1",
                "20,20,-7.50000000000e-1"
            ]
        );
    }

    #[test]
    fn start_beyond_orders_is_a_range_error() {
        let ctx = PrecisionContext::new(30).unwrap();
        let seq = Sequence::new(1, vec![BigReal::one(ctx); 50]);
        assert!(matches!(
            convergence_csv(&seq, 45, &[10], 10, ctx),
            Err(AsymptoticsError::OutOfRange { .. })
        ));
        assert!(convergence_csv(&seq, 10, &[], 10, ctx).is_err());
    }
}
