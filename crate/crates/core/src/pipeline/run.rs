use std::ops::ControlFlow;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::OnceLock;

use super::report::{
    DegreeRecord, DegreeResult, DegreeStatus, Estimate, PipelineReport, RecognitionRecord,
    StokesRecord,
};
use super::{PipelineError, ResolvedParams, RunConfig};
use crate::asymptotics::{extract, extract_c1};
use crate::precision::{is_prime, totient, PrecisionContext};
use crate::recognition::{search_closed_form, verify_identity, SearchOutcome};
use crate::rs::{compute_series_with, Checkpointing, OscillatorSpec};

/// Progress notifications; may arrive from several worker threads.
#[derive(Clone, Debug)]
pub enum Event {
    Started { m: u32 },
    Order { m: u32, order: usize, target: usize },
    Stage { m: u32, stage: &'static str },
    Finished { m: u32, ok: bool },
}

pub fn run_pipeline(config: &RunConfig) -> Result<PipelineReport, PipelineError> {
    run_pipeline_with(config, &|_| {})
}

/// Runs every degree of `config`, up to `parallelism` at a time, and writes
/// the reports into `out_dir`. Coefficient caches live in `out_dir/cache`,
/// so a repeated or interrupted run replays finished work.
///
/// Only configuration and report-writing problems are errors; a failing
/// degree is recorded in its report entry and the others carry on.
pub fn run_pipeline_with(
    config: &RunConfig,
    observer: &(dyn Fn(&Event) + Sync),
) -> Result<PipelineReport, PipelineError> {
    let mut m_range = config.m_range.clone();
    m_range.sort_unstable();
    m_range.dedup();
    let config = RunConfig {
        m_range,
        ..config.clone()
    };
    let resolved = config.resolve()?;
    let cache_dir = config.out_dir.join("cache");
    let slots: Vec<OnceLock<DegreeRecord>> = resolved.iter().map(|_| OnceLock::new()).collect();
    let next = AtomicUsize::new(0);
    let workers = config.parallelism.clamp(1, resolved.len().max(1));
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(p) = resolved.get(i) else { break };
                observer(&Event::Started { m: p.m });
                let status =
                    match catch_unwind(AssertUnwindSafe(|| run_degree(p, &cache_dir, observer))) {
                        Ok(Ok(r)) => DegreeStatus::Ok(Box::new(r)),
                        Ok(Err(e)) => DegreeStatus::Failed {
                            error: e.to_string(),
                        },
                        Err(panic) => DegreeStatus::Failed {
                            error: panic
                                .downcast_ref::<String>()
                                .cloned()
                                .or_else(|| panic.downcast_ref::<&str>().map(|s| s.to_string()))
                                .unwrap_or_else(|| "worker panicked".into()),
                        },
                    };
                observer(&Event::Finished {
                    m: p.m,
                    ok: matches!(status, DegreeStatus::Ok(_)),
                });
                let n = p.m as u64 - 1;
                let _ = slots[i].set(DegreeRecord {
                    m: p.m,
                    phi_half: totient(n) / 2,
                    m_prime: is_prime(p.m as u64),
                    params: p.clone(),
                    status,
                });
            });
        }
    });
    let report = PipelineReport {
        desk_scale: config.desk_scale,
        m_range: config.m_range.clone(),
        degrees: slots
            .into_iter()
            .map(|s| s.into_inner().expect("every degree was scheduled"))
            .collect(),
    };
    report.write(&config.out_dir)?;
    Ok(report)
}

/// Series, extraction and recognition for one degree.
pub fn run_degree(
    p: &ResolvedParams,
    cache_dir: &Path,
    observer: &(dyn Fn(&Event) + Sync),
) -> Result<DegreeResult, PipelineError> {
    let m = p.m;
    let dps = p.params.dps;
    let ctx = PrecisionContext::new(dps)?;
    let spec = OscillatorSpec::new(m)?;
    let checkpoint = Checkpointing::new(cache_dir);
    let run = compute_series_with(
        spec,
        p.params.max_order,
        ctx,
        Some(&checkpoint),
        &mut |pr| {
            if pr.order % 25 == 0 || pr.order == pr.target {
                observer(&Event::Order {
                    m,
                    order: pr.order,
                    target: pr.target,
                });
            }
            ControlFlow::Continue(())
        },
    )?;
    let series = run.series;

    observer(&Event::Stage {
        m,
        stage: "extract",
    });
    let ext = extract(&series, &p.windows)?;
    let shown = dps as usize;
    let stokes = Estimate::from_result(&ext.stokes, shown);
    let abs = stokes.value.trim_start_matches('-').to_string();
    let c_digits = ext.stokes.reliable_digits;

    observer(&Event::Stage {
        m,
        stage: "recognize",
    });
    let (recognition, closed_form, identity_residual, c1) = if c_digits < 15 {
        (
            RecognitionRecord::Skipped {
                reason: format!("{c_digits} reliable digits, at least 15 needed"),
            },
            None,
            None,
            None,
        )
    } else {
        let search = search_closed_form(m, &ext.stokes.limit, c_digits, &p.symbols, &p.schedule)?;
        let mut verified = None;
        if let SearchOutcome::Found { reduced, .. } = &search.outcome {
            let top = p.schedule.dps_levels.iter().copied().max().unwrap_or(30);
            let d = (c_digits as u32).min(top);
            let vctx = PrecisionContext::with_guard(d, 0)?;
            let residual = verify_identity(reduced, &ext.stokes.limit, vctx)?;
            if residual.is_zero() || residual.log10_abs() <= -(d as f64 - 5.0) {
                let c_abs = reduced.solve_abs_c(ctx)?.expect("relation involves C");
                let c_exact = if ext.stokes.limit.is_negative() {
                    -c_abs
                } else {
                    c_abs
                };
                let c1 = extract_c1(&series, &c_exact, &p.windows)?;
                verified = Some((
                    reduced.to_string(),
                    residual.to_sci_string(3),
                    Estimate::from_result(&c1, shown),
                ));
            }
        }
        match verified {
            Some((f, r, c1)) => (
                RecognitionRecord::Searched(search),
                Some(f),
                Some(r),
                Some(c1),
            ),
            None => (RecognitionRecord::Searched(search), None, None, None),
        }
    };

    Ok(DegreeResult {
        orders: series.order(),
        dps,
        sign_violations: series.sign_violations(),
        action_exact: ext.a_exact.to_decimal_string(25.min(shown)),
        action: Estimate::from_result(&ext.action, shown),
        action_rel_error: ext.action_error().to_sci_string(3),
        shift: Estimate::from_result(&ext.shift, shown),
        stokes: StokesRecord {
            signed: stokes.value.clone(),
            abs,
            estimate: stokes,
        },
        recognition,
        closed_form,
        identity_residual,
        c1,
    })
}
