use std::ops::ControlFlow;
use std::path::PathBuf;

use super::{cache, journal, OscillatorSpec, RsError, SeriesCoefficients};
use crate::precision::{BigReal, PrecisionContext};

/// `⟨n|ψ^{(k)}⟩` on even levels: `components[i]` is the coefficient of `|2i⟩`.
#[derive(Clone, Debug, PartialEq)]
pub struct WavefunctionState {
    order: usize,
    components: Vec<BigReal>,
}

impl WavefunctionState {
    pub fn ground(ctx: PrecisionContext) -> Self {
        Self {
            order: 0,
            components: vec![BigReal::one(ctx)],
        }
    }

    pub fn new(order: usize, components: Vec<BigReal>) -> Self {
        Self { order, components }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// Even-level coefficients, index `n/2`.
    pub fn even_components(&self) -> &[BigReal] {
        &self.components
    }

    /// Coefficient of `|n⟩`; `None` outside the stored range or at odd `n`.
    pub fn component(&self, n: usize) -> Option<&BigReal> {
        if n % 2 == 1 {
            return None;
        }
        self.components.get(n / 2)
    }

    /// Highest level with storage.
    pub fn max_level(&self) -> usize {
        2 * (self.components.len() - 1)
    }
}

/// `V = x^{2M}` applied as `2M` successive position operators, with a cached
/// table of `√(m/2)`.
pub struct PotentialOperator {
    m: u32,
    ctx: PrecisionContext,
    half_roots: Vec<BigReal>,
}

impl PotentialOperator {
    pub fn new(m: u32, ctx: PrecisionContext) -> Self {
        Self {
            m,
            ctx,
            half_roots: Vec::new(),
        }
    }

    fn ensure(&mut self, top: usize) {
        while self.half_roots.len() <= top {
            let m = self.half_roots.len() as i64;
            self.half_roots
                .push(BigReal::from_ratio(m, 2, self.ctx).sqrt());
        }
    }

    /// `V` applied to an even-parity vector (index `n/2`); the result is
    /// again even, `M` entries longer.
    pub fn apply(&mut self, even: &[BigReal]) -> Vec<BigReal> {
        let mut cur = even.to_vec();
        self.ensure(2 * (even.len() + self.m as usize) + 2);
        let s = &self.half_roots;
        for step in 0..2 * self.m {
            let len = cur.len();
            let next = if step % 2 == 0 {
                // even levels 2i -> odd levels 2j+1
                (0..len)
                    .map(|j| {
                        let low = &s[2 * j + 1] * &cur[j];
                        if j + 1 < len {
                            &low + &(&s[2 * j + 2] * &cur[j + 1])
                        } else {
                            low
                        }
                    })
                    .collect()
            } else {
                // odd levels 2i+1 -> even levels 2j
                (0..=len)
                    .map(|j| {
                        let up = (j < len).then(|| &s[2 * j + 1] * &cur[j]);
                        let down = (j >= 1).then(|| &s[2 * j] * &cur[j - 1]);
                        match (up, down) {
                            (Some(u), Some(d)) => &u + &d,
                            (Some(u), None) => u,
                            (None, Some(d)) => d,
                            (None, None) => unreachable!(),
                        }
                    })
                    .collect()
            };
            cur = next;
        }
        cur
    }
}

/// `V|ψ⟩` for a single state.
pub fn apply_potential(state: &WavefunctionState, m: u32, ctx: PrecisionContext) -> Vec<BigReal> {
    PotentialOperator::new(m, ctx).apply(&state.components)
}

fn check_history(history: &[WavefunctionState], energies: &[BigReal]) -> Result<(), RsError> {
    if history.is_empty() {
        return Err(RsError::Inconsistent("history must contain ψ^(0)".into()));
    }
    if history.len() != energies.len() {
        return Err(RsError::Inconsistent(format!(
            "{} states but {} energies",
            history.len(),
            energies.len()
        )));
    }
    for (j, h) in history.iter().enumerate() {
        if h.order != j {
            return Err(RsError::Inconsistent(format!(
                "position {j} holds order {}",
                h.order
            )));
        }
    }
    Ok(())
}

fn step_with(
    op: &mut PotentialOperator,
    history: &[WavefunctionState],
    energies: &[BigReal],
) -> (BigReal, WavefunctionState) {
    let k = history.len();
    let ctx = op.ctx;
    let v = op.apply(&history[k - 1].components);
    let a_k = v[0].clone();
    let len = op.m as usize * k + 1;
    let mut psi = Vec::with_capacity(len);
    psi.push(BigReal::zero(ctx));
    for (i, vi) in v.iter().enumerate().take(len).skip(1) {
        let mut acc = vi.clone();
        for j in 1..k {
            if let Some(c) = history[k - j].components.get(i) {
                acc = &acc - &(&energies[j] * c);
            }
        }
        psi.push(acc.div_int(-2 * i as i64));
    }
    (a_k, WavefunctionState::new(k, psi))
}

/// One order of the recursion: given `ψ^{(0)} … ψ^{(k-1)}` and
/// `a_0 … a_{k-1}`, returns `a_k` and `ψ^{(k)}`.
pub fn rs_step(
    history: &[WavefunctionState],
    energies: &[BigReal],
    spec: OscillatorSpec,
    ctx: PrecisionContext,
) -> Result<(BigReal, WavefunctionState), RsError> {
    check_history(history, energies)?;
    let mut op = PotentialOperator::new(spec.m(), ctx);
    Ok(step_with(&mut op, history, energies))
}

/// Reported after every computed order.
#[derive(Debug)]
pub struct Progress<'a> {
    pub m: u32,
    pub order: usize,
    pub target: usize,
    pub coefficient: &'a BigReal,
}

/// Where and how often to persist state.
#[derive(Clone, Debug)]
pub struct Checkpointing {
    pub dir: PathBuf,
    pub interval: usize,
}

impl Checkpointing {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self {
            dir: dir.into(),
            interval: 10,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SeriesRun {
    pub series: SeriesCoefficients,
    /// False when the observer stopped the run early.
    pub complete: bool,
    /// Orders restored from disk rather than computed.
    pub restored: usize,
}

/// `a_0 … a_K` entirely in memory.
pub fn compute_series(spec: OscillatorSpec, k: usize, ctx: PrecisionContext) -> SeriesCoefficients {
    compute_series_with(spec, k, ctx, None, &mut |_| ControlFlow::Continue(()))
        .expect("in-memory computation cannot fail")
        .series
}

struct Engine {
    op: PotentialOperator,
    history: Vec<WavefunctionState>,
    energies: Vec<BigReal>,
}

impl Engine {
    fn new(spec: OscillatorSpec, ctx: PrecisionContext) -> Self {
        Self {
            op: PotentialOperator::new(spec.m(), ctx),
            history: vec![WavefunctionState::ground(ctx)],
            energies: vec![BigReal::from_ratio(1, 2, ctx)],
        }
    }

    fn order(&self) -> usize {
        self.energies.len() - 1
    }

    fn step(&mut self) {
        let (a, psi) = step_with(&mut self.op, &self.history, &self.energies);
        self.energies.push(a);
        self.history.push(psi);
    }
}

/// Full driver: optional on-disk checkpoints and an observer that may stop
/// the run after any order.
///
/// With checkpointing, a finished coefficient cache short-circuits the
/// computation, and a state journal left by an interrupted run is resumed.
/// Recomputed orders that are also present in the cache must reproduce it
/// bit for bit.
pub fn compute_series_with(
    spec: OscillatorSpec,
    k: usize,
    ctx: PrecisionContext,
    checkpoint: Option<&Checkpointing>,
    observer: &mut dyn FnMut(&Progress) -> ControlFlow<()>,
) -> Result<SeriesRun, RsError> {
    let m = spec.m();
    let mut engine = Engine::new(spec, ctx);
    let mut cached: Vec<BigReal> = Vec::new();
    let mut persisted = 0usize;
    let mut restored = 0usize;

    if let Some(cp) = checkpoint {
        std::fs::create_dir_all(&cp.dir).map_err(|e| RsError::io(&cp.dir, e))?;
        let cpath = cache::cache_path(&cp.dir, m, ctx.dps());
        if cpath.exists() {
            let series = cache::read_cache(&cpath, m, ctx)?;
            if series.order() >= k {
                return Ok(SeriesRun {
                    series: series.truncated(k),
                    complete: true,
                    restored: k + 1,
                });
            }
            cached = series.coefficients().to_vec();
        }
        let jpath = journal::journal_path(&cp.dir, m, ctx.dps());
        if let Some((energies, states)) = journal::load(&jpath, m, ctx)? {
            let n = energies.len();
            engine.energies.extend(energies);
            engine.history.extend(
                states
                    .into_iter()
                    .enumerate()
                    .map(|(i, c)| WavefunctionState::new(i + 1, c)),
            );
            for (j, a) in engine.energies.iter().enumerate().take(cached.len()) {
                if *a != cached[j] {
                    return Err(RsError::Journal {
                        path: jpath,
                        reason: format!("order {j} disagrees with the coefficient cache"),
                    });
                }
            }
            persisted = n;
            restored = n;
            // Drop extra journal orders beyond the requested target.
            engine.energies.truncate(k + 1);
            engine.history.truncate(k + 1);
        }
    }

    let flush = |engine: &Engine, persisted: &mut usize| -> Result<(), RsError> {
        let Some(cp) = checkpoint else { return Ok(()) };
        let upto = engine.order();
        if upto > *persisted {
            let jpath = journal::journal_path(&cp.dir, m, ctx.dps());
            journal::append(
                &jpath,
                m,
                ctx,
                &engine.energies[*persisted + 1..=upto],
                &engine.history[*persisted + 1..=upto],
            )?;
            *persisted = upto;
        }
        let series = SeriesCoefficients::new(m, engine.energies.clone(), ctx);
        cache::write_cache(&cache::cache_path(&cp.dir, m, ctx.dps()), &series)
    };

    let interval = checkpoint.map_or(usize::MAX, |c| c.interval.max(1));
    while engine.order() < k {
        engine.step();
        let order = engine.order();
        if let Some(c) = cached.get(order) {
            if *c != engine.energies[order] {
                let path = cache::cache_path(&checkpoint.unwrap().dir, m, ctx.dps());
                return Err(RsError::Cache {
                    path,
                    line: order + 1,
                    reason: "cached coefficient differs from recomputation".into(),
                });
            }
        }
        let progress = Progress {
            m,
            order,
            target: k,
            coefficient: &engine.energies[order],
        };
        let stop = observer(&progress).is_break();
        if stop || order.is_multiple_of(interval) {
            flush(&engine, &mut persisted)?;
        }
        if stop && order < k {
            return Ok(SeriesRun {
                series: SeriesCoefficients::new(m, engine.energies, ctx),
                complete: false,
                restored,
            });
        }
    }
    if let Some(cp) = checkpoint {
        let series = SeriesCoefficients::new(m, engine.energies.clone(), ctx);
        cache::write_cache(&cache::cache_path(&cp.dir, m, ctx.dps()), &series)?;
        let jpath = journal::journal_path(&cp.dir, m, ctx.dps());
        if jpath.exists() {
            std::fs::remove_file(&jpath).map_err(|e| RsError::io(&jpath, e))?;
        }
    }
    Ok(SeriesRun {
        series: SeriesCoefficients::new(m, engine.energies, ctx),
        complete: true,
        restored,
    })
}
