use std::ops::ControlFlow;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use stokes_core::asymptotics::{extract, instanton_action_exact, stokes_sequence};
use stokes_core::pipeline::{
    default_sweep, emit_convergence, parse_m_range, run_pipeline_with, verify_reference, Event,
    Overrides, PipelineError, ResolvedParams, RunConfig,
};
use stokes_core::precision::{BigReal, PrecisionContext};
use stokes_core::recognition::{
    default_symbols, search_closed_form, unit_entry_default, SearchSchedule, Symbol,
};
use stokes_core::rs::{cache_path, compute_series_with, read_cache, Checkpointing, OscillatorSpec};

const EXIT_CONFIG: u8 = 1;
const EXIT_PARTIAL: u8 = 2;

#[derive(Parser)]
#[command(
    name = "stokes",
    version,
    about = "Perturbation series, large-order asymptotics and closed forms for x^{2M} oscillators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute (or resume) the coefficient series into the cache.
    Compute(Common),
    /// Extract A, b and C from a cached series.
    Extract(Common),
    /// Search for an integer relation for a given multiplier.
    Recognize(RecognizeArgs),
    /// Series, extraction and recognition over a range of M, with reports.
    Pipeline(Common),
    /// Check the instanton actions, a_1 and the closed-form identities.
    Verify {
        #[arg(long, default_value_t = 50)]
        dps: u32,
    },
    /// Export raw and extrapolated multiplier estimates as CSV.
    Convergence(Common),
}

#[derive(Args, Clone, Default)]
struct Common {
    /// A single degree M.
    #[arg(long = "M")]
    m: Option<u32>,
    /// Degrees as "2-11" or "2,3,5".
    #[arg(long = "M-range")]
    m_range: Option<String>,
    /// Highest perturbative order K.
    #[arg(long)]
    orders: Option<usize>,
    /// Working precision in decimal digits.
    #[arg(long)]
    dps: Option<u32>,
    /// Richardson order N.
    #[arg(long = "richardson-order")]
    richardson_order: Option<usize>,
    /// Richardson start index k0; repeat for several windows.
    #[arg(long = "start-index")]
    start_index: Vec<usize>,
    /// Largest PSLQ coefficient searched.
    #[arg(long)]
    maxcoeff: Option<u64>,
    /// Degrees computed at the same time.
    #[arg(long)]
    parallelism: Option<usize>,
    /// Reports, CSV exports and the coefficient cache go here.
    #[arg(long = "out-dir")]
    out_dir: Option<PathBuf>,
    /// Reduced orders and precision for a quick run.
    #[arg(long = "desk-scale")]
    desk_scale: bool,
    /// TOML file with global and per-degree settings; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Args)]
struct RecognizeArgs {
    /// Decimal value of C (sign ignored).
    #[arg(long)]
    value: String,
    /// Degree, used for the default basis.
    #[arg(long = "M")]
    m: Option<u32>,
    /// Comma-separated symbols, e.g. "C,G(1/3),pi,2,3,1".
    #[arg(long)]
    basis: Option<String>,
    #[arg(long, default_value_t = 1000)]
    maxcoeff: u64,
    /// Digits to trust; defaults to the significant digits of --value.
    #[arg(long)]
    dps: Option<u32>,
}

enum Failure {
    Config(String),
    Run(String),
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Config(m) => Failure::Config(m),
            other => Failure::Run(other.to_string()),
        }
    }
}

fn run_err(e: impl std::fmt::Display) -> Failure {
    Failure::Run(e.to_string())
}

impl Common {
    fn config(&self) -> Result<RunConfig, Failure> {
        let mut cfg = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| Failure::Config(format!("{}: {e}", path.display())))?;
                RunConfig::from_toml(&text)?
            }
            None => RunConfig::default(),
        };
        if let Some(r) = &self.m_range {
            cfg.m_range = parse_m_range(r)?;
        }
        if let Some(m) = self.m {
            cfg.m_range = vec![m];
        }
        if self.desk_scale {
            cfg.desk_scale = true;
        }
        if let Some(p) = self.parallelism {
            cfg.parallelism = p;
        }
        if let Some(d) = &self.out_dir {
            cfg.out_dir = d.clone();
        }
        let flags = Overrides {
            max_order: self.orders,
            dps: self.dps,
            richardson_order: self.richardson_order,
            pslq_maxcoeff: self.maxcoeff,
            start_indices: (!self.start_index.is_empty()).then(|| self.start_index.clone()),
            include_unit: None,
        };
        // Command-line values win over every layer of the file.
        for layer in std::iter::once(&mut cfg.global).chain(cfg.per_m.values_mut()) {
            overlay(layer, &flags);
        }
        Ok(cfg)
    }

    /// Resolved parameters for the single degree a per-M command acts on.
    fn single(&self) -> Result<(RunConfig, ResolvedParams), Failure> {
        let cfg = self.config()?;
        let m = match (self.m, cfg.m_range.as_slice()) {
            (Some(m), _) => m,
            (None, [m]) => *m,
            _ => {
                return Err(Failure::Config(
                    "this command needs a single degree (--M)".into(),
                ))
            }
        };
        let p = cfg.resolve_one(m)?;
        Ok((cfg, p))
    }
}

fn overlay(layer: &mut Overrides, flags: &Overrides) {
    if flags.max_order.is_some() {
        layer.max_order = flags.max_order;
    }
    if flags.dps.is_some() {
        layer.dps = flags.dps;
    }
    if flags.richardson_order.is_some() {
        layer.richardson_order = flags.richardson_order;
    }
    if flags.pslq_maxcoeff.is_some() {
        layer.pslq_maxcoeff = flags.pslq_maxcoeff;
    }
    if flags.start_indices.is_some() {
        layer.start_indices = flags.start_indices.clone();
    }
}

fn ctx(dps: u32) -> Result<PrecisionContext, Failure> {
    PrecisionContext::new(dps).map_err(|e| Failure::Config(e.to_string()))
}

fn series_for(
    cfg: &RunConfig,
    p: &ResolvedParams,
) -> Result<stokes_core::rs::SeriesCoefficients, Failure> {
    let c = ctx(p.params.dps)?;
    let spec = OscillatorSpec::new(p.m).map_err(|e| Failure::Config(e.to_string()))?;
    let cp = Checkpointing::new(cfg.out_dir.join("cache"));
    let target = p.params.max_order;
    let run = compute_series_with(spec, target, c, Some(&cp), &mut |pr| {
        if pr.order % 50 == 0 {
            eprintln!("M={} order {}/{}", pr.m, pr.order, target);
        }
        ControlFlow::Continue(())
    })
    .map_err(run_err)?;
    Ok(run.series)
}

fn compute(args: &Common) -> Result<(), Failure> {
    let (cfg, p) = args.single()?;
    let s = series_for(&cfg, &p)?;
    let path = cache_path(&cfg.out_dir.join("cache"), p.m, p.params.dps);
    println!(
        "M = {}: {} orders at {} digits -> {}",
        p.m,
        s.order(),
        p.params.dps,
        path.display()
    );
    if let Some(a) = s.get(s.order()) {
        println!(
            "a_{} = {}",
            s.order(),
            a.to_sci_string(30.min(p.params.dps as usize))
        );
    }
    let bad = s.sign_violations();
    if !bad.is_empty() {
        return Err(Failure::Run(format!(
            "sign pattern broken at orders {bad:?}"
        )));
    }
    Ok(())
}

fn extract_cmd(args: &Common) -> Result<(), Failure> {
    let (cfg, p) = args.single()?;
    let c = ctx(p.params.dps)?;
    let path = cache_path(&cfg.out_dir.join("cache"), p.m, p.params.dps);
    if !path.exists() {
        return Err(Failure::Run(format!(
            "no cache at {} (run `stokes compute` first)",
            path.display()
        )));
    }
    let s = read_cache(&path, p.m, c).map_err(run_err)?;
    if s.order() < p.params.max_order {
        return Err(Failure::Run(format!(
            "{} holds {} orders, {} requested",
            path.display(),
            s.order(),
            p.params.max_order
        )));
    }
    let s = s.truncated(p.params.max_order);
    let e = extract(&s, &p.windows).map_err(run_err)?;
    let digits = |d: usize| if d == 0 { 10 } else { d };
    println!("M = {}", p.m);
    println!("A exact     = {}", e.a_exact.to_decimal_string(30));
    println!(
        "A extracted = {} ({} digits)",
        e.action
            .limit
            .to_decimal_string(digits(e.action.reliable_digits)),
        e.action.reliable_digits
    );
    println!(
        "b           = {} ({} digits)",
        e.shift
            .limit
            .to_decimal_string(digits(e.shift.reliable_digits)),
        e.shift.reliable_digits
    );
    let cs = e
        .stokes
        .limit
        .to_decimal_string(digits(e.stokes.reliable_digits));
    println!("C           = {cs}");
    println!(
        "|C|         = {} ({} digits)",
        cs.trim_start_matches('-'),
        e.stokes.reliable_digits
    );
    for w in &e.stokes.windows {
        println!(
            "  k0={} N={}: {}",
            w.k0,
            w.n,
            w.estimate
                .to_decimal_string(digits(e.stokes.reliable_digits) + 5)
        );
    }
    Ok(())
}

fn significant_digits(s: &str) -> usize {
    let mantissa = s
        .trim()
        .trim_start_matches(['-', '+'])
        .split(['e', 'E'])
        .next()
        .unwrap_or("");
    mantissa
        .chars()
        .filter(char::is_ascii_digit)
        .skip_while(|&c| c == '0')
        .count()
}

fn recognize(args: &RecognizeArgs) -> Result<(), Failure> {
    let digits = args
        .dps
        .map(|d| d as usize)
        .unwrap_or_else(|| significant_digits(&args.value));
    let c = ctx(digits.max(15) as u32 + 10)?;
    let value = BigReal::parse(&args.value, c).map_err(|e| Failure::Config(e.to_string()))?;
    let symbols: Vec<Symbol> = match (&args.basis, args.m) {
        (Some(b), _) => b
            .split(',')
            .map(|s| s.parse::<Symbol>())
            .collect::<Result<_, _>>()
            .map_err(|e| Failure::Config(e.to_string()))?,
        (None, Some(m)) if m >= 2 => default_symbols(m, unit_entry_default(m)),
        _ => return Err(Failure::Config("give --basis or a degree --M >= 2".into())),
    };
    if !symbols.contains(&Symbol::AbsC) {
        return Err(Failure::Config("the basis must contain C".into()));
    }
    let schedule = SearchSchedule {
        maxcoeffs: stokes_core::pipeline::schedule_for(args.maxcoeff).maxcoeffs,
        dps_levels: vec![digits as u32],
    };
    let report = search_closed_form(args.m.unwrap_or(0), &value, digits, &symbols, &schedule)
        .map_err(|e| Failure::Config(e.to_string()))?;
    print!("{}", report.to_text());
    Ok(())
}

fn pipeline(args: &Common) -> Result<bool, Failure> {
    let cfg = args.config()?;
    let observer = |e: &Event| match e {
        Event::Started { m } => eprintln!("M={m}: started"),
        Event::Order { m, order, target } if order % 100 == 0 || order == target => {
            eprintln!("M={m}: order {order}/{target}")
        }
        Event::Stage { m, stage } => eprintln!("M={m}: {stage}"),
        Event::Finished { m, ok } => eprintln!("M={m}: {}", if *ok { "done" } else { "FAILED" }),
        _ => {}
    };
    let report = run_pipeline_with(&cfg, &observer)?;
    print!("{}", report.tables().to_text());
    let failed = report.failed();
    for d in &report.degrees {
        if let stokes_core::pipeline::DegreeStatus::Failed { error } = &d.status {
            eprintln!("M={}: {error}", d.m);
        }
    }
    eprintln!("reports written to {}", cfg.out_dir.display());
    Ok(failed.is_empty())
}

fn verify(dps: u32) -> Result<bool, Failure> {
    let r = verify_reference(dps)?;
    print!("{}", r.to_text());
    Ok(r.passed())
}

fn convergence(args: &Common) -> Result<(), Failure> {
    let (cfg, p) = args.single()?;
    let s = series_for(&cfg, &p)?;
    let k = s.order();
    let k0 = args.start_index.first().copied().unwrap_or(k / 2);
    let ns = default_sweep(p.params.richardson_order);
    let c = s.ctx();
    let seq = stokes_sequence(&s, &instanton_action_exact(p.m, c), c).map_err(run_err)?;
    let path = cfg.out_dir.join(format!("convergence_M{}.csv", p.m));
    let digits = 30.min(p.params.dps as usize);
    match emit_convergence(&seq, k0, &ns, digits, c, &path) {
        Ok(()) => {
            println!("wrote {} (k0 = {k0}, N = {ns:?})", path.display());
            Ok(())
        }
        Err(PipelineError::Asymptotics(e)) => Err(Failure::Config(e.to_string())),
        Err(e) => Err(e.into()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_CONFIG)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let outcome = match &cli.command {
        Command::Compute(a) => compute(a).map(|_| true),
        Command::Extract(a) => extract_cmd(a).map(|_| true),
        Command::Recognize(a) => recognize(a).map(|_| true),
        Command::Pipeline(a) => pipeline(a),
        Command::Verify { dps } => verify(*dps),
        Command::Convergence(a) => convergence(a).map(|_| true),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(EXIT_PARTIAL),
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(Failure::Run(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(EXIT_PARTIAL)
        }
    }
}
