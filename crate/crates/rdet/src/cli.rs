//! Command-line front end. Arguments resolve to a [`RunConfig`], which is
//! then executed; `run --config` replays a saved configuration.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use rdet_core::dynamics::SymbolicOrbit;
use rdet_core::rational::{format_fraction, parse_fraction};
use rdet_core::rqa::profile::geometric_grid;
use rdet_core::rqa::{enclosure_matrices, recurrence_matrix, BitMatrix, DeterminismReport};
use rdet_core::validate::validate;
use rdet_core::Word;
use serde::Serialize;

use crate::compute::{enclosure_profile, float_profile, line_histograms};
use crate::config::{parse_range, EpsSpec, InitialCondition, MapConfig, RunConfig, SystemConfig};
use crate::error::{EXIT_BOUND_FAILURE, EXIT_PASS, EXIT_USAGE};
use crate::experiments::{
    classify, epsilon_sweep, four_fifths_report, theorem_example_report, FourFifthsOptions, Source,
    TheoremExampleOptions, Thresholds,
};
use crate::export;
use crate::{Error, Result};

/// Absolute tolerance on the line-based DET identity.
pub const DET_IDENTITY_TOL: f64 = 1e-12;

#[derive(Debug, Parser)]
#[command(name = "rdet", version, about = "Recurrence determinism of interval maps")]
pub struct Cli {
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print the resolved configuration and exit.
    #[arg(long, global = true)]
    pub print_config: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an interval system, validate it and write it as JSON.
    Construct(ConstructArgs),
    /// Recurrence profile of one orbit at one radius.
    Rqa(RqaArgs),
    /// Profiles over a radius grid plus a verdict.
    Sweep(SweepArgs),
    /// Certified reproductions.
    #[command(subcommand)]
    Reproduce(Reproduce),
    /// Execute a saved configuration.
    Run {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    #[arg(long, value_parser = ["ternary", "theorem3"])]
    pub kind: String,
    #[arg(long)]
    pub stages: Option<u32>,
    /// Levels written; defaults to the materialized depth (10 for ternary).
    #[arg(long)]
    pub depth: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub validation: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OrbitArgs {
    /// `logistic:<r>`, `tent:<s>`, `odometer:ternary`, `odometer:theorem3:<stages>`.
    #[arg(long)]
    pub map: String,
    #[arg(long, conflicts_with = "alpha")]
    pub x0: Option<f64>,
    /// Start address for exact symbolic orbits of odometer maps.
    #[arg(long)]
    pub alpha: Option<String>,
    #[arg(long, default_value_t = 0)]
    pub transient: usize,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RqaArgs {
    #[command(flatten)]
    pub orbit: OrbitArgs,
    #[arg(long)]
    pub eps: String,
    #[arg(long)]
    pub csv: Option<PathBuf>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    /// PBM (P4) recurrence plot.
    #[arg(long)]
    pub plot: Option<PathBuf>,
    /// PGM (P5) of diagonal run lengths.
    #[arg(long)]
    pub pgm: Option<PathBuf>,
    /// Run-length JSON of the recurrence plot.
    #[arg(long)]
    pub runs: Option<PathBuf>,
    #[arg(long)]
    pub trajectory: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub orbit: OrbitArgs,
    /// Comma-separated radii, `ladder`, or `eps_t:a..b`.
    #[arg(long)]
    pub eps: String,
    #[arg(long)]
    pub theta_one: Option<f64>,
    #[arg(long)]
    pub theta_zero: Option<f64>,
    #[arg(long)]
    pub small_fraction: Option<f64>,
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Reproduce {
    /// Determinism pinned at one and collapsing along the staged ladder.
    TheoremExample {
        #[arg(long, default_value_t = 3)]
        stages: u32,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// The 4/5 bound at the extreme-grandchild scales.
    FourFifths {
        #[arg(long, default_value = "2..8")]
        t: String,
        #[arg(long, default_value = "ternary")]
        system: String,
        #[arg(long)]
        json: Option<PathBuf>,
    },
}

fn orbit_config(cfg: &mut RunConfig, o: &OrbitArgs) -> Result<()> {
    cfg.map = Some(o.map.parse()?);
    cfg.initial = match (&o.x0, &o.alpha) {
        (Some(x), _) => Some(InitialCondition::Point(*x)),
        (_, Some(a)) => Some(InitialCondition::Address(a.clone())),
        _ => None,
    };
    cfg.transient = o.transient;
    cfg.n = o.n;
    cfg.m = o.m;
    Ok(())
}

/// Resolves parsed arguments to a configuration (budget env overrides applied).
pub fn resolve(cli: &Cli) -> Result<RunConfig> {
    let mut cfg = match &cli.command {
        Command::Run { config } => {
            let text = std::fs::read_to_string(config).map_err(|e| Error::io(config, e))?;
            RunConfig::parse(&text)?
        }
        Command::Construct(a) => {
            let mut cfg = RunConfig::new("construct");
            cfg.system = Some(match a.kind.as_str() {
                "ternary" => SystemConfig::Ternary,
                _ => SystemConfig::Theorem3 {
                    stages: a.stages.unwrap_or(3),
                },
            });
            cfg.budgets.depth = cfg.budgets.depth.max(a.depth.unwrap_or(0));
            cfg.n = a.depth.map(|d| d as usize);
            cfg.outputs.json = a.out.clone();
            cfg.outputs.validation = a.validation.clone();
            cfg
        }
        Command::Rqa(a) => {
            let mut cfg = RunConfig::new("rqa");
            orbit_config(&mut cfg, &a.orbit)?;
            let eps = parse_fraction(&a.eps)?;
            cfg.eps = Some(EpsSpec::List {
                values: vec![a.eps.clone()],
            });
            if eps <= num_rational::BigRational::from_integer(0.into()) {
                return Err(Error::Usage("--eps must be positive".into()));
            }
            cfg.outputs.csv = a.csv.clone();
            cfg.outputs.json = a.json.clone();
            cfg.outputs.plot = a.plot.clone();
            cfg.outputs.pgm = a.pgm.clone();
            cfg.outputs.runs = a.runs.clone();
            cfg.outputs.trajectory = a.trajectory.clone();
            cfg
        }
        Command::Sweep(a) => {
            let mut cfg = RunConfig::new("sweep");
            orbit_config(&mut cfg, &a.orbit)?;
            cfg.eps = Some(a.eps.parse()?);
            let d = Thresholds::default();
            cfg.thresholds = Some(Thresholds {
                theta_one: a.theta_one.unwrap_or(d.theta_one),
                theta_zero: a.theta_zero.unwrap_or(d.theta_zero),
                small_fraction: a.small_fraction.unwrap_or(d.small_fraction),
            });
            cfg.outputs.json = a.json.clone();
            cfg.outputs.csv = a.csv.clone();
            cfg
        }
        Command::Reproduce(Reproduce::TheoremExample { stages, json }) => {
            let mut cfg = RunConfig::new("reproduce-theorem-example");
            cfg.system = Some(SystemConfig::Theorem3 { stages: *stages });
            cfg.outputs.json = json.clone();
            cfg
        }
        Command::Reproduce(Reproduce::FourFifths { t, system, json }) => {
            let mut cfg = RunConfig::new("reproduce-four-fifths");
            cfg.system = Some(system.parse()?);
            cfg.t_range = Some(parse_range(t)?);
            cfg.outputs.json = json.clone();
            cfg
        }
    };
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    cfg.budgets = cfg.budgets.clone().with_env()?;
    Ok(cfg)
}

/// Whether every certified check of the run passed.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub passed: bool,
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => export::write_string(p, text),
        None => export::stdout(text),
    }
}

pub fn execute(cfg: &RunConfig) -> Result<Outcome> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.threads.unwrap_or(0))
        .build()
        .map_err(|e| Error::Usage(format!("thread pool: {e}")))?;
    pool.install(|| match cfg.command.as_str() {
        "construct" => construct(cfg),
        "rqa" => rqa(cfg),
        "sweep" => sweep(cfg),
        "reproduce-theorem-example" => reproduce_theorem_example(cfg),
        "reproduce-four-fifths" => reproduce_four_fifths(cfg),
        other => Err(Error::Usage(format!("unknown command {other:?}"))),
    })
}

fn construct(cfg: &RunConfig) -> Result<Outcome> {
    let system = cfg.system.as_ref().ok_or_else(|| Error::Usage("construct needs a system".into()))?;
    let sys = system.build(cfg.budgets.depth)?;
    let depth = match cfg.n {
        Some(d) => d as u32,
        None if sys.materialized_depth() == 0 => 10,
        None => sys.materialized_depth(),
    };
    sys.check_depth(depth)?;
    let report = validate(&sys, depth);
    emit(cfg.outputs.json.as_deref(), &export::system_json(&sys, depth)?)?;
    let vjson = export::validation_json(&report)?;
    match &cfg.outputs.validation {
        Some(p) => export::write_string(p, &vjson)?,
        None => {
            for r in report.failures() {
                eprintln!("validation failed: {} level={:?} stage={:?}", r.check, r.level, r.stage);
            }
        }
    }
    eprintln!(
        "{} depth {}: {} checks, {}",
        sys.kind().name(),
        depth,
        report.records.len(),
        if report.passed() { "pass" } else { "FAIL" }
    );
    Ok(Outcome {
        passed: report.passed(),
    })
}

fn initial_point(cfg: &RunConfig, map: &MapConfig) -> f64 {
    match (&cfg.initial, map) {
        (Some(InitialCondition::Point(x)), _) => *x,
        (_, MapConfig::Odometer { .. }) => 0.25,
        _ => 0.3,
    }
}

fn address(cfg: &RunConfig) -> Result<Option<Word>> {
    match &cfg.initial {
        Some(InitialCondition::Address(a)) => Ok(Some(Word::parse(a)?)),
        _ => Ok(None),
    }
}

fn source(cfg: &RunConfig) -> Result<Source> {
    let map = cfg.map.as_ref().ok_or_else(|| Error::Usage("a map is required".into()))?;
    if let Some(alpha) = address(cfg)? {
        let sys = map
            .system(cfg.budgets.depth)?
            .ok_or_else(|| Error::Usage("start addresses need an odometer map".into()))?;
        return Ok(Source::Symbolic { sys, alpha });
    }
    Ok(Source::Map {
        map: map.build(cfg.budgets.depth)?,
        x0: initial_point(cfg, map),
        transient: cfg.transient,
    })
}

fn rqa(cfg: &RunConfig) -> Result<Outcome> {
    let n = cfg.n.unwrap_or(4096);
    let m_cap = cfg.m.unwrap_or(64);
    if n == 0 || m_cap == 0 {
        return Err(Error::Usage("--n and --m must be positive".into()));
    }
    cfg.budgets.check(n, m_cap)?;
    let radii = cfg
        .eps
        .as_ref()
        .ok_or_else(|| Error::Usage("--eps is required".into()))?
        .resolve(None)?;
    let radius = &radii[0];
    let grid = geometric_grid(256.min(n), n);
    let len = n + m_cap - 1;

    let (report, plot, xs): (DeterminismReport, BitMatrix, Vec<f64>) = match source(cfg)? {
        Source::Map { map, x0, transient } => {
            let xs = map.trajectory_after(x0, transient, len)?;
            let profile = float_profile(&xs, radius.value(), &grid, m_cap)?;
            let lines = line_histograms(&xs, radius.value(), &grid);
            let report = DeterminismReport::new(&profile, Some(&lines))?;
            let plot = recurrence_matrix(&xs[..n], radius.value());
            (report, plot, xs)
        }
        Source::Symbolic { sys, alpha } => {
            let mut enc = SymbolicOrbit::new(sys, alpha, len)?.enclosures()?;
            let profile = enclosure_profile(&enc, &radius.exact, &grid, m_cap)?;
            let report = DeterminismReport::new(&profile, None)?;
            let xs = enc.midpoints();
            enc.truncate(n);
            let plot = enclosure_matrices(&enc, &radius.exact).certain;
            (report, plot, xs)
        }
    };

    let o = &cfg.outputs;
    let csv = export::profile_csv(&report)?;
    match (&o.csv, &o.json) {
        (Some(p), _) => export::write_file(p, &csv)?,
        (None, None) => export::stdout(&String::from_utf8_lossy(&csv))?,
        _ => {}
    }
    if let Some(p) = &o.json {
        export::write_string(p, &export::report_json(&report, cfg)?)?;
    }
    if let Some(p) = &o.plot {
        export::write_file(p, &export::pbm(&plot))?;
    }
    if let Some(p) = &o.pgm {
        export::write_file(p, &export::pgm_run_lengths(&plot))?;
    }
    if let Some(p) = &o.runs {
        export::write_string(p, &export::run_length_json(&plot)?)?;
    }
    if let Some(p) = &o.trajectory {
        export::write_file(p, &export::trajectory_csv(&xs)?)?;
    }
    let tail = report.tail(m_cap);
    eprintln!(
        "eps={} n={} m={}: C in [{:.6}, {:.6}], rdet in [{:.6}, {:.6}], stabilized at m={}",
        format_fraction(&radius.exact),
        n,
        m_cap,
        tail.c_min,
        tail.c_max,
        tail.rdet_min,
        tail.rdet_max,
        report.stabilized_at
    );
    let identity_ok = report.det_identity_error.is_none_or(|e| e <= DET_IDENTITY_TOL);
    Ok(Outcome {
        passed: report.monotone_ok && identity_ok,
    })
}

#[derive(Serialize)]
struct SweepOutput<'a> {
    config: &'a RunConfig,
    sweep: &'a crate::experiments::SweepResult,
    classification: &'a crate::experiments::Classification,
}

fn sweep(cfg: &RunConfig) -> Result<Outcome> {
    let source = source(cfg)?;
    let spec = cfg.eps.as_ref().ok_or_else(|| Error::Usage("--eps is required".into()))?;
    let sys = match cfg.map.as_ref() {
        Some(m) => m.system(cfg.budgets.depth)?,
        None => None,
    };
    let radii = spec.resolve(sys.as_deref())?;
    let mut budgets = cfg.budgets.clone();
    if let Some(n) = cfg.n {
        budgets.n_max = n;
    }
    if let Some(m) = cfg.m {
        budgets.m_cap = m;
    }
    let result = epsilon_sweep(&source, &radii, spec.provenance(), &budgets)?;
    for e in &result.entries {
        if let Some(err) = &e.error {
            eprintln!("eps={}: {err}", e.eps);
        }
    }
    let classification = classify(&result, cfg.thresholds.unwrap_or_default())?;
    let text = export::to_json(&SweepOutput {
        config: cfg,
        sweep: &result,
        classification: &classification,
    })?;
    emit(cfg.outputs.json.as_deref(), &text)?;
    if let Some(p) = &cfg.outputs.csv {
        let mut w = csv::Writer::from_writer(Vec::new());
        for e in &result.entries {
            w.serialize(e)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::io(p, e.into_error()))?;
        export::write_file(p, &bytes)?;
    }
    eprintln!(
        "{}: {:?} over {} radii ({:.2} decades{})",
        result.map,
        classification.verdict,
        classification.radii,
        classification.decades,
        if classification.coverage_ok { "" } else { ", below the coverage requirement" }
    );
    let budget_failures = result.entries.iter().any(|e| !e.ok());
    if budget_failures && result.completed().count() == 0 {
        return Err(Error::Budget("no radius fit the budget".into()));
    }
    Ok(Outcome { passed: true })
}

#[derive(Serialize)]
struct ReportOutput<'a, R: Serialize> {
    config: &'a RunConfig,
    report: &'a R,
}

fn reproduce_theorem_example(cfg: &RunConfig) -> Result<Outcome> {
    let stages = match &cfg.system {
        Some(SystemConfig::Theorem3 { stages }) => *stages,
        _ => return Err(Error::Usage("theorem-example needs a theorem3 system".into())),
    };
    if stages == 0 {
        return Err(Error::Usage("--stages must be at least 1".into()));
    }
    let report = theorem_example_report(stages, TheoremExampleOptions::default())?;
    emit(
        cfg.outputs.json.as_deref(),
        &export::to_json(&ReportOutput { config: cfg, report: &report })?,
    )?;
    for (label, lo, hi) in &report.oscillation {
        eprintln!("{label}: rdet in [{lo}, {hi}]");
    }
    Ok(Outcome { passed: report.passed })
}

fn reproduce_four_fifths(cfg: &RunConfig) -> Result<Outcome> {
    let system = cfg.system.clone().unwrap_or(SystemConfig::Ternary);
    let sys = Arc::new(system.build(cfg.budgets.depth)?);
    let t_range = cfg.t_range.unwrap_or((2, 8));
    let report = four_fifths_report(sys, t_range, FourFifthsOptions::default())?;
    emit(
        cfg.outputs.json.as_deref(),
        &export::to_json(&ReportOutput { config: cfg, report: &report })?,
    )?;
    for r in &report.rows {
        eprintln!(
            "t={} eps={}: N_inf={} N°_1={} bound={} {}",
            r.t,
            r.eps,
            r.n_inf,
            r.n_circ_1,
            r.bound,
            if !r.in_hypothesis {
                "(out of hypothesis)"
            } else if r.passed() {
                "pass"
            } else {
                "FAIL"
            }
        );
    }
    Ok(Outcome { passed: report.passed })
}

/// Parses `args`, runs, and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
        }
    };
    let result = resolve(&cli).and_then(|cfg| {
        if cli.print_config {
            export::stdout(&(cfg.render()? + "\n"))?;
            return Ok(Outcome { passed: true });
        }
        execute(&cfg)
    });
    match result {
        Ok(Outcome { passed: true }) => EXIT_PASS,
        Ok(Outcome { passed: false }) => EXIT_BOUND_FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
