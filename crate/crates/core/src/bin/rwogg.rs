//! Command-line front end: simulation, stationary tables, mixing
//! measurement, recurrence classification, dominance verification, and
//! parameter sweeps over schedule families.
//!
//! Family descriptors: `karytree:k=2,lambda=1`, `heightpath:k=2,lambda=1`,
//! `box:d=4`, `genbox:d=2,b1=1,b2=n`, `hypercube`,
//! `leveltree:k=2,gamma=0.5`, `star:M=linear,gamma=0,start=leaf`.
//! Schedule descriptors: `explicit:3,5,0,2` (durations per phase; the walk
//! stays on the final level once the list is exhausted) or
//! `symbolic:base=2,a=1,b=1,d1=4` for
//! `d(n) = round(base^n / (n^a (ln n)^b))` with `d(1) = d1`.
//!
//! Every flag can instead come from a config file (`--config run.cfg`) with
//! one `[subcommand]` section of `key = value` lines mirroring the flag
//! names; explicit flags win. Exit codes: 0 success, 1 verification
//! failure, 2 configuration error, 3 resource cap exceeded.

use clap::{Args, Parser, Subcommand, ValueEnum};
use rwogg_core::analysis::{
    classify, even_stationary_numeric, mixing_estimate, p_bounds, p_origin_closed,
    MixingConstants, NumericStart,
};
use rwogg_core::coupling::{verify_coupling_sim, verify_lhagg_exact, CouplingMode};
use rwogg_core::engine::{
    run_exact, run_monte_carlo, EvolutionMode, ReturnSeries, RunMetadata, RNG_ALGORITHM,
};
use rwogg_core::families::TransitionFamily;
use rwogg_core::schedule::DurationSchedule;
use rwogg_core::{Error, Result};
use serde::Serialize;
use std::collections::HashMap;
use std::io::Write;
use std::path::{Path, PathBuf};

const ARTIFACT_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser)]
#[command(name = "rwogg", version, about = "Random walks on growing graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a walk and write series.csv plus meta.json.
    Simulate(SimulateArgs),
    /// Tabulate stationary origin mass against its closed form and bounds.
    Stationary(StationaryArgs),
    /// Measure even mixing times against the analytic bounds.
    Mixing(MixingArgs),
    /// Classify a (family, schedule) pair as recurrent or transient.
    Classify(ClassifyArgs),
    /// Verify return-series dominance for prefix-ordered schedules.
    Lhagg(LhaggArgs),
    /// Grid sweep over symbolic schedule parameters.
    Sweep(SweepArgs),
}

#[derive(Args, Default)]
struct SimulateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long, value_enum)]
    mode: Option<RunMode>,
    #[arg(long)]
    walkers: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    /// State-count cap for builders.
    #[arg(long)]
    cap: Option<u64>,
    /// Output directory for series.csv and meta.json.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum RunMode {
    Exact,
    ExactLumped,
    MonteCarlo,
}

impl RunMode {
    fn parse(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(RunMode::Exact),
            "exact-lumped" => Ok(RunMode::ExactLumped),
            "monte-carlo" => Ok(RunMode::MonteCarlo),
            _ => Err(Error::InvalidDescriptor(format!("mode `{s}`"))),
        }
    }
    fn name(self) -> &'static str {
        match self {
            RunMode::Exact => "exact",
            RunMode::ExactLumped => "exact-lumped",
            RunMode::MonteCarlo => "monte-carlo",
        }
    }
}

#[derive(Args, Default)]
struct StationaryArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n_min: Option<u32>,
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long)]
    cap: Option<u64>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct MixingArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    n_min: Option<u32>,
    #[arg(long)]
    n_max: Option<u32>,
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct ClassifyArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct LhaggArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    family: Option<String>,
    /// The faster-growing schedule (prefix sums at most g's).
    #[arg(long)]
    f: Option<String>,
    /// The slower-growing schedule.
    #[arg(long)]
    g: Option<String>,
    #[arg(long)]
    horizon: Option<u64>,
    /// exact | sim
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    tolerance: Option<f64>,
    /// Run the deliberately broken coupling (negative control).
    #[arg(long)]
    broken: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Default)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Semicolon-separated family descriptors.
    #[arg(long)]
    families: Option<String>,
    /// Comma-separated geometric bases of the schedule grid.
    #[arg(long)]
    base: Option<String>,
    /// Comma-separated polynomial exponents.
    #[arg(long)]
    a: Option<String>,
    /// Comma-separated logarithmic exponents.
    #[arg(long)]
    b: Option<String>,
    #[arg(long)]
    horizon: Option<u64>,
    #[arg(long)]
    cap: Option<u64>,
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => cmd_simulate(args),
        Command::Stationary(args) => cmd_stationary(args),
        Command::Mixing(args) => cmd_mixing(args),
        Command::Classify(args) => cmd_classify(args),
        Command::Lhagg(args) => cmd_lhagg(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(e.exit_code());
        }
    }
}

/// Minimal `[section]` / `key = value` config format; `#` starts a comment.
fn load_config(path: &Path, section: &str) -> Result<HashMap<String, String>> {
    let text = std::fs::read_to_string(path)?;
    let mut map = HashMap::new();
    let mut in_section = false;
    for raw in text.lines() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            in_section = name.trim() == section;
            continue;
        }
        if !in_section {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::InvalidDescriptor(format!("config line `{line}`")))?;
        map.insert(key.trim().to_string(), value.trim().to_string());
    }
    Ok(map)
}

fn merge<T, F>(flag: Option<T>, cfg: &HashMap<String, String>, key: &str, parse: F) -> Result<Option<T>>
where
    F: Fn(&str) -> Result<T>,
{
    if flag.is_some() {
        return Ok(flag);
    }
    match cfg.get(key) {
        Some(raw) => parse(raw).map(Some),
        None => Ok(None),
    }
}

fn parse_u64(s: &str) -> Result<u64> {
    s.parse().map_err(|_| Error::InvalidDescriptor(format!("integer `{s}`")))
}
fn parse_u32(s: &str) -> Result<u32> {
    s.parse().map_err(|_| Error::InvalidDescriptor(format!("integer `{s}`")))
}
fn parse_f64(s: &str) -> Result<f64> {
    s.parse().map_err(|_| Error::InvalidDescriptor(format!("number `{s}`")))
}

fn required<T>(value: Option<T>, name: &str) -> Result<T> {
    value.ok_or_else(|| Error::InvalidDescriptor(format!("missing required option `{name}`")))
}

fn family_with_cap(desc: &str, cap: Option<u64>) -> Result<TransitionFamily> {
    let family = TransitionFamily::parse(desc)?;
    Ok(match cap {
        Some(c) => family.with_cap(c),
        None => family,
    })
}

fn write_or_print(out: &Option<PathBuf>, content: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, content)?;
        }
        None => {
            print!("{content}");
            std::io::stdout().flush()?;
        }
    }
    Ok(())
}

fn timestamp() -> u64 {
    std::time::SystemTime::now()
        .duration_since(std::time::UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

fn cmd_simulate(args: SimulateArgs) -> Result<i32> {
    let cfg = match &args.config {
        Some(path) => load_config(path, "simulate")?,
        None => HashMap::new(),
    };
    let family_desc = required(merge(args.family, &cfg, "family", |s| Ok(s.to_string()))?, "family")?;
    let schedule_desc =
        required(merge(args.schedule, &cfg, "schedule", |s| Ok(s.to_string()))?, "schedule")?;
    let horizon = required(merge(args.horizon, &cfg, "horizon", parse_u64)?, "horizon")?;
    let mode = required(merge(args.mode, &cfg, "mode", RunMode::parse)?, "mode")?;
    let walkers = merge(args.walkers, &cfg, "walkers", parse_u64)?;
    let seed = merge(args.seed, &cfg, "seed", parse_u64)?;
    let cap = merge(args.cap, &cfg, "cap", parse_u64)?;
    let out_dir =
        merge(args.out, &cfg, "out", |s| Ok(PathBuf::from(s)))?.unwrap_or_else(|| PathBuf::from("."));

    let family = family_with_cap(&family_desc, cap)?;
    let schedule = DurationSchedule::parse(&schedule_desc)?;
    let series: ReturnSeries<f64> = match mode {
        RunMode::Exact => run_exact::<f64>(&family, &schedule, horizon, EvolutionMode::Full)?,
        RunMode::ExactLumped => run_exact::<f64>(&family, &schedule, horizon, EvolutionMode::Lumped)?,
        RunMode::MonteCarlo => {
            let walkers = required(walkers, "walkers")?;
            let seed = required(seed, "seed")?;
            run_monte_carlo(&family, &schedule, horizon, walkers, seed, EvolutionMode::Full)?
        }
    };
    let meta = RunMetadata {
        artifact_version: ARTIFACT_VERSION.to_string(),
        family: family.descriptor(),
        schedule: schedule.descriptor().to_string(),
        horizon,
        mode: mode.name().to_string(),
        walkers: if mode == RunMode::MonteCarlo { walkers } else { None },
        seed: if mode == RunMode::MonteCarlo { seed } else { None },
        state_cap: family.cap(),
        rng_algorithm: RNG_ALGORITHM.to_string(),
        timestamp_unix: timestamp(),
    };
    std::fs::create_dir_all(&out_dir)?;
    std::fs::write(out_dir.join("series.csv"), series.to_csv())?;
    std::fs::write(
        out_dir.join("meta.json"),
        format!("{}\n", serde_json::to_string_pretty(&meta).unwrap()),
    )?;
    Ok(0)
}

fn cmd_stationary(args: StationaryArgs) -> Result<i32> {
    let cfg = match &args.config {
        Some(path) => load_config(path, "stationary")?,
        None => HashMap::new(),
    };
    let family_desc = required(merge(args.family, &cfg, "family", |s| Ok(s.to_string()))?, "family")?;
    let n_min = merge(args.n_min, &cfg, "n-min", parse_u32)?.unwrap_or(1);
    let n_max = required(merge(args.n_max, &cfg, "n-max", parse_u32)?, "n-max")?;
    let cap = merge(args.cap, &cfg, "cap", parse_u64)?;
    let out = merge(args.out, &cfg, "out", |s| Ok(PathBuf::from(s)))?;
    let family = family_with_cap(&family_desc, cap)?;

    let mut csv = String::from("n,p_closed,p_numeric,lower,upper\n");
    for n in n_min..=n_max {
        let p_closed = p_origin_closed(&family, n).map(|v| v.to_string()).unwrap_or_default();
        // The numeric column is an independent fixed-point computation on
        // the lumped chain where one exists, the full chain otherwise.
        let (idx, p) =
            if family.lumpable() { family.build_lumped::<f64>(n)? } else { family.build::<f64>(n)? };
        let p_numeric = if family.is_busy() {
            even_stationary_numeric(&p, idx.parities(), NumericStart::UniformEven, 1e-13, 5_000_000)?
                .p_origin
                .to_string()
        } else {
            String::new()
        };
        let (lower, upper) = match p_bounds(&family, n) {
            Ok((lo, hi)) => (lo.to_string(), hi.to_string()),
            Err(_) => (String::new(), String::new()),
        };
        csv.push_str(&format!("{n},{p_closed},{p_numeric},{lower},{upper}\n"));
    }
    write_or_print(&out, &csv)?;
    Ok(0)
}

fn cmd_mixing(args: MixingArgs) -> Result<i32> {
    let cfg = match &args.config {
        Some(path) => load_config(path, "mixing")?,
        None => HashMap::new(),
    };
    let family_desc = required(merge(args.family, &cfg, "family", |s| Ok(s.to_string()))?, "family")?;
    let n_min = merge(args.n_min, &cfg, "n-min", parse_u32)?.unwrap_or(1);
    let n_max = required(merge(args.n_max, &cfg, "n-max", parse_u32)?, "n-max")?;
    let epsilon = merge(args.epsilon, &cfg, "epsilon", parse_f64)?.unwrap_or(0.01);
    let out = merge(args.out, &cfg, "out", |s| Ok(PathBuf::from(s)))?;
    let family = TransitionFamily::parse(&family_desc)?;

    let constants = MixingConstants::default();
    let mut csv = String::from("n,epsilon,measured,bound\n");
    for n in n_min..=n_max {
        let estimate = mixing_estimate(&family, n, epsilon, constants, 10_000_000)?;
        let bound = estimate.bound.map(|v| v.to_string()).unwrap_or_default();
        csv.push_str(&format!("{n},{epsilon},{},{bound}\n", estimate.measured));
    }
    write_or_print(&out, &csv)?;
    Ok(0)
}

#[derive(Serialize)]
struct ClassifyOutput<'a> {
    family: &'a str,
    schedule: &'a str,
    #[serde(flatten)]
    verdict: rwogg_core::analysis::RecurrenceVerdict,
}

fn cmd_classify(args: ClassifyArgs) -> Result<i32> {
    let cfg = match &args.config {
        Some(path) => load_config(path, "classify")?,
        None => HashMap::new(),
    };
    let family_desc = required(merge(args.family, &cfg, "family", |s| Ok(s.to_string()))?, "family")?;
    let schedule_desc =
        required(merge(args.schedule, &cfg, "schedule", |s| Ok(s.to_string()))?, "schedule")?;
    let out = merge(args.out, &cfg, "out", |s| Ok(PathBuf::from(s)))?;
    let family = TransitionFamily::parse(&family_desc)?;
    let schedule = DurationSchedule::parse(&schedule_desc)?;
    let verdict = classify(&family, &schedule);
    let output = ClassifyOutput { family: &family_desc, schedule: schedule.descriptor(), verdict };
    let json = format!("{}\n", serde_json::to_string_pretty(&output).unwrap());
    write_or_print(&out, &json)?;
    Ok(0)
}

fn cmd_lhagg(args: LhaggArgs) -> Result<i32> {
    let cfg = match &args.config {
        Some(path) => load_config(path, "lhagg")?,
        None => HashMap::new(),
    };
    let family_desc = required(merge(args.family, &cfg, "family", |s| Ok(s.to_string()))?, "family")?;
    let f_desc = required(merge(args.f, &cfg, "f", |s| Ok(s.to_string()))?, "f")?;
    let g_desc = required(merge(args.g, &cfg, "g", |s| Ok(s.to_string()))?, "g")?;
    let horizon = required(merge(args.horizon, &cfg, "horizon", parse_u64)?, "horizon")?;
    let mode = merge(args.mode, &cfg, "mode", |s| Ok(s.to_string()))?.unwrap_or_else(|| "exact".into());
    let trials = merge(args.trials, &cfg, "trials", parse_u64)?.unwrap_or(10_000);
    let seed = merge(args.seed, &cfg, "seed", parse_u64)?.unwrap_or(0);
    let tolerance = merge(args.tolerance, &cfg, "tolerance", parse_f64)?.unwrap_or(1e-12);
    let out = merge(args.out, &cfg, "out", |s| Ok(PathBuf::from(s)))?;

    let family = TransitionFamily::parse(&family_desc)?;
    let fast = DurationSchedule::parse(&f_desc)?;
    let slow = DurationSchedule::parse(&g_desc)?;
    let (report, trace) = match mode.as_str() {
        "exact" => (verify_lhagg_exact(&family, &fast, &slow, horizon, tolerance)?, None),
        "sim" => {
            let coupling = if args.broken { CouplingMode::Broken } else { CouplingMode::Monotone };
            verify_coupling_sim(&family, &fast, &slow, horizon, trials, seed, coupling)?
        }
        other => return Err(Error::InvalidDescriptor(format!("lhagg mode `{other}`"))),
    };
    let json = format!("{}\n", serde_json::to_string_pretty(&report).unwrap());
    write_or_print(&out, &json)?;
    if let (Some(trace), Some(path)) = (&trace, &out) {
        std::fs::write(path.with_extension("trace.csv"), trace.to_csv())?;
    }
    Ok(if report.pass { 0 } else { 1 })
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|v| parse_f64(v.trim())).collect()
}

fn cmd_sweep(args: SweepArgs) -> Result<i32> {
    let cfg = match &args.config {
        Some(path) => load_config(path, "sweep")?,
        None => HashMap::new(),
    };
    let families_raw =
        required(merge(args.families, &cfg, "families", |s| Ok(s.to_string()))?, "families")?;
    let bases = merge(args.base, &cfg, "base", |s| Ok(s.to_string()))?.unwrap_or_else(|| "2".into());
    let a_list = merge(args.a, &cfg, "a", |s| Ok(s.to_string()))?.unwrap_or_else(|| "1".into());
    let b_list = merge(args.b, &cfg, "b", |s| Ok(s.to_string()))?.unwrap_or_else(|| "0".into());
    let horizon = merge(args.horizon, &cfg, "horizon", parse_u64)?.unwrap_or(2000);
    let cap = merge(args.cap, &cfg, "cap", parse_u64)?;
    let jobs = merge(args.jobs, &cfg, "jobs", |s| {
        s.parse().map_err(|_| Error::InvalidDescriptor(format!("integer `{s}`")))
    })?
    .unwrap_or(1);
    let out = merge(args.out, &cfg, "out", |s| Ok(PathBuf::from(s)))?;

    let families: Vec<String> =
        families_raw.split(';').map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect();
    let bases = parse_list(&bases)?;
    let a_values = parse_list(&a_list)?;
    let b_values = parse_list(&b_list)?;

    let mut cells = Vec::new();
    for family in &families {
        for &base in &bases {
            for &a in &a_values {
                for &b in &b_values {
                    cells.push((family.clone(), base, a, b));
                }
            }
        }
    }

    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.max(1))
        .build()
        .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    let rows: Vec<String> = pool.install(|| {
        use rayon::prelude::*;
        cells
            .par_iter()
            .map(|(family_desc, base, a, b)| sweep_cell(family_desc, *base, *a, *b, horizon, cap))
            .collect()
    });

    let mut csv =
        String::from("family_params,schedule_params,verdict,S_at_last_phase,phases_computed,error\n");
    for row in rows {
        csv.push_str(&row);
    }
    write_or_print(&out, &csv)?;
    Ok(0)
}

fn csv_quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn sweep_cell(family_desc: &str, base: f64, a: f64, b: f64, horizon: u64, cap: Option<u64>) -> String {
    let schedule_params = format!("base={base},a={a},b={b}");
    let schedule_desc = format!("symbolic:{schedule_params}");
    let run = || -> Result<(String, f64, u32)> {
        let family = family_with_cap(family_desc, cap)?;
        let schedule = DurationSchedule::parse(&schedule_desc)?;
        let verdict = classify(&family, &schedule);
        let mode = if family.lumpable() { EvolutionMode::Lumped } else { EvolutionMode::Full };
        let series: ReturnSeries<f64> = run_exact(&family, &schedule, horizon, mode)?;
        let (phases, s_last) = match series.boundaries.last() {
            Some(&(n, t)) => (n, series.s[t as usize]),
            None => (0, *series.s.last().unwrap()),
        };
        Ok((format!("{:?}", verdict.verdict), s_last, phases))
    };
    match run() {
        Ok((verdict, s_last, phases)) => format!(
            "{},{},{verdict},{s_last},{phases},\n",
            csv_quote(family_desc),
            csv_quote(&schedule_params)
        ),
        Err(e) => format!(
            "{},{},,,,{}\n",
            csv_quote(family_desc),
            csv_quote(&schedule_params),
            csv_quote(&e.to_string())
        ),
    }
}
