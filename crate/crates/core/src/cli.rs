//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 for unreadable or invalid input data, 2 for
//! usage errors.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::instance::{Instance, ParseError};
use crate::oracle::exact_optimum;
use crate::registry::Registry;
use crate::solver::{run_batch_with_backbones, BatchSummary, Mode, Params, SolveError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_DATA: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "banditlk", version, about = "TSP solver: k-opt local search with a bandit over candidate orderings")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve one instance, possibly over several seeded runs.
    Solve(SolveArgs),
    /// Run every instance of a registry under one or more modes.
    Bench(BenchArgs),
    /// Exact optimum of a tiny instance by exhaustive search.
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SearchArgs {
    /// mabb, lkh or fixed-w=X with X in [0, 1].
    #[arg(long, default_value = "mabb")]
    pub mode: Mode,
    /// Trials per run; defaults to the number of cities.
    #[arg(long)]
    pub max_trials: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Warm-up trials before the bandit starts.
    #[arg(long, default_value_t = 100)]
    pub bs: usize,
    #[arg(long, default_value_t = 5)]
    pub arms: usize,
    #[arg(long, default_value_t = 0.06)]
    pub step_size: f64,
    #[arg(long, default_value_t = 20.0)]
    pub ucb_c: f64,
    #[arg(long, default_value_t = 0.998)]
    pub gamma: f64,
    /// Candidate list size.
    #[arg(long, default_value_t = 5)]
    pub candidates: usize,
    /// Maximum move depth.
    #[arg(long, default_value_t = 5)]
    pub kmax: usize,
    /// Require every partial move to close into a tour.
    #[arg(long)]
    pub strict: bool,
    /// Disable chaining of non-improving moves.
    #[arg(long)]
    pub no_chain: bool,
    /// Allow moves to start by removing best-tour edges.
    #[arg(long)]
    pub no_restrict: bool,
    /// Worker threads for independent runs; 0 uses every core.
    #[arg(long, default_value_t = 1)]
    pub jobs: usize,
    /// Write results as JSON.
    #[arg(long)]
    pub json: Option<PathBuf>,
}

impl SearchArgs {
    fn params(&self, mode: Mode) -> Params {
        Params {
            max_trials: self.max_trials,
            bs: self.bs,
            arms: self.arms,
            step_size: self.step_size,
            ucb_c: self.ucb_c,
            gamma: self.gamma,
            candidate_size: self.candidates,
            k_max: self.kmax,
            strict: self.strict,
            chain: !self.no_chain,
            restricted: !self.no_restrict,
            seed: self.seed,
            mode,
            optimum: None,
            trace: false,
        }
    }
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[arg(long)]
    pub instance: PathBuf,
    /// Known optimum; runs stop once it is reached.
    #[arg(long)]
    pub optimum: Option<i64>,
    /// Registry to look up the optimum by instance name.
    #[arg(long)]
    pub registry: Option<PathBuf>,
    /// Per-trial bandit records as CSV.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Backbone counts of the first run, one `i j count` line per edge.
    #[arg(long)]
    pub backbone_dump: Option<PathBuf>,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub registry: PathBuf,
    /// Comma-separated modes to compare; overrides --mode.
    #[arg(long, value_delimiter = ',')]
    pub modes: Vec<Mode>,
    #[command(flatten)]
    pub search: SearchArgs,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub instance: PathBuf,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Data(String),
}

impl From<SolveError> for Failure {
    fn from(e: SolveError) -> Self {
        match e {
            SolveError::InvalidParam(_) => Failure::Usage(e.to_string()),
            _ => Failure::Data(e.to_string()),
        }
    }
}

fn io_failure(path: &Path, e: impl std::fmt::Display) -> Failure {
    Failure::Data(format!("{}: {e}", path.display()))
}

/// Parses `args` (program name first) and runs the command, writing reports to
/// `out`. Returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match &cli.command {
        Command::Solve(a) => cmd_solve(a, out),
        Command::Bench(a) => cmd_bench(a, out),
        Command::Oracle(a) => cmd_oracle(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(m)) => {
            eprintln!("error: {m}");
            EXIT_USAGE
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            EXIT_DATA
        }
    }
}

fn load_instance(path: &Path) -> Result<Instance, Failure> {
    Instance::load(path).map_err(|e| match e {
        ParseError::Io { .. } => Failure::Data(e.to_string()),
        _ => io_failure(path, e),
    })
}

fn header(out: &mut dyn Write) -> io::Result<()> {
    writeln!(
        out,
        "{:<12} {:<12} {:>7} {:>10} {:>12} {:>9} {:>8} {:>9}",
        "instance", "mode", "success", "best", "average", "gap%", "trials", "time(s)"
    )
}

fn row(out: &mut dyn Write, s: &BatchSummary) -> io::Result<()> {
    let success = match s.successes {
        Some(k) => format!("{k}/{}", s.runs),
        None => "-".into(),
    };
    let gap = s.gap().map_or("-".into(), |g| format!("{:.4}", 100.0 * g));
    writeln!(
        out,
        "{:<12} {:<12} {:>7} {:>10} {:>12.1} {:>9} {:>8.1} {:>9.2}",
        s.instance,
        s.mode.to_string(),
        success,
        s.best,
        s.average,
        gap,
        s.mean_trials,
        s.mean_time
    )
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), Failure> {
    let f = File::create(path).map_err(|e| io_failure(path, e))?;
    serde_json::to_writer_pretty(BufWriter::new(f), value).map_err(|e| io_failure(path, e))
}

fn write_trace(path: &Path, summary: &BatchSummary, arms: usize) -> Result<(), Failure> {
    let mut w = csv::Writer::from_path(path).map_err(|e| io_failure(path, e))?;
    let mut head = vec!["run".to_string(), "trial".into(), "arm".into(), "w".into(), "reward".into()];
    head.extend((0..arms).map(|i| format!("v{i}")));
    w.write_record(&head).map_err(|e| io_failure(path, e))?;
    for (run, r) in summary.results.iter().enumerate() {
        for rec in r.bandit_trace.iter().flatten() {
            let mut fields = vec![
                run.to_string(),
                rec.trial.to_string(),
                rec.arm.to_string(),
                rec.w.to_string(),
                rec.reward.to_string(),
            ];
            fields.extend(rec.values.iter().map(|v| v.to_string()));
            w.write_record(&fields).map_err(|e| io_failure(path, e))?;
        }
    }
    w.flush().map_err(|e| io_failure(path, e))
}

fn cmd_solve(a: &SolveArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let mut params = a.search.params(a.search.mode);
    params.validate()?;
    let inst = load_instance(&a.instance)?;
    params.optimum = match (a.optimum, &a.registry) {
        (Some(o), _) => Some(o),
        (None, Some(reg)) => Registry::load(reg)
            .map_err(|e| Failure::Data(e.to_string()))?
            .optimum_of(inst.name()),
        (None, None) => None,
    };
    params.trace = a.trace.is_some();
    let (summary, backbones) = run_batch_with_backbones(&inst, &params, a.search.runs, a.search.jobs)?;
    header(out).and_then(|_| row(out, &summary)).map_err(|e| Failure::Data(e.to_string()))?;
    if let Some(p) = &a.search.json {
        write_json(p, &summary)?;
    }
    if let Some(p) = &a.trace {
        write_trace(p, &summary, params.arms)?;
    }
    if let Some(p) = &a.backbone_dump {
        let f = File::create(p).map_err(|e| io_failure(p, e))?;
        let mut w = BufWriter::new(f);
        backbones[0]
            .dump(&mut w)
            .and_then(|_| w.flush())
            .map_err(|e| io_failure(p, e))?;
    }
    Ok(())
}

/// Per-mode sum over instances of `(average - optimum) / optimum`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CumulativeGap {
    pub mode: Mode,
    pub gap: f64,
}

#[derive(Debug, Serialize)]
struct BenchReport<'a> {
    summaries: &'a [BatchSummary],
    cumulative_gap: &'a [CumulativeGap],
}

fn cmd_bench(a: &BenchArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let modes = if a.modes.is_empty() {
        vec![a.search.mode]
    } else {
        a.modes.clone()
    };
    for &m in &modes {
        a.search.params(m).validate()?;
    }
    let reg = Registry::load(&a.registry).map_err(|e| Failure::Data(e.to_string()))?;
    if reg.is_empty() {
        return Err(Failure::Usage(format!("registry {} has no entries", a.registry.display())));
    }
    let io = |e: io::Error| Failure::Data(e.to_string());
    header(out).map_err(io)?;
    let mut summaries = Vec::new();
    let mut gaps: Vec<CumulativeGap> = modes.iter().map(|&mode| CumulativeGap { mode, gap: 0.0 }).collect();
    for entry in reg.entries() {
        let inst = load_instance(&entry.path)?;
        for (k, &mode) in modes.iter().enumerate() {
            let mut params = a.search.params(mode);
            params.optimum = Some(entry.optimum);
            if let Some(mt) = entry.max_trials {
                params.max_trials = Some(mt);
            }
            let (s, _) = run_batch_with_backbones(&inst, &params, a.search.runs, a.search.jobs)?;
            row(out, &s).map_err(io)?;
            gaps[k].gap += s.gap().unwrap_or(0.0);
            summaries.push(s);
        }
    }
    writeln!(out).map_err(io)?;
    writeln!(out, "{:<12} {:>14}", "mode", "cumulative gap%").map_err(io)?;
    for g in &gaps {
        writeln!(out, "{:<12} {:>14.4}", g.mode.to_string(), 100.0 * g.gap).map_err(io)?;
    }
    if let Some(p) = &a.search.json {
        write_json(
            p,
            &BenchReport {
                summaries: &summaries,
                cumulative_gap: &gaps,
            },
        )?;
    }
    Ok(())
}

fn cmd_oracle(a: &OracleArgs, out: &mut dyn Write) -> Result<(), Failure> {
    let inst = load_instance(&a.instance)?;
    let r = exact_optimum(&inst).map_err(|e| Failure::Data(e.to_string()))?;
    let tour: Vec<String> = r.tour.iter().map(|c| (c + 1).to_string()).collect();
    writeln!(out, "optimum {}", r.length)
        .and_then(|_| writeln!(out, "tour {}", tour.join(" ")))
        .map_err(|e| Failure::Data(e.to_string()))
}
