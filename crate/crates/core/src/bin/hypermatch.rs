use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use hypermatch::absorbing::{perfect_via_absorbing, AbsorbConfig, PerfectConfig};
use hypermatch::augment::{self, AugmentConfig};
use hypermatch::constructions::{bde_extremal, extremal_star, h_n_d, perturb_remove, random_hypergraph};
use hypermatch::exact::{max_matching, SolveBudget, SolveReport, DEFAULT_NODE_LIMIT};
use hypermatch::extremal::{find_partition, staged_matching, FindMode, Seeding, StagedConfig};
use hypermatch::format::{read_h3, read_meta, sidecar_path, to_h3_string, InstanceMeta, GENERATOR_VERSION, INSTANCE_SCHEMA};
use hypermatch::harness::{init_thread_pool, sweep, verify_thresholds, verify_tightness, write_sweep_csv, SweepConfig};
use hypermatch::link::verify_fact1;
use hypermatch::{Error, Hypergraph3, Matching, Partition};

const EXIT_ASSERTION: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

#[derive(Parser)]
#[command(name = "hypermatch", version, about = "Matchings in 3-uniform hypergraphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate an instance as .h3 plus a .json sidecar.
    Gen(GenArgs),
    /// Degree and codegree profile of an instance.
    Degrees {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Find a large matching.
    Solve(SolveArgs),
    /// Best partition found against H_(n,d) and the per-vertex badness.
    Closeness(ClosenessArgs),
    /// Run a verification suite.
    Verify(VerifyArgs),
    /// Random instances over a grid of edge probabilities, as CSV.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Star,
    Hnd,
    Bde,
    Random,
}

#[derive(Args)]
struct GenArgs {
    kind: Kind,
    #[arg(long)]
    n: usize,
    #[arg(long)]
    d: Option<usize>,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Delete this many random edges afterwards.
    #[arg(long, default_value_t = 0)]
    remove: usize,
    /// Output .h3 path; the sidecar goes next to it. Prints to stdout if absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(id = "method", multiple = false)]
struct MethodFlags {
    #[arg(long, group = "method")]
    exact: bool,
    #[arg(long, group = "method")]
    augment: bool,
    #[arg(long, group = "method")]
    extremal: bool,
    #[arg(long, group = "method")]
    absorbing: bool,
}

#[derive(Args)]
struct BudgetArgs {
    #[arg(long, default_value_t = DEFAULT_NODE_LIMIT)]
    budget_nodes: u64,
    #[arg(long)]
    budget_ms: Option<u64>,
}

impl BudgetArgs {
    fn budget(&self) -> SolveBudget {
        let b = SolveBudget::default().with_node_limit(self.budget_nodes);
        match self.budget_ms {
            Some(ms) => b.with_time_limit(Duration::from_millis(ms)),
            None => b,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Exhaustive,
    Local,
    /// Local search seeded from bottom vertices of a large matching.
    Bottom,
}

impl From<Mode> for FindMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Exhaustive => FindMode::Exhaustive,
            Mode::Local => FindMode::Local(Seeding::Degree),
            Mode::Bottom => FindMode::Local(Seeding::BottomVertices),
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    method: MethodFlags,
    input: PathBuf,
    /// Target matching size; defaults to floor(n/3).
    #[arg(long)]
    d: Option<usize>,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long, default_value_t = 5)]
    k_max: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 0.5)]
    gamma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Partition search used by --extremal and --explain.
    #[arg(long, value_enum, default_value_t = Mode::Local)]
    mode: Mode,
    /// On a stall, report the closest H_(n,d) partition found.
    #[arg(long)]
    explain: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ClosenessArgs {
    input: PathBuf,
    #[arg(long)]
    d: usize,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = Mode::Local)]
    mode: Mode,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Fact1,
    Tightness,
    Thresholds,
}

#[derive(Args)]
struct VerifyArgs {
    suite: Suite,
    #[arg(long, default_value_t = 15)]
    n_max: usize,
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    n: usize,
    /// Defaults to floor(n/3).
    #[arg(long)]
    d: Option<usize>,
    #[arg(long, default_value_t = 10)]
    trials: usize,
    /// Comma-separated edge probabilities.
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9])]
    p: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    k_max: usize,
    #[command(flatten)]
    budget: BudgetArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn emit_text(text: &str, out: Option<&Path>) -> hypermatch::Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn emit_json<T: Serialize>(value: &T, out: Option<&Path>) -> hypermatch::Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    emit_text(&text, out)
}

fn require<T>(value: Option<T>, flag: &str, kind: &str) -> hypermatch::Result<T> {
    value.ok_or_else(|| Error::InvalidArgument(format!("{kind} needs --{flag}")))
}

fn gen(args: &GenArgs) -> hypermatch::Result<u8> {
    let (name, mut h, partition, d) = match args.kind {
        Kind::Star => {
            let (h, p) = extremal_star(args.n)?;
            ("star", h, Some(p), Some(args.n / 3))
        }
        Kind::Hnd => {
            let d = require(args.d, "d", "hnd")?;
            let (h, p) = h_n_d(args.n, d, None)?;
            ("hnd", h, Some(p), Some(d))
        }
        Kind::Bde => {
            let d = require(args.d, "d", "bde")?;
            let (h, p) = bde_extremal(args.n, d)?;
            ("bde", h, Some(p), Some(d))
        }
        Kind::Random => {
            let p = require(args.p, "p", "random")?;
            ("random", random_hypergraph(args.n, p, args.seed)?, None, args.d)
        }
    };
    if args.remove > 0 {
        h = perturb_remove(&h, args.remove, args.seed)?;
    }
    let meta = InstanceMeta {
        schema: INSTANCE_SCHEMA.into(),
        generator: GENERATOR_VERSION.into(),
        kind: name.into(),
        n: h.n(),
        edges: h.edge_count(),
        d,
        p: args.p.filter(|_| matches!(args.kind, Kind::Random)),
        seed: (matches!(args.kind, Kind::Random) || args.remove > 0).then_some(args.seed),
        removed: args.remove,
        partition,
    };
    emit_text(&to_h3_string(&h), args.out.as_deref())?;
    if let Some(path) = &args.out {
        emit_json(&meta, Some(&sidecar_path(path)))?;
    }
    Ok(0)
}

fn stored_partition(input: &Path, d: usize) -> Option<Partition> {
    let meta = read_meta(&sidecar_path(input)).ok()?;
    meta.partition.filter(|p| p.w_size() == d)
}

fn solve(args: &SolveArgs) -> hypermatch::Result<u8> {
    let h = read_h3(&args.input)?;
    let d = args.d.unwrap_or(h.n() / 3);
    let m = &args.method;
    let aug_cfg = AugmentConfig {
        k_max: args.k_max,
        seed: args.seed,
        ..Default::default()
    };
    let mut code = 0;
    let mut extra = serde_json::Map::new();
    let report: SolveReport = if m.augment {
        let (report, trace) = augment::solve(&h, d, &aug_cfg)?;
        extra.insert("moves".into(), serde_json::to_value(&trace.moves)?);
        report
    } else if m.extremal {
        let closeness = match stored_partition(&args.input, d) {
            Some(p) => hypermatch::extremal::classify_goodness(&h, &p, args.alpha)?,
            None => find_partition(&h, d, args.mode.into(), args.alpha)?,
        };
        let cfg = StagedConfig {
            alpha: args.alpha,
            node_limit: args.budget.budget_nodes,
            ..Default::default()
        };
        let outcome = staged_matching(&h, &closeness.partition, d, &cfg)?;
        let mut report = SolveReport::new("extremal", h.n(), outcome.matching.clone().unwrap_or_default());
        report.optimal = outcome.matching.is_some();
        report.failure = outcome
            .stall
            .as_ref()
            .map(|s| format!("stage {}: {}", s.stage, s.reason));
        extra.insert("stages".into(), serde_json::to_value(&outcome.log)?);
        extra.insert("closeness".into(), serde_json::to_value(&closeness)?);
        report
    } else if m.absorbing {
        let cfg = PerfectConfig {
            absorb: AbsorbConfig {
                gamma: args.gamma,
                seed: args.seed,
                ..Default::default()
            },
            augment: aug_cfg,
        };
        let (report, absorbing) = perfect_via_absorbing(&h, &cfg)?;
        extra.insert("absorbing".into(), serde_json::to_value(&absorbing)?);
        report
    } else {
        let report = max_matching(&h, &args.budget.budget());
        if !report.optimal {
            code = EXIT_BUDGET;
        }
        report
    };
    if args.explain && report.failure.is_some() && d <= h.n() {
        let closeness = find_partition(&h, d, args.mode.into(), args.alpha)?;
        extra.insert("explain".into(), serde_json::to_value(&closeness)?);
    }
    Matching::new(&h, report.matching.clone())?;
    let mut value = serde_json::to_value(&report)?;
    if let Value::Object(map) = &mut value {
        map.extend(extra);
    }
    emit_json(&value, args.out.as_deref())?;
    Ok(code)
}

fn verify(args: &VerifyArgs) -> hypermatch::Result<u8> {
    let (value, ok) = match args.suite {
        Suite::Fact1 => {
            let r = verify_fact1();
            (serde_json::to_value(&r)?, r.ok())
        }
        Suite::Tightness => {
            let r = verify_tightness(args.n_max, &args.budget.budget())?;
            if r.rows.iter().any(|row| !row.optimal) {
                emit_json(&r, args.out.as_deref())?;
                return Ok(EXIT_BUDGET);
            }
            (serde_json::to_value(&r)?, r.ok)
        }
        Suite::Thresholds => (serde_json::to_value(verify_thresholds(args.n, args.d)?)?, true),
    };
    emit_json(&value, args.out.as_deref())?;
    Ok(if ok { 0 } else { EXIT_ASSERTION })
}

fn run_sweep(args: &SweepArgs) -> hypermatch::Result<u8> {
    let cfg = SweepConfig {
        n: args.n,
        d: args.d.unwrap_or(args.n / 3),
        trials: args.trials,
        p_grid: args.p.clone(),
        seed: args.seed,
        budget: args.budget.budget(),
        augment: AugmentConfig {
            k_max: args.k_max,
            ..Default::default()
        },
    };
    let rows = sweep(&cfg)?;
    let mut buf = Vec::new();
    write_sweep_csv(&rows, &mut buf)?;
    emit_text(&String::from_utf8_lossy(&buf), args.out.as_deref())?;
    Ok(0)
}

fn run(cli: Cli) -> hypermatch::Result<u8> {
    init_thread_pool()?;
    match cli.command {
        Command::Gen(args) => gen(&args),
        Command::Degrees { input, out } => {
            let h: Hypergraph3 = read_h3(&input)?;
            emit_json(&json!({"schema": "hypermatch.degrees.v1", "profile": h.degree_profile()}), out.as_deref())?;
            Ok(0)
        }
        Command::Solve(args) => solve(&args),
        Command::Closeness(args) => {
            let h = read_h3(&args.input)?;
            let r = find_partition(&h, args.d, args.mode.into(), args.alpha)?;
            emit_json(&r, args.out.as_deref())?;
            Ok(0)
        }
        Command::Verify(args) => verify(&args),
        Command::Sweep(args) => run_sweep(&args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hypermatch: {e}");
            ExitCode::from(match e {
                Error::InvalidMatching(_) | Error::Absorption(_) => EXIT_ASSERTION,
                _ => EXIT_USAGE,
            })
        }
    }
}
