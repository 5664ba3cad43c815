//! The `folksonomy` command-line front end.
//!
//! Every subcommand reads at most one trace and writes one machine-readable
//! result to standard output or `--output`. CSV and TSV results start with a
//! `# meta {json}` line and JSON results carry a `meta` object; both record
//! the tool version, the subcommand and the effective configuration. The
//! thread count is left out so output does not depend on it.
//!
//! Exit codes: 0 on success, 1 on usage or input errors, 2 on internal
//! failures (including failed writes to the output sink).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::activity::{correlation_r2, fit_hoerl, rank_distribution, user_metric, ActivityMetric, HoerlParams};
use crate::components::{threshold_sweep, write_sweep_csv};
use crate::entropy::{
    average_neighborhood_entropy, entropy_timeline, write_neighborhood_csv, write_timeline_csv, NeighborhoodMode,
    PopularityMode,
};
use crate::graph::{build_graph, SimilarityKind};
use crate::ingest::{clean_records, intern_records, parse_trace, write_trace, CleaningConfig, ParseMode, RawRecord};
use crate::model::Community;
use crate::predict::hit_ratio;
use crate::threshold::Threshold;
use crate::urn::{generate_records, urn_run, write_trajectory_csv, SyntheticTraceConfig, UrnState};

const TOOL: &str = "folksonomy";

#[derive(Debug, Parser)]
#[command(name = TOOL, version, about = "Measure and simulate collaborative-tagging communities")]
struct Cli {
    /// Worker threads for parallel stages (default: all cores).
    #[arg(long, global = true, value_parser = clap::value_parser!(u16).range(1..))]
    threads: Option<u16>,

    /// Write the result here instead of standard output.
    #[arg(short, long, global = true)]
    output: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Drop robot users, reserved-tag-only users and early records.
    Clean(CleanArgs),
    /// Per-user activity rank distribution, optionally with a Hoerl fit.
    Stats(StatsArgs),
    /// Component counts of the interest graph across a threshold ladder.
    Sweep(SweepArgs),
    /// Item-popularity entropy over time.
    Entropy(EntropyArgs),
    /// Average neighborhood entropy and its random baselines.
    NeighEntropy(NeighEntropyArgs),
    /// Hit ratio of neighbor-based prediction.
    Predict(PredictArgs),
    /// Generate a synthetic trace.
    Generate(GenerateArgs),
    /// Run a single Pólya urn.
    Urn(UrnArgs),
}

#[derive(Debug, Args, Serialize)]
struct InputArgs {
    /// Trace file (TSV: user, item, tag, timestamp), or `-` for stdin.
    input: PathBuf,

    /// Skip malformed lines instead of failing.
    #[arg(long)]
    lenient: bool,
}

#[derive(Debug, Args, Serialize)]
struct CleanArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputArgs,

    /// Users whose every assignment uses one of these tags are dropped.
    #[arg(long, value_delimiter = ',', default_value = "no-tag,bibtex-import")]
    reserved_tags: Vec<String>,

    #[arg(long, default_value_t = 3000)]
    burst_count: usize,

    /// Seconds.
    #[arg(long, default_value_t = 300)]
    burst_window: u64,

    #[arg(long)]
    min_timestamp: Option<u64>,

    /// Also write the cleaning report as JSON to this file.
    #[arg(long)]
    #[serde(skip)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct StatsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputArgs,

    #[arg(long, default_value = "tag_assignments")]
    metric: ActivityMetric,

    /// Fit a Hoerl curve to the rank distribution.
    #[arg(long)]
    fit_hoerl: bool,

    /// Squared correlation between two per-user metrics, e.g. `library,vocabulary`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    correlate: Option<Vec<ActivityMetric>>,

    /// Also write the fit and correlation as JSON to this file.
    #[arg(long)]
    #[serde(skip)]
    report: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct SweepArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputArgs,

    #[arg(long, default_value = "user_item")]
    kind: SimilarityKind,

    #[arg(long, default_value = "0.01")]
    from: Threshold,

    #[arg(long, default_value = "0.99")]
    to: Threshold,

    #[arg(long, default_value = "0.01")]
    step: Threshold,
}

#[derive(Debug, Args, Serialize)]
struct EntropyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputArgs,

    /// Period length in seconds.
    #[arg(long, default_value_t = 604_800)]
    interval: u64,

    #[arg(long, default_value_t = 2.0)]
    log_base: f64,

    /// `distinct_users` or `assignments`.
    #[arg(long, default_value = "distinct_users")]
    popularity: PopularityMode,
}

#[derive(Debug, Args, Serialize)]
struct NeighEntropyArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputArgs,

    #[arg(long, default_value = "user_item")]
    kind: SimilarityKind,

    /// One or more thresholds, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.02,0.05,0.1")]
    threshold: Vec<Threshold>,

    /// One or more modes, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "interest_graph,largest_component_total,random_component,random_graph"
    )]
    mode: Vec<NeighborhoodMode>,

    #[arg(long, default_value_t = 30)]
    trials: usize,

    #[arg(long, default_value_t = 42)]
    seed: u64,

    #[arg(long, default_value_t = 2.0)]
    log_base: f64,
}

#[derive(Debug, Args, Serialize)]
struct PredictArgs {
    #[command(flatten)]
    #[serde(flatten)]
    input: InputArgs,

    #[arg(long, default_value = "user_item")]
    kind: SimilarityKind,

    #[arg(long, default_value = "0.01")]
    threshold: Threshold,

    /// Window length in seconds.
    #[arg(long, default_value_t = 3600)]
    granularity: u64,

    /// Use directed containment instead of Jaccard for `user_item`.
    #[arg(long)]
    directed: bool,
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[arg(long, default_value_t = 200)]
    users: usize,

    #[arg(long, default_value_t = 300)]
    items: usize,

    #[arg(long, default_value_t = 0.5)]
    copy_prob: f64,

    /// Assignments per user by activity rank, as `a,b,c`.
    #[arg(long, value_parser = parse_hoerl, default_value = "12,1,-0.2", allow_hyphen_values = true)]
    hoerl: HoerlParams,

    /// Number of tags; every item's urn starts with one ball per tag.
    #[arg(long, default_value_t = 40)]
    tags: usize,

    #[arg(long, default_value_t = 1_100_000_000)]
    start: u64,

    /// Seconds between consecutive assignments.
    #[arg(long, default_value_t = 60)]
    step: u64,

    #[arg(long, default_value_t = 42)]
    seed: u64,
}

#[derive(Debug, Args, Serialize)]
struct UrnArgs {
    /// Initial ball counts, one per color.
    #[arg(long, value_delimiter = ',', default_value = "1,1")]
    init: Vec<u64>,

    #[arg(long, default_value_t = 10_000)]
    steps: usize,

    #[arg(long, default_value_t = 42)]
    seed: u64,
}

fn parse_hoerl(s: &str) -> std::result::Result<HoerlParams, String> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| format!("cannot parse {p:?} as a number"))
        })
        .collect::<std::result::Result<_, _>>()?;
    let [a, b, c] = parts[..] else {
        return Err(format!("expected a,b,c but got {} values", parts.len()));
    };
    HoerlParams::new(a, b, c).map_err(|e| e.to_string())
}

#[derive(Debug)]
enum Failure {
    /// Bad input or configuration; exit 1.
    Input(String),
    /// Anything else; exit 2.
    Internal(String),
    /// The reader went away (e.g. `| head`); exit 0 quietly.
    Closed,
}

impl From<crate::error::Error> for Failure {
    fn from(e: crate::error::Error) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        if e.kind() == io::ErrorKind::BrokenPipe {
            return Failure::Closed;
        }
        Failure::Internal(format!("write failed: {e}"))
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        if e.io_error_kind() == Some(io::ErrorKind::BrokenPipe) {
            return Failure::Closed;
        }
        Failure::Internal(format!("serialization failed: {e}"))
    }
}

type Outcome = std::result::Result<(), Failure>;

/// Parses `args` (including the program name), runs the subcommand and
/// returns the process exit code. Diagnostics go to standard error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let rendered = e.to_string();
            let line = rendered
                .lines()
                .find(|l| !l.trim().is_empty())
                .unwrap_or("invalid arguments");
            eprintln!("{TOOL}: {}", line.trim_start_matches("error: "));
            return 1;
        }
    };
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(usize::from(n)).build() {
            Ok(pool) => pool.install(|| dispatch(&cli)),
            Err(e) => Err(Failure::Internal(format!("cannot start thread pool: {e}"))),
        },
        None => dispatch(&cli),
    };
    match result {
        Ok(()) | Err(Failure::Closed) => 0,
        Err(Failure::Input(msg)) => {
            eprintln!("{TOOL}: {msg}");
            1
        }
        Err(Failure::Internal(msg)) => {
            eprintln!("{TOOL}: internal error: {msg}");
            2
        }
    }
}

fn dispatch(cli: &Cli) -> Outcome {
    let mut out = open_output(cli.output.as_ref())?;
    match &cli.command {
        Command::Clean(a) => clean_cmd(a, &mut out)?,
        Command::Stats(a) => stats_cmd(a, &mut out)?,
        Command::Sweep(a) => sweep_cmd(a, &mut out)?,
        Command::Entropy(a) => entropy_cmd(a, &mut out)?,
        Command::NeighEntropy(a) => neigh_entropy_cmd(a, &mut out)?,
        Command::Predict(a) => predict_cmd(a, &mut out)?,
        Command::Generate(a) => generate_cmd(a, &mut out)?,
        Command::Urn(a) => urn_cmd(a, &mut out)?,
    }
    out.flush()?;
    Ok(())
}

fn open_output(path: Option<&PathBuf>) -> std::result::Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => {
            let f = File::create(p).map_err(|e| Failure::Input(format!("cannot create {}: {e}", p.display())))?;
            Box::new(BufWriter::new(f))
        }
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn read_records(input: &InputArgs) -> std::result::Result<Vec<RawRecord>, Failure> {
    let reader: Box<dyn BufRead> = if input.input.as_os_str() == "-" {
        Box::new(io::stdin().lock())
    } else {
        let f = File::open(&input.input)
            .map_err(|e| Failure::Input(format!("cannot open {}: {e}", input.input.display())))?;
        Box::new(BufReader::new(f))
    };
    let mode = if input.lenient {
        ParseMode::Lenient
    } else {
        ParseMode::Strict
    };
    let parsed = parse_trace(reader, mode).map_err(|e| Failure::Input(format!("{}: {e}", input.input.display())))?;
    Ok(parsed.records)
}

fn read_community(input: &InputArgs) -> std::result::Result<Community, Failure> {
    let records = read_records(input)?;
    let (assignments, labels) = intern_records(&records);
    let c = Community::with_labels(assignments, labels);
    if c.is_empty() {
        return Err(Failure::Input(format!(
            "{}: trace has no records",
            input.input.display()
        )));
    }
    Ok(c)
}

fn meta(subcommand: &str, config: &impl Serialize) -> std::result::Result<Value, Failure> {
    Ok(json!({
        "tool": TOOL,
        "version": env!("CARGO_PKG_VERSION"),
        "subcommand": subcommand,
        "config": serde_json::to_value(config)?,
    }))
}

fn write_comment(out: &mut dyn Write, key: &str, value: &Value) -> Outcome {
    writeln!(out, "# {key} {}", serde_json::to_string(value)?)?;
    Ok(())
}

fn write_json_file(path: &PathBuf, value: &Value) -> Outcome {
    let text = serde_json::to_string_pretty(value)?;
    std::fs::write(path, text + "\n").map_err(|e| Failure::Input(format!("cannot write {}: {e}", path.display())))
}

fn clean_cmd(a: &CleanArgs, out: &mut dyn Write) -> Outcome {
    let config = CleaningConfig {
        reserved_tags: a.reserved_tags.iter().map(|t| t.trim().to_owned()).collect(),
        burst_count: a.burst_count,
        burst_window: a.burst_window,
        min_timestamp: a.min_timestamp,
    };
    let records = read_records(&a.input)?;
    let (kept, report) = clean_records(&records, &config)?;
    let meta = meta("clean", a)?;
    let report = serde_json::to_value(&report)?;
    if let Some(path) = &a.report {
        write_json_file(path, &json!({ "meta": meta, "report": report }))?;
    }
    write_comment(out, "meta", &meta)?;
    write_comment(out, "report", &report)?;
    write_trace(out, &kept)?;
    Ok(())
}

fn stats_cmd(a: &StatsArgs, out: &mut dyn Write) -> Outcome {
    let c = read_community(&a.input)?;
    let dist = rank_distribution(&c, a.metric)?;
    let fit = if a.fit_hoerl { Some(fit_hoerl(&dist)?) } else { None };
    let correlation = match a.correlate.as_deref() {
        None => None,
        Some(&[x, y]) => {
            let xs: Vec<f64> = user_metric(&c, x).iter().map(|&(_, v)| v as f64).collect();
            let ys: Vec<f64> = user_metric(&c, y).iter().map(|&(_, v)| v as f64).collect();
            Some(json!({ "x": x, "y": y, "r2": correlation_r2(&xs, &ys)? }))
        }
        Some(other) => {
            return Err(Failure::Input(format!(
                "--correlate takes exactly two metrics, got {}",
                other.len()
            )))
        }
    };
    let meta = meta("stats", a)?;
    let fit = fit.map(|f| {
        json!({
            "a": f.params.a,
            "b": f.params.b,
            "c": f.params.c,
            "r2_log": f.r2_log,
            "n_points": f.n_points,
        })
    });
    if let Some(path) = &a.report {
        write_json_file(path, &json!({ "meta": meta, "fit": fit, "correlation": correlation }))?;
    }
    write_comment(out, "meta", &meta)?;
    if let Some(f) = &fit {
        write_comment(out, "fit", f)?;
    }
    if let Some(r) = &correlation {
        write_comment(out, "correlation", r)?;
    }
    writeln!(out, "rank,value,user")?;
    for p in &dist.points {
        writeln!(out, "{},{},{}", p.rank, p.value, c.labels().user_label(p.user))?;
    }
    Ok(())
}

fn sweep_cmd(a: &SweepArgs, out: &mut dyn Write) -> Outcome {
    let ladder = Threshold::ladder(a.from, a.to, a.step)?;
    if ladder.is_empty() {
        return Err(Failure::Input(format!(
            "empty threshold ladder from {} to {}",
            a.from, a.to
        )));
    }
    let c = read_community(&a.input)?;
    let rows = threshold_sweep(&c, a.kind, &ladder)?;
    write_comment(out, "meta", &meta("sweep", a)?)?;
    write_sweep_csv(out, &rows)?;
    Ok(())
}

fn entropy_cmd(a: &EntropyArgs, out: &mut dyn Write) -> Outcome {
    let c = read_community(&a.input)?;
    let points = entropy_timeline(&c, a.interval, a.log_base, a.popularity)?;
    write_comment(out, "meta", &meta("entropy", a)?)?;
    write_timeline_csv(out, &points)?;
    Ok(())
}

fn neigh_entropy_cmd(a: &NeighEntropyArgs, out: &mut dyn Write) -> Outcome {
    let c = read_community(&a.input)?;
    let mut reports = Vec::new();
    for &t in &a.threshold {
        let g = build_graph(&c, a.kind, t)?;
        for &mode in &a.mode {
            let r = average_neighborhood_entropy(&c, &g, mode, a.trials, a.seed, a.log_base)
                .map_err(|e| Failure::Input(format!("threshold {t}, mode {mode}: {e}")))?;
            reports.push(r);
        }
    }
    write_comment(out, "meta", &meta("neigh-entropy", a)?)?;
    write_neighborhood_csv(out, &reports)?;
    Ok(())
}

fn predict_cmd(a: &PredictArgs, out: &mut dyn Write) -> Outcome {
    let kind = match (a.directed, a.kind) {
        (false, k) => k,
        (true, SimilarityKind::UserItem | SimilarityKind::DirectedUserItem) => SimilarityKind::DirectedUserItem,
        (true, k) => return Err(Failure::Input(format!("--directed applies to user_item only, not {k}"))),
    };
    let c = read_community(&a.input)?;
    let report = hit_ratio(&c, kind, a.threshold, a.granularity)?;
    let doc = json!({ "meta": meta("predict", a)?, "report": report });
    serde_json::to_writer_pretty(&mut *out, &doc)?;
    writeln!(out)?;
    Ok(())
}

fn generate_cmd(a: &GenerateArgs, out: &mut dyn Write) -> Outcome {
    let cfg = SyntheticTraceConfig {
        num_users: a.users,
        num_items: a.items,
        assignments_per_user: a.hoerl,
        urn_init: UrnState::uniform(a.tags)?,
        copy_probability: a.copy_prob,
        start_time: a.start,
        time_step: a.step,
        seed: a.seed,
    };
    let records = generate_records(&cfg)?;
    let config = json!({
        "users": a.users,
        "items": a.items,
        "copy_prob": a.copy_prob,
        "hoerl": a.hoerl,
        "tags": a.tags,
        "start": a.start,
        "step": a.step,
        "seed": a.seed,
    });
    write_comment(out, "meta", &meta("generate", &config)?)?;
    write_trace(out, &records)?;
    Ok(())
}

fn urn_cmd(a: &UrnArgs, out: &mut dyn Write) -> Outcome {
    let init = UrnState::new(a.init.clone())?;
    let traj = urn_run(&init, a.steps, a.seed)?;
    write_comment(out, "meta", &meta("urn", a)?)?;
    write_trajectory_csv(out, &traj)?;
    Ok(())
}
