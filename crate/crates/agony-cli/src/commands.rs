//! The `agony` command line: argument parsing, dispatch, and output
//! rendering.
//!
//! Every subcommand prints one result document to stdout — JSON by default,
//! a flat `key,value` CSV (tables where the data is tabular) with
//! `--format csv` — and exits 0. All failures print a single-line JSON
//! object `{"error": ..., "kind": ...}` to stderr and exit nonzero, so
//! scripts can branch on the error class without parsing prose.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use agony_core::eval::AgonyExponent;
use agony_core::graph::DirectedGraph;
use agony_core::ranking::Ranking;
use agony_core::rsbm::{self, RsbmParams};
use agony_core::solve::{
    brute_force, iterated_agony, minimize_d0, minimize_d1, IterationOptions, SolveReport,
};
use agony_core::theory;
use anyhow::{bail, Context, Result};
use clap::builder::ArgGroup;
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::io::{load_edge_list, read_ranking_csv, save_edge_list, write_ranking_csv, LoadStats};
use crate::network::{class_table, run_real_network};
use crate::svg::{heatmap_grid_svg, heatmap_svg};
use crate::sweep::{run_sweep, SweepSpec};

/// Stdout rendering for command results.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    /// Pretty-printed JSON (default).
    Json,
    /// Flat `key,value` rows, or a real table where the result is tabular.
    Csv,
}

/// Top-level command line.
#[derive(Debug, Parser)]
#[command(
    name = "agony",
    version,
    about = "Detect ranking hierarchies in directed graphs by agony minimization"
)]
pub struct Cli {
    /// Master random seed (generation and sweeps).
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Worker threads for sweeps; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,

    /// Directory for output files; created if missing.
    #[arg(long, global = true, default_value = ".")]
    pub out_dir: PathBuf,

    /// Stdout format for the result document.
    #[arg(long, global = true, value_enum, default_value_t = OutputFormat::Json)]
    pub format: OutputFormat,

    /// What to run.
    #[command(subcommand)]
    pub command: Command,
}

/// Subcommands.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample a ranked stochastic block model graph and its planted ranking.
    Generate(GenerateArgs),
    /// Minimize agony on an edge list and write the detected ranking.
    Solve(SolveArgs),
    /// Evaluate a given ranking on a graph.
    Eval(EvalArgs),
    /// Compare two rankings: adjusted Rand index and confusion matrix.
    Compare(CompareArgs),
    /// First-order estimates: planted/optimal hierarchy, thresholds, curves.
    Theory(TheoryArgs),
    /// Monte Carlo sweep over the noise parameter s.
    Sweep(SweepArgs),
    /// Full pipeline on a real network file.
    Network(NetworkArgs),
}

/// Arguments for `agony generate`.
#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Forward probability to the adjacent class.
    #[arg(long)]
    pub p: Option<f64>,

    /// Forward probability beyond the adjacent class.
    #[arg(long)]
    pub q: Option<f64>,

    /// Backward/within probability (noise).
    #[arg(long)]
    pub s: Option<f64>,

    /// Number of classes (uniform sizes, with --n).
    #[arg(long)]
    pub r: Option<u32>,

    /// Nodes per class (uniform sizes, with --r).
    #[arg(long)]
    pub n: Option<u32>,

    /// Comma-separated class sizes; replaces --r/--n.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["r", "n"])]
    pub class_sizes: Option<Vec<u32>>,

    /// JSON parameter file {"p","q","s","R","n"|"class_sizes","seed"};
    /// replaces the individual flags. A "seed" entry overrides --seed.
    #[arg(long, conflicts_with_all = ["p", "q", "s", "r", "n", "class_sizes"])]
    pub params: Option<PathBuf>,

    /// Edge-list output file, relative to --out-dir.
    #[arg(long, default_value = "graph.txt")]
    pub graph_out: PathBuf,

    /// Planted-ranking CSV output file, relative to --out-dir.
    #[arg(long, default_value = "planted.csv")]
    pub ranking_out: PathBuf,
}

/// JSON parameter document accepted by `generate --params`.
#[derive(Debug, serde::Deserialize)]
#[serde(deny_unknown_fields)]
struct ParamsFile {
    p: f64,
    q: f64,
    s: f64,
    #[serde(rename = "R")]
    r: Option<u32>,
    n: Option<u32>,
    class_sizes: Option<Vec<u32>>,
    seed: Option<u64>,
}

/// Arguments for `agony solve`.
#[derive(Debug, Args)]
pub struct SolveArgs {
    /// Input edge-list file.
    #[arg(long)]
    pub input: PathBuf,

    /// Agony exponent. The fast solvers cover 0 and 1; any d >= 0 works
    /// with --oracle.
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub d: f64,

    /// Exhaustive search over ordered set partitions: exact for every d,
    /// but limited to very small graphs.
    #[arg(long)]
    pub oracle: bool,

    /// Refine each detected class by solving its induced subgraph.
    #[arg(long, conflicts_with = "oracle")]
    pub iterate: bool,

    /// Number of solved levels (with --iterate).
    #[arg(long, default_value_t = 2)]
    pub depth: u32,

    /// Smallest class worth refining (with --iterate).
    #[arg(long, default_value_t = 3)]
    pub min_class_size: u32,

    /// Minimum subclasses for an accepted refinement (with --iterate).
    #[arg(long, default_value_t = 3)]
    pub min_subclasses: u32,

    /// Reject refinements whose sub-hierarchy exceeds this (with --iterate).
    #[arg(long, default_value_t = 0.99)]
    pub max_sub_hierarchy: f64,

    /// Ranking CSV output file, relative to --out-dir. With --iterate this
    /// holds the composed multi-level ranking.
    #[arg(long, default_value = "ranking.csv")]
    pub ranking_out: PathBuf,
}

/// Arguments for `agony eval`.
#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Input edge-list file.
    #[arg(long)]
    pub input: PathBuf,

    /// Ranking CSV file (`node,rank`).
    #[arg(long)]
    pub ranking: PathBuf,

    /// Agony exponent (any d >= 0).
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub d: f64,
}

/// Arguments for `agony compare`.
#[derive(Debug, Args)]
pub struct CompareArgs {
    /// Reference ranking CSV (rows of the confusion matrix).
    #[arg(long)]
    pub planted: PathBuf,

    /// Inferred ranking CSV (columns of the confusion matrix).
    #[arg(long)]
    pub inferred: PathBuf,

    /// Also write the confusion matrix as a CSV file (relative to
    /// --out-dir).
    #[arg(long)]
    pub confusion_csv: Option<PathBuf>,

    /// Also write the confusion matrix as an SVG heatmap (relative to
    /// --out-dir).
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

/// Arguments for `agony theory`.
#[derive(Debug, Args)]
pub struct TheoryArgs {
    /// Agony exponent: 0, 1, or 2.
    #[arg(long, default_value_t = 1)]
    pub d: u32,

    /// Forward probability to the adjacent class.
    #[arg(long)]
    pub p: f64,

    /// Forward probability beyond the adjacent class.
    #[arg(long)]
    pub q: f64,

    /// Backward/within probability (noise).
    #[arg(long, default_value_t = 0.0)]
    pub s: f64,

    /// Class-count exponent: the planted model has R = 2^a classes.
    /// Required unless --scaling is given.
    #[arg(long)]
    pub a: Option<u32>,

    /// Nodes per class; enables expected edge counts and is required for
    /// d = 0.
    #[arg(long)]
    pub n: Option<f64>,

    /// Evaluate the direct/inverted estimate curves at one merge level b.
    #[arg(long, conflicts_with = "curve")]
    pub b: Option<f64>,

    /// Evaluate the curves over a merge-level grid "lo:hi:step".
    #[arg(long, value_name = "LO:HI:STEP", conflicts_with_all = ["b", "curve"])]
    pub b_grid: Option<String>,

    /// Emit the curves over every integer class count 1..=2^a as a table
    /// (columns r, hbar_direct, hbar_inverted) instead of the summary.
    #[arg(long)]
    pub curve: bool,

    /// Emit the resolution-threshold scaling table for these values of a
    /// (comma separated) instead of the summary.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["a", "b", "b_grid", "curve"])]
    pub scaling: Option<Vec<u32>>,
}

/// Arguments for `agony sweep`.
#[derive(Debug, Args)]
#[command(group(ArgGroup::new("sgrid").required(true).args(["s_list", "s_geom"])))]
pub struct SweepArgs {
    /// Agony exponent: 0 or 1.
    #[arg(long, default_value_t = 1)]
    pub d: u32,

    /// Forward probability to the adjacent class.
    #[arg(long)]
    pub p: f64,

    /// Forward probability beyond the adjacent class.
    #[arg(long)]
    pub q: f64,

    /// Number of planted classes (a power of two).
    #[arg(long, default_value_t = 32)]
    pub r: u32,

    /// Nodes per class.
    #[arg(long, default_value_t = 128)]
    pub n: u32,

    /// Explicit comma-separated noise grid, e.g. "0,0.001,0.01".
    #[arg(long, value_delimiter = ',')]
    pub s_list: Option<Vec<f64>>,

    /// Geometric noise grid "lo:hi:count" (log-spaced, inclusive).
    #[arg(long, value_name = "LO:HI:COUNT")]
    pub s_geom: Option<String>,

    /// Sampled graphs per grid point.
    #[arg(long, default_value_t = 5)]
    pub replicates: u32,

    /// Also run depth-2 iterated refinement on every sample.
    #[arg(long)]
    pub iterate: bool,

    /// Record wall-clock time per run (off by default: timings break
    /// byte-identical reruns).
    #[arg(long)]
    pub timed: bool,

    /// Also write an SVG grid of first-replicate confusion heatmaps.
    #[arg(long)]
    pub svg: bool,
}

/// Arguments for `agony network`.
#[derive(Debug, Args)]
pub struct NetworkArgs {
    /// Input edge-list file.
    #[arg(long)]
    pub input: PathBuf,

    /// Agony exponent: 0 or 1.
    #[arg(long, default_value_t = 1)]
    pub d: u32,

    /// Also refine each detected class and report the per-class table.
    #[arg(long)]
    pub iterate: bool,

    /// Number of solved levels (with --iterate).
    #[arg(long, default_value_t = 2)]
    pub depth: u32,

    /// Smallest class worth refining (with --iterate).
    #[arg(long, default_value_t = 3)]
    pub min_class_size: u32,

    /// Minimum subclasses for an accepted refinement (with --iterate).
    #[arg(long, default_value_t = 3)]
    pub min_subclasses: u32,

    /// Reject refinements whose sub-hierarchy exceeds this (with --iterate).
    #[arg(long, default_value_t = 0.99)]
    pub max_sub_hierarchy: f64,
}

/// Parses the process arguments, runs the selected subcommand, and maps
/// every failure to a JSON error on stderr. Returns the process exit code.
#[must_use]
pub fn run() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = err.print();
                return ExitCode::SUCCESS;
            }
            emit_error("usage", &err.render().to_string());
            return ExitCode::from(2);
        }
    };
    match execute(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            emit_error(classify(&err), &format!("{err:#}"));
            ExitCode::FAILURE
        }
    }
}

/// Prints the machine-readable error document to stderr.
fn emit_error(kind: &str, message: &str) {
    eprintln!("{}", json!({ "error": message, "kind": kind }));
}

/// Maps an error chain to a stable `kind` tag for scripting.
fn classify(err: &anyhow::Error) -> &'static str {
    use agony_core::eval::EvalError;
    use agony_core::metrics::MetricsError;
    use agony_core::ranking::RankingError;
    use agony_core::rsbm::RsbmError;
    use agony_core::solve::SolveError;
    use agony_core::theory::TheoryError;

    if err.downcast_ref::<crate::io::FileFormatError>().is_some() {
        "format"
    } else if err.downcast_ref::<crate::sweep::SweepError>().is_some() {
        "sweep"
    } else if err.downcast_ref::<crate::network::NetworkError>().is_some() {
        "network"
    } else if err.downcast_ref::<TheoryError>().is_some() {
        "theory"
    } else if err.downcast_ref::<RsbmError>().is_some() {
        "rsbm"
    } else if err.downcast_ref::<SolveError>().is_some() {
        "solve"
    } else if err.downcast_ref::<EvalError>().is_some() {
        "eval"
    } else if err.downcast_ref::<MetricsError>().is_some() {
        "metrics"
    } else if err.downcast_ref::<RankingError>().is_some() {
        "ranking"
    } else if err.downcast_ref::<serde_json::Error>().is_some() {
        "json"
    } else if err.downcast_ref::<std::io::Error>().is_some() {
        "io"
    } else {
        "invalid-argument"
    }
}

fn execute(cli: Cli) -> Result<()> {
    let ctx = CommandContext {
        seed: cli.seed,
        threads: cli.threads,
        out_dir: cli.out_dir,
        format: cli.format,
    };
    match cli.command {
        Command::Generate(args) => cmd_generate(&ctx, &args),
        Command::Solve(args) => cmd_solve(&ctx, &args),
        Command::Eval(args) => cmd_eval(&ctx, &args),
        Command::Compare(args) => cmd_compare(&ctx, &args),
        Command::Theory(args) => cmd_theory(&ctx, &args),
        Command::Sweep(args) => cmd_sweep(&ctx, &args),
        Command::Network(args) => cmd_network(&ctx, &args),
    }
}

/// Global options threaded through to every subcommand.
struct CommandContext {
    seed: u64,
    threads: usize,
    out_dir: PathBuf,
    format: OutputFormat,
}

impl CommandContext {
    /// Resolves `rel` against the output directory, creating parents.
    fn output_path(&self, rel: &Path) -> Result<PathBuf> {
        let path = self.out_dir.join(rel);
        if let Some(parent) = path.parent() {
            if !parent.as_os_str().is_empty() {
                fs::create_dir_all(parent)
                    .with_context(|| format!("creating directory {}", parent.display()))?;
            }
        }
        Ok(path)
    }

    /// Prints the result document in the selected format.
    fn emit(&self, value: &Value) -> Result<()> {
        match self.format {
            OutputFormat::Json => {
                write_stdout(&format!("{}\n", serde_json::to_string_pretty(value)?))
            }
            OutputFormat::Csv => write_stdout(&kv_csv(value)),
        }
    }
}

/// Writes a result document to stdout. A closed pipe (e.g. `agony ... |
/// head`) is not an error: the consumer has all it wants.
fn write_stdout(text: &str) -> Result<()> {
    use std::io::Write;
    let mut out = std::io::stdout().lock();
    match out.write_all(text.as_bytes()).and_then(|()| out.flush()) {
        Ok(()) => Ok(()),
        Err(err) if err.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
        Err(err) => Err(err).context("writing to stdout"),
    }
}

/// Renders a JSON object as `key,value` CSV rows, flattening nested
/// objects into dotted keys. Arrays and nulls are rendered inline as JSON.
fn kv_csv(value: &Value) -> String {
    fn field(s: &str) -> String {
        if s.contains(',') || s.contains('"') || s.contains('\n') {
            format!("\"{}\"", s.replace('"', "\"\""))
        } else {
            s.to_owned()
        }
    }
    fn walk(prefix: &str, value: &Value, out: &mut String) {
        match value {
            Value::Object(map) => {
                for (key, sub) in map {
                    let key =
                        if prefix.is_empty() { key.clone() } else { format!("{prefix}.{key}") };
                    walk(&key, sub, out);
                }
            }
            Value::String(s) => {
                out.push_str(&format!("{},{}\n", field(prefix), field(s)));
            }
            other => {
                out.push_str(&format!("{},{}\n", field(prefix), field(&other.to_string())));
            }
        }
    }
    let mut out = String::from("key,value\n");
    walk("", value, &mut out);
    out
}

/// Opens and parses an edge-list file.
fn load_graph(path: &Path) -> Result<(DirectedGraph, LoadStats)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let parsed = load_edge_list(BufReader::new(file))
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(parsed)
}

/// Opens and parses a `node,rank` CSV file.
fn load_ranking(path: &Path) -> Result<Ranking> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let ranking = read_ranking_csv(BufReader::new(file))
        .with_context(|| format!("parsing {}", path.display()))?;
    Ok(ranking)
}

fn cmd_generate(ctx: &CommandContext, args: &GenerateArgs) -> Result<()> {
    let (params, seed) = match &args.params {
        Some(path) => {
            let text =
                fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            let doc: ParamsFile = serde_json::from_str(&text)
                .with_context(|| format!("parsing {}", path.display()))?;
            let params = match (&doc.class_sizes, doc.r, doc.n) {
                (Some(sizes), _, _) => RsbmParams::new(doc.p, doc.q, doc.s, sizes.clone())?,
                (None, Some(r), Some(n)) => RsbmParams::uniform(doc.p, doc.q, doc.s, r, n)?,
                _ => {
                    bail!("the parameter file needs either \"class_sizes\" or both \"R\" and \"n\"")
                }
            };
            (params, doc.seed.unwrap_or(ctx.seed))
        }
        None => {
            let (Some(p), Some(q), Some(s)) = (args.p, args.q, args.s) else {
                bail!("--p, --q, and --s are required unless --params is given");
            };
            let params = match &args.class_sizes {
                Some(sizes) => RsbmParams::new(p, q, s, sizes.clone())?,
                None => {
                    let (Some(r), Some(n)) = (args.r, args.n) else {
                        bail!("either --class-sizes or both --r and --n are required");
                    };
                    RsbmParams::uniform(p, q, s, r, n)?
                }
            };
            (params, ctx.seed)
        }
    };

    let (graph, planted) = rsbm::sample(&params, seed);

    let graph_path = ctx.output_path(&args.graph_out)?;
    let file =
        File::create(&graph_path).with_context(|| format!("creating {}", graph_path.display()))?;
    save_edge_list(BufWriter::new(file), &graph)
        .with_context(|| format!("writing {}", graph_path.display()))?;

    let ranking_path = ctx.output_path(&args.ranking_out)?;
    let file = File::create(&ranking_path)
        .with_context(|| format!("creating {}", ranking_path.display()))?;
    write_ranking_csv(BufWriter::new(file), &planted)
        .with_context(|| format!("writing {}", ranking_path.display()))?;

    ctx.emit(&json!({
        "nodes": graph.node_count(),
        "edges": graph.edge_count(),
        "expected_edges": rsbm::expected_edge_count(&params),
        "classes": params.num_classes(),
        "hierarchy_constraint_ok": rsbm::hierarchy_constraint_ok(&params),
        "seed": seed,
        "graph_file": graph_path.display().to_string(),
        "ranking_file": ranking_path.display().to_string(),
    }))
}

/// JSON fragment shared by `solve` and the iterate table.
fn report_json(report: &SolveReport, m: usize) -> Value {
    json!({
        "agony": report.agony,
        "m": m,
        "hierarchy": report.hierarchy,
        "num_classes": report.num_classes,
        "backward_edges": report.backward_edges,
        "exact": report.exact,
    })
}

fn iteration_options(
    depth: u32,
    min_class_size: u32,
    min_subclasses: u32,
    max_sub_hierarchy: f64,
) -> IterationOptions {
    IterationOptions { max_depth: depth, min_class_size, min_subclasses, max_sub_hierarchy }
}

fn cmd_solve(ctx: &CommandContext, args: &SolveArgs) -> Result<()> {
    let (graph, _) = load_graph(&args.input)?;
    let d = AgonyExponent::new(args.d)?;

    let (report, method) = if args.oracle {
        (brute_force(&graph, d)?, "exhaustive")
    } else {
        match d.as_integer() {
            Some(0) => (minimize_d0(&graph), "eades-lin-smyth"),
            Some(1) => (minimize_d1(&graph), "mincost-flow-dual"),
            _ => bail!("no fast solver for d = {}; use --d 0, --d 1, or --oracle", args.d),
        }
    };

    let iterate = if args.iterate {
        let opts = iteration_options(
            args.depth,
            args.min_class_size,
            args.min_subclasses,
            args.max_sub_hierarchy,
        );
        Some(iterated_agony(&graph, d, &opts)?)
    } else {
        None
    };

    let ranking_path = ctx.output_path(&args.ranking_out)?;
    let written = iterate.as_ref().map_or(&report.ranking, |tree| &tree.composed);
    let file = File::create(&ranking_path)
        .with_context(|| format!("creating {}", ranking_path.display()))?;
    write_ranking_csv(BufWriter::new(file), written)
        .with_context(|| format!("writing {}", ranking_path.display()))?;

    let m = graph.edge_count();
    let mut doc = report_json(&report, m);
    doc["d"] = json!(args.d);
    doc["method"] = json!(method);
    doc["ranking_file"] = json!(ranking_path.display().to_string());
    doc["iterate"] = match &iterate {
        None => Value::Null,
        Some(tree) => json!({
            "composed_classes": tree.composed_classes(),
            "classes": class_table(tree, graph.node_count()),
        }),
    };
    ctx.emit(&doc)
}

fn cmd_eval(ctx: &CommandContext, args: &EvalArgs) -> Result<()> {
    let (graph, _) = load_graph(&args.input)?;
    let ranking = load_ranking(&args.ranking)?;
    let d = AgonyExponent::new(args.d)?;
    let report = agony_core::eval::agony(&graph, &ranking, d)?;
    ctx.emit(&json!({
        "agony": report.agony,
        "m": report.m,
        "hierarchy": report.hierarchy,
        "backward_edges": report.backward_edges,
        "R": ranking.num_classes(),
    }))
}

fn cmd_compare(ctx: &CommandContext, args: &CompareArgs) -> Result<()> {
    let planted = load_ranking(&args.planted)?;
    let inferred = load_ranking(&args.inferred)?;
    let ari = agony_core::metrics::adjusted_rand_index(&planted, &inferred)?;
    let confusion = agony_core::metrics::confusion_matrix(&planted, &inferred)?;
    let dense = confusion.to_dense();

    if let Some(rel) = &args.confusion_csv {
        let path = ctx.output_path(rel)?;
        let mut text = String::new();
        for row in &dense {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    if let Some(rel) = &args.svg {
        let path = ctx.output_path(rel)?;
        let drawing = heatmap_svg(&dense, "confusion");
        fs::write(&path, drawing).with_context(|| format!("writing {}", path.display()))?;
    }

    ctx.emit(&json!({ "ari": ari, "confusion": dense }))
}

/// Parses a `lo:hi:step` arithmetic grid.
fn parse_linear_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, step] = parts.as_slice() else {
        bail!("grid must be lo:hi:step, got {spec:?}");
    };
    let lo: f64 = lo.parse().with_context(|| format!("bad grid start {lo:?}"))?;
    let hi: f64 = hi.parse().with_context(|| format!("bad grid end {hi:?}"))?;
    let step: f64 = step.parse().with_context(|| format!("bad grid step {step:?}"))?;
    if !(lo.is_finite() && hi.is_finite() && step.is_finite() && step > 0.0 && hi >= lo) {
        bail!("grid must satisfy lo <= hi with step > 0, got {spec:?}");
    }
    let count = ((hi - lo) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| lo + step * i as f64).collect())
}

/// Parses a `lo:hi:count` log-spaced grid.
fn parse_geometric_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [lo, hi, count] = parts.as_slice() else {
        bail!("geometric grid must be lo:hi:count, got {spec:?}");
    };
    let lo: f64 = lo.parse().with_context(|| format!("bad grid start {lo:?}"))?;
    let hi: f64 = hi.parse().with_context(|| format!("bad grid end {hi:?}"))?;
    let count: usize = count.parse().with_context(|| format!("bad grid count {count:?}"))?;
    if !(lo.is_finite() && hi.is_finite() && lo > 0.0 && hi >= lo && count >= 2) {
        bail!("geometric grid needs 0 < lo <= hi and count >= 2, got {spec:?}");
    }
    let (llo, lhi) = (lo.ln(), hi.ln());
    let mut grid: Vec<f64> =
        (0..count).map(|i| (llo + (lhi - llo) * i as f64 / (count - 1) as f64).exp()).collect();
    grid[0] = lo;
    grid[count - 1] = hi;
    Ok(grid)
}

/// Evaluates the direct and inverted estimate curves at merge level `b`.
fn curves_at(d: u32, b: f64, p: f64, q: f64, s: f64, a: u32) -> Result<(f64, f64)> {
    let pair = match d {
        1 => (theory::hbar_direct_d1(b, p, q, s, a)?, theory::hbar_inverted_d1(b, p, q, s, a)?),
        2 => (theory::hbar_direct_d2(b, p, q, s, a)?, theory::hbar_inverted_d2(b, p, q, s, a)?),
        other => bail!("curves exist for d = 1 and d = 2 only, not d = {other}"),
    };
    Ok(pair)
}

fn cmd_theory(ctx: &CommandContext, args: &TheoryArgs) -> Result<()> {
    if let Some(a_values) = &args.scaling {
        let rows = theory::scaling_check(args.p, args.q, a_values)?;
        return match ctx.format {
            OutputFormat::Json => ctx.emit(&json!({ "scaling": rows })),
            OutputFormat::Csv => {
                let mut out = String::from("a,r,s_m,s_m_r2,s_2m,s_2m_r3\n");
                for row in &rows {
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        row.a, row.r, row.s_m, row.s_m_r2, row.s_2m, row.s_2m_r3
                    ));
                }
                write_stdout(&out)
            }
        };
    }

    let Some(a) = args.a else {
        bail!("--a is required unless --scaling is given");
    };
    if !(1..=22).contains(&a) {
        bail!("--a must lie in 1..=22, got {a}");
    }
    let (p, q, s) = (args.p, args.q, args.s);
    let r = 1u32 << a;

    if args.curve {
        let mut rows = Vec::with_capacity(r as usize);
        for rt in 1..=u64::from(r) {
            let b = f64::from(a) - (rt as f64).log2();
            let (direct, inverted) = curves_at(args.d, b, p, q, s, a)?;
            rows.push((rt, direct, inverted));
        }
        return match ctx.format {
            OutputFormat::Json => ctx.emit(&json!({
                "curve": rows
                    .iter()
                    .map(|(rt, dir, inv)| json!({ "r": rt, "hbar_direct": dir, "hbar_inverted": inv }))
                    .collect::<Vec<_>>(),
            })),
            OutputFormat::Csv => {
                let mut out = String::from("r,hbar_direct,hbar_inverted\n");
                for (rt, dir, inv) in &rows {
                    out.push_str(&format!("{rt},{dir},{inv}\n"));
                }
                write_stdout(&out)
            }
        };
    }

    let mut doc = json!({
        "d": args.d,
        "p": p,
        "q": q,
        "s": s,
        "a": a,
        "r": r,
        "s_max": rsbm::s_max(p, q, r)?,
        "hbar_planted": theory::hbar_planted(f64::from(args.d), p, q, s, r)?,
    });
    if let Some(n) = args.n {
        doc["expected_m"] = json!(theory::expected_m(p, q, s, a, n));
    }
    match args.d {
        0 => {
            let Some(n) = args.n else {
                bail!("--n is required for d = 0 (the split limit depends on the node count)");
            };
            if !(n.is_finite() && n > 0.0 && n.fract() == 0.0) {
                bail!("--n must be a positive integer for d = 0, got {n}");
            }
            let n_total =
                (n as u64).checked_mul(u64::from(r)).context("total node count overflows")?;
            let summary = theory::optimal_summary_d0(p, q, s, a, n_total)?;
            doc["thresholds"] = Value::Null;
            doc["summary"] = json!(summary);
        }
        1 => {
            doc["thresholds"] = json!(theory::thresholds_d1(p, q, Some(s), a)?);
            doc["summary"] = json!(theory::optimal_summary_d1(p, q, s, a)?);
        }
        2 => {
            doc["thresholds"] = json!(theory::thresholds_d2(p, q, Some(s), a)?);
            doc["summary"] = json!(theory::optimal_summary_d2(p, q, s, a)?);
        }
        other => bail!("--d must be 0, 1, or 2, got {other}"),
    }

    if let Some(b) = args.b {
        let (direct, inverted) = curves_at(args.d, b, p, q, s, a)?;
        doc["at_b"] = json!({
            "b": b,
            "r": (f64::from(a) - b).exp2(),
            "hbar_direct": direct,
            "hbar_inverted": inverted,
        });
    }
    if let Some(spec) = &args.b_grid {
        let mut rows = Vec::new();
        for b in parse_linear_grid(spec)? {
            let (direct, inverted) = curves_at(args.d, b, p, q, s, a)?;
            rows.push(json!({
                "b": b,
                "r": (f64::from(a) - b).exp2(),
                "hbar_direct": direct,
                "hbar_inverted": inverted,
            }));
        }
        doc["b_grid"] = Value::Array(rows);
    }
    ctx.emit(&doc)
}

/// Reads back one of the sweep's confusion CSV files.
fn read_confusion_csv(path: &Path) -> Result<Vec<Vec<u64>>> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let mut matrix = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let row: Result<Vec<u64>, _> = line.split(',').map(str::parse).collect();
        let row =
            row.with_context(|| format!("{}:{}: bad confusion row", path.display(), idx + 1))?;
        matrix.push(row);
    }
    Ok(matrix)
}

fn cmd_sweep(ctx: &CommandContext, args: &SweepArgs) -> Result<()> {
    let s_grid = match (&args.s_list, &args.s_geom) {
        (Some(list), None) => list.clone(),
        (None, Some(spec)) => parse_geometric_grid(spec)?,
        _ => unreachable!("clap enforces exactly one grid flag"),
    };
    let spec = SweepSpec {
        d: args.d,
        p: args.p,
        q: args.q,
        r: args.r,
        n_per_class: args.n,
        s_grid,
        replicates: args.replicates,
        master_seed: ctx.seed,
        iterate: args.iterate,
        timed: args.timed,
        threads: ctx.threads,
    };
    let summary = run_sweep(&spec, &ctx.out_dir)?;

    if args.svg {
        let mut panels = Vec::new();
        for s in &summary.spec.s_grid {
            let name = format!("conf_s{s}_r0.csv");
            let matrix = read_confusion_csv(&ctx.out_dir.join(&name))?;
            panels.push((format!("s = {s}"), matrix));
        }
        let path = ctx.out_dir.join("confusions.svg");
        fs::write(&path, heatmap_grid_svg(&panels, 3))
            .with_context(|| format!("writing {}", path.display()))?;
    }

    match ctx.format {
        OutputFormat::Json => ctx.emit(&serde_json::to_value(&summary)?),
        OutputFormat::Csv => {
            let mut out = String::from(
                "s,median_h_star,median_ari_level1,median_classes_level1,median_ari_level2,median_classes_level2\n",
            );
            for row in &summary.per_s {
                let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
                out.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    row.s,
                    row.median_h_star,
                    row.median_ari_level1,
                    row.median_classes_level1,
                    opt(row.median_ari_level2),
                    opt(row.median_classes_level2),
                ));
            }
            write_stdout(&out)
        }
    }
}

fn cmd_network(ctx: &CommandContext, args: &NetworkArgs) -> Result<()> {
    let opts = args.iterate.then(|| {
        iteration_options(
            args.depth,
            args.min_class_size,
            args.min_subclasses,
            args.max_sub_hierarchy,
        )
    });
    let report = run_real_network(&args.input, args.d, opts.as_ref())?;
    match ctx.format {
        OutputFormat::Json => ctx.emit(&serde_json::to_value(&report)?),
        OutputFormat::Csv => {
            let mut doc = serde_json::to_value(&report)?;
            let classes =
                doc.as_object_mut().and_then(|map| map.remove("classes")).filter(|v| !v.is_null());
            let mut out = kv_csv(&doc);
            if let Some(Value::Array(rows)) = classes {
                out.push_str("\nrank,size,size_pct,sub_hierarchy,subclasses,status\n");
                for row in rows {
                    let cell = |k: &str| match &row[k] {
                        Value::Null => String::new(),
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    out.push_str(&format!(
                        "{},{},{},{},{},{}\n",
                        cell("rank"),
                        cell("size"),
                        cell("size_pct"),
                        cell("sub_hierarchy"),
                        cell("subclasses"),
                        cell("status"),
                    ));
                }
            }
            write_stdout(&out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kv_csv_flattens_nested_objects_and_escapes_commas() {
        let doc = json!({
            "plain": 3,
            "nested": { "inner": 1.5 },
            "text": "a,b",
            "list": [1, 2],
        });
        let out = kv_csv(&doc);
        assert!(out.starts_with("key,value\n"));
        assert!(out.contains("plain,3\n"));
        assert!(out.contains("nested.inner,1.5\n"));
        assert!(out.contains("text,\"a,b\"\n"));
        assert!(out.contains("list,\"[1,2]\"\n"));
    }

    #[test]
    fn linear_grids_are_inclusive() {
        let grid = parse_linear_grid("0:1:0.25").unwrap();
        assert_eq!(grid.len(), 5);
        assert!((grid[4] - 1.0).abs() < 1e-12);
        assert!(parse_linear_grid("1:0:0.5").is_err());
        assert!(parse_linear_grid("0:1:0").is_err());
        assert!(parse_linear_grid("nonsense").is_err());
    }

    #[test]
    fn geometric_grids_hit_both_endpoints() {
        let grid = parse_geometric_grid("0.001:0.1:3").unwrap();
        assert_eq!(grid.len(), 3);
        assert_eq!(grid[0], 0.001);
        assert_eq!(grid[2], 0.1);
        assert!((grid[1] - 0.01).abs() < 1e-12);
        assert!(parse_geometric_grid("0:1:3").is_err());
        assert!(parse_geometric_grid("0.1:1:1").is_err());
    }

    #[test]
    fn cli_parses_a_representative_command_line() {
        let cli = Cli::try_parse_from([
            "agony",
            "sweep",
            "--p",
            "0.5",
            "--q",
            "0.5",
            "--s-list",
            "0,0.01",
            "--replicates",
            "2",
            "--seed",
            "7",
            "--format",
            "csv",
        ])
        .unwrap();
        assert_eq!(cli.seed, 7);
        assert_eq!(cli.format, OutputFormat::Csv);
        match cli.command {
            Command::Sweep(args) => {
                assert_eq!(args.s_list.as_deref(), Some(&[0.0, 0.01][..]));
                assert_eq!(args.replicates, 2);
            }
            other => panic!("parsed wrong subcommand: {other:?}"),
        }
    }

    #[test]
    fn sweep_requires_exactly_one_grid_flag() {
        let no_grid = Cli::try_parse_from(["agony", "sweep", "--p", "0.5", "--q", "0.5"]);
        assert!(no_grid.is_err());
        let both = Cli::try_parse_from([
            "agony",
            "sweep",
            "--p",
            "0.5",
            "--q",
            "0.5",
            "--s-list",
            "0",
            "--s-geom",
            "0.001:0.1:3",
        ]);
        assert!(both.is_err());
    }

    #[test]
    fn error_kinds_are_stable_tags() {
        let err = anyhow::Error::new(AgonyExponent::new(-1.0).unwrap_err())
            .context("checking the exponent");
        assert_eq!(classify(&err), "eval");
        let err = anyhow::anyhow!("free-form");
        assert_eq!(classify(&err), "invalid-argument");
    }
}
