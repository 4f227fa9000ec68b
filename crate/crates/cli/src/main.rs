use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use graphsched::algos::{self, AlgoOptions, Algorithm, Values};
use graphsched::blocking::{block_edges, BlockedGraph};
use graphsched::engine::{Engine, ExecConfig, RunStats};
use graphsched::graph::{self, parse_edge_list, Graph, LoadOptions};
use graphsched::sched::{documented_space, enumerate_space, Schedule, ScheduleProgram, SpaceSelector};
use graphsched::tune::{self, Strategy, TuneConfig};
use graphsched::verify;

#[derive(Parser)]
#[command(name = "graphsched", version, about = "Scheduled graph analytics on a simulated CTA/warp/thread pool")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm and write its per-vertex output and stats.
    Run(RunArgs),
    /// Time one algorithm: warmup plus the median of three runs.
    Bench(RunArgs),
    /// Search the schedule space for the fastest passing schedule.
    Tune(TuneArgs),
    /// Check algorithm output against the serial oracles.
    Verify(VerifyArgs),
    /// Convert a graph file, or write its EdgeBlocking sidecar.
    Convert(ConvertArgs),
    /// Show the schedule labels of each algorithm.
    ListLabels(ListArgs),
}

#[derive(Args, Clone)]
struct ExecArgs {
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long, default_value_t = 256)]
    cta_size: usize,
    #[arg(long, default_value_t = 32)]
    warp_size: usize,
    /// Run every parallel loop sequentially in task order.
    #[arg(long)]
    deterministic: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ExecArgs {
    fn config(&self) -> ExecConfig {
        let mut e = ExecConfig::default();
        if let Some(w) = self.workers {
            e.num_workers = w;
        }
        e.cta_size = self.cta_size;
        e.warp_size = self.warp_size;
        e.deterministic = self.deterministic;
        e
    }
}

#[derive(Args, Clone)]
struct GraphArgs {
    /// Edge list ("src dst [weight]") or Matrix Market file.
    graph: PathBuf,
    /// Read a third column as edge weights (detected when omitted).
    #[arg(long)]
    weighted: bool,
    /// Add the reverse of every edge.
    #[arg(long)]
    symmetrize: bool,
}

#[derive(Args, Clone)]
struct AlgoArgs {
    #[arg(long, default_value_t = 0)]
    source: u32,
    /// Comma-separated BC sources (default: --source).
    #[arg(long, value_delimiter = ',')]
    sources: Option<Vec<u32>>,
    /// Bucket width for sssp, overriding the schedule.
    #[arg(long)]
    delta: Option<u64>,
    #[arg(long, default_value_t = 100)]
    max_iters: usize,
    #[arg(long, default_value_t = 1e-10)]
    tolerance: f64,
}

impl AlgoArgs {
    fn options(&self) -> AlgoOptions {
        AlgoOptions {
            source: self.source,
            sources: self.sources.clone(),
            delta: self.delta,
            max_iters: self.max_iters,
            tolerance: self.tolerance,
            reuse_frontier: true,
        }
    }
}

#[derive(Args, Clone)]
struct ScheduleArgs {
    /// Schedule program file.
    #[arg(long)]
    schedule: Option<PathBuf>,
    /// Positional schedule argument, e.g. 3=0.15 for "argv[3]".
    #[arg(long = "sched-arg", value_name = "K=V")]
    sched_args: Vec<String>,
    /// Vertices per segment for every blocked schedule.
    #[arg(long)]
    block: Option<u32>,
    /// Precomputed EdgeBlocking sidecar.
    #[arg(long)]
    blocked: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum OutputFormat {
    Text,
    Binary,
}

#[derive(Args)]
struct RunArgs {
    #[arg(value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[command(flatten)]
    algo: AlgoArgs,
    #[command(flatten)]
    exec: ExecArgs,
    /// Per-vertex output file (default: <algorithm>.out).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    format: OutputFormat,
    /// Stats JSON file (default: <algorithm>.stats.json).
    #[arg(long)]
    stats: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Exhaustive,
    Random,
}

#[derive(Args)]
struct TuneArgs {
    #[arg(value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    algo: AlgoArgs,
    #[command(flatten)]
    exec: ExecArgs,
    /// Time budget in seconds.
    #[arg(long, default_value_t = 60.0)]
    budget: f64,
    #[arg(long, value_enum, default_value = "exhaustive")]
    strategy: StrategyArg,
    #[arg(long)]
    max_trials: Option<usize>,
    /// Keep the direction fixed at PUSH.
    #[arg(long)]
    single_direction: bool,
    /// Trials CSV.
    #[arg(long, default_value = "tune.csv")]
    csv: PathBuf,
    /// Best schedule program.
    #[arg(long, default_value = "best.sched")]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(value_parser = parse_algorithm)]
    algorithm: Algorithm,
    #[command(flatten)]
    graph: GraphArgs,
    #[command(flatten)]
    schedule: ScheduleArgs,
    #[command(flatten)]
    algo: AlgoArgs,
    #[command(flatten)]
    exec: ExecArgs,
    /// Also verify this many schedules sampled from the space.
    #[arg(long, default_value_t = 0)]
    samples: usize,
}

#[derive(Args)]
struct ConvertArgs {
    #[command(flatten)]
    graph: GraphArgs,
    output: PathBuf,
    /// Write an EdgeBlocking sidecar with this many vertices per segment.
    #[arg(long)]
    block: Option<usize>,
}

#[derive(Args)]
struct ListArgs {
    #[arg(value_parser = parse_algorithm)]
    algorithm: Option<Algorithm>,
    /// Print the schedule space and its size.
    #[arg(long)]
    space: bool,
}

fn parse_algorithm(s: &str) -> std::result::Result<Algorithm, String> {
    Algorithm::from_name(s).ok_or_else(|| {
        let names: Vec<_> = Algorithm::ALL.iter().map(|a| a.name()).collect();
        format!("unknown algorithm {s:?} (expected one of {})", names.join(", "))
    })
}

fn has_weight_column(text: &str) -> bool {
    let mut mm = false;
    for line in text.lines() {
        let t = line.trim();
        if t.starts_with("%%MatrixMarket") {
            mm = true;
            continue;
        }
        if t.is_empty() || t.starts_with('#') || t.starts_with('%') {
            continue;
        }
        if mm {
            // size line
            mm = false;
            continue;
        }
        return t.split_whitespace().count() == 3;
    }
    false
}

fn load_graph(args: &GraphArgs) -> Result<Graph> {
    let text = std::fs::read_to_string(&args.graph).with_context(|| format!("reading {}", args.graph.display()))?;
    let opts = LoadOptions {
        weighted: args.weighted || has_weight_column(&text),
        symmetrize: args.symmetrize,
    };
    let (g, stats) = parse_edge_list(&text, opts)?;
    if stats.collapsed_duplicates > 0 {
        log::info!("symmetrization collapsed {} duplicate arcs", stats.collapsed_duplicates);
    }
    log::info!(
        "loaded {}: {} vertices, {} edges{}",
        args.graph.display(),
        g.num_vertices(),
        g.num_edges(),
        if g.is_weighted() { ", weighted" } else { "" }
    );
    Ok(g)
}

/// Weighted view for SSSP; unweighted graphs get seeded weights in [1, 1000].
fn weighted_for(alg: Algorithm, g: Graph, seed: u64) -> Graph {
    if alg.needs_weights() && !g.is_weighted() {
        log::warn!("graph is unweighted; using random weights in [1, 1000] (seed {seed})");
        graph::with_random_weights(&g, 1, 1000, seed)
    } else {
        g
    }
}

fn load_program(args: &ScheduleArgs) -> Result<ScheduleProgram> {
    let mut program = match &args.schedule {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            ScheduleProgram::parse(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => ScheduleProgram::default(),
    };
    let mut argv = HashMap::new();
    for a in &args.sched_args {
        let Some((k, v)) = a.split_once('=') else {
            bail!("--sched-arg expects K=V, got {a:?}");
        };
        let k: usize = k.trim().parse().with_context(|| format!("bad argument index in {a:?}"))?;
        argv.insert(k, v.to_string());
    }
    program.resolve_args(&argv)?;
    if let Some(n) = args.block {
        program.for_each_schedule_mut(|s| s.blocking_size = Some(n));
    }
    Ok(program)
}

fn engine_for<'g>(g: &'g Graph, exec: &ExecArgs, sched: Option<&ScheduleArgs>) -> Result<Engine<'g>> {
    let mut engine = Engine::new(g, exec.config())?;
    if let Some(path) = sched.and_then(|s| s.blocked.as_ref()) {
        engine.set_blocked(BlockedGraph::load(path)?)?;
    }
    Ok(engine)
}

#[derive(Serialize)]
struct RunReport<'a> {
    algorithm: &'a str,
    graph: String,
    num_vertices: usize,
    num_edges: usize,
    workers: usize,
    deterministic: bool,
    preprocess_ms: f64,
    wall_ms: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    median_ms: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    runs_ms: Vec<f64>,
    stats: &'a RunStats,
}

fn write_values(values: &Values, path: &Path, format: OutputFormat) -> Result<()> {
    let bytes = match format {
        OutputFormat::Text => values.to_text().into_bytes(),
        OutputFormat::Binary => {
            let mut b = Vec::new();
            match values {
                Values::Parents(v) => v.iter().for_each(|x| b.extend(x.to_le_bytes())),
                Values::Ranks(v) | Values::Centrality(v) => v.iter().for_each(|x| b.extend(x.to_le_bytes())),
                Values::Distances(v) => v.iter().for_each(|x| b.extend(x.to_le_bytes())),
                Values::Labels(v) => v.iter().for_each(|x| b.extend(x.to_le_bytes())),
            }
            b
        }
    };
    std::fs::write(path, bytes).with_context(|| format!("writing {}", path.display()))
}

fn ms(d: Duration) -> f64 {
    d.as_secs_f64() * 1e3
}

fn cmd_run(args: RunArgs, bench: bool) -> Result<()> {
    let alg = args.algorithm;
    let g = weighted_for(alg, load_graph(&args.graph)?, args.exec.seed);
    let program = load_program(&args.schedule)?;
    program.check_labels(alg.labels())?;
    let mut engine = engine_for(&g, &args.exec, Some(&args.schedule))?;
    let prep = engine.prepare(&program)?;
    let opts = args.algo.options();

    let mut runs = Vec::new();
    if bench {
        algos::run(&mut engine, alg, &program, &opts)?;
    }
    let mut result = None;
    for _ in 0..if bench { 3 } else { 1 } {
        let t = Instant::now();
        let r = algos::run(&mut engine, alg, &program, &opts)?;
        runs.push(ms(t.elapsed()));
        result = Some(r);
    }
    let result = result.expect("at least one run");
    let mut sorted = runs.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];

    let out = args.out.unwrap_or_else(|| PathBuf::from(format!("{alg}.out")));
    let stats_path = args.stats.unwrap_or_else(|| PathBuf::from(format!("{alg}.stats.json")));
    write_values(&result.values, &out, args.format)?;
    let report = RunReport {
        algorithm: alg.name(),
        graph: args.graph.graph.display().to_string(),
        num_vertices: g.num_vertices(),
        num_edges: g.num_edges(),
        workers: engine.exec().num_workers,
        deterministic: engine.exec().deterministic,
        preprocess_ms: ms(prep),
        wall_ms: runs[runs.len() - 1],
        median_ms: bench.then_some(median),
        runs_ms: if bench { runs.clone() } else { Vec::new() },
        stats: &result.stats,
    };
    std::fs::write(&stats_path, serde_json::to_string_pretty(&report)?)
        .with_context(|| format!("writing {}", stats_path.display()))?;
    if bench {
        println!(
            "{alg}: median {median:.3} ms over {} runs (preprocessing {:.3} ms)",
            runs.len(),
            ms(prep)
        );
    } else {
        println!("{alg}: {:.3} ms (preprocessing {:.3} ms)", runs[0], ms(prep));
    }
    Ok(())
}

fn cmd_tune(args: TuneArgs) -> Result<()> {
    if !(args.budget > 0.0) {
        bail!("--budget must be positive");
    }
    let alg = args.algorithm;
    let g = weighted_for(alg, load_graph(&args.graph)?, args.exec.seed);
    let mut engine = engine_for(&g, &args.exec, None)?;
    let cfg = TuneConfig {
        strategy: match args.strategy {
            StrategyArg::Exhaustive => Strategy::Exhaustive,
            StrategyArg::Random => Strategy::Random,
        },
        budget: Duration::from_secs_f64(args.budget),
        seed: args.exec.seed,
        max_trials: args.max_trials,
        selector: if args.single_direction {
            SpaceSelector::single_direction()
        } else {
            SpaceSelector::full()
        },
        options: args.algo.options(),
    };
    let r = tune::tune(&mut engine, alg, &cfg)?;
    let mut w = csv::Writer::from_path(&args.csv).with_context(|| format!("writing {}", args.csv.display()))?;
    w.write_record(["schedule_id", "schedule", "median_ms", "pass"])?;
    for t in &r.trials {
        w.write_record([
            t.schedule_id.to_string(),
            t.schedule.clone(),
            format!("{:.6}", t.median_ms),
            t.pass.to_string(),
        ])?;
    }
    w.flush()?;
    let Some(best) = r.best else {
        bail!("no trial passed verification");
    };
    let program = r.best_program.expect("best program");
    std::fs::write(&args.out, program.to_string()).with_context(|| format!("writing {}", args.out.display()))?;
    let t = &r.trials[best];
    println!(
        "{} of {} candidates tried; best #{} at {:.3} ms (default {:.3} ms)",
        r.trials.len(),
        r.candidates,
        t.schedule_id,
        t.median_ms,
        r.trials[0].median_ms
    );
    println!("{}", t.schedule);
    Ok(())
}

fn cmd_verify(args: VerifyArgs) -> Result<bool> {
    let alg = args.algorithm;
    let g = weighted_for(alg, load_graph(&args.graph)?, args.exec.seed);
    let program = load_program(&args.schedule)?;
    program.check_labels(alg.labels())?;
    let mut engine = engine_for(&g, &args.exec, Some(&args.schedule))?;
    let opts = args.algo.options();
    let mut programs = vec![("given".to_string(), program)];
    if args.samples > 0 {
        let cfg = TuneConfig {
            strategy: Strategy::Random,
            seed: args.exec.seed,
            max_trials: Some(args.samples),
            ..Default::default()
        };
        for (id, s) in tune::candidates(alg, &cfg) {
            programs.push((format!("#{id}"), tune::program_for(&s)));
        }
    }
    let mut passed = 0;
    for (name, p) in &programs {
        let r = verify::verify(&mut engine, alg, p, &opts)?;
        passed += usize::from(r.pass);
        if r.pass {
            println!("PASS {alg} {name}");
        } else {
            println!("FAIL {alg} {name}: {} mismatches, {}", r.mismatches, r.detail);
        }
    }
    println!("{passed} of {} schedules passed", programs.len());
    Ok(passed == programs.len())
}

fn cmd_convert(args: ConvertArgs) -> Result<()> {
    let g = load_graph(&args.graph)?;
    match args.block {
        Some(n) => {
            let t = Instant::now();
            let bg = block_edges(&g, n)?;
            bg.save(&args.output)?;
            println!(
                "wrote {} segments of {} vertices to {} ({:.3} ms)",
                bg.number_of_segments(),
                n,
                args.output.display(),
                ms(t.elapsed())
            );
        }
        None => {
            let mut text = String::new();
            let w = g.coo_weights();
            for (e, (u, v)) in g.edges().enumerate() {
                match w {
                    Some(w) => text.push_str(&format!("{u} {v} {}\n", w[e])),
                    None => text.push_str(&format!("{u} {v}\n")),
                }
            }
            std::fs::write(&args.output, text).with_context(|| format!("writing {}", args.output.display()))?;
            println!("wrote {} edges to {}", g.num_edges(), args.output.display());
        }
    }
    Ok(())
}

fn cmd_list(args: ListArgs) {
    let algs: Vec<Algorithm> = match args.algorithm {
        Some(a) => vec![a],
        None => Algorithm::ALL.to_vec(),
    };
    for a in algs {
        println!("{a}");
        for (label, doc) in a.label_docs() {
            println!("  {label:<8} {doc}");
        }
    }
    if args.space {
        let doc = documented_space();
        let space = enumerate_space(&SpaceSelector::full(), &Schedule::default());
        println!();
        println!("{doc}");
        println!("enumerated valid schedules: {}", space.valid());
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let r = match cli.command {
        Command::Run(a) => cmd_run(a, false).map(|_| true),
        Command::Bench(a) => cmd_run(a, true).map(|_| true),
        Command::Tune(a) => cmd_tune(a).map(|_| true),
        Command::Verify(a) => cmd_verify(a),
        Command::Convert(a) => cmd_convert(a).map(|_| true),
        Command::ListLabels(a) => {
            cmd_list(a);
            Ok(true)
        }
    };
    match r {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
