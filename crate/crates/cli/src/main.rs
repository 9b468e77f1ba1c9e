mod config;
mod svg;

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use config::ExperimentConfig;
use gfb_core::harness::{
    aggregate_csv, events_json, events_json_many, read_trace_csv, run_replicated, trace_csv,
    AggregateRecord, PolicyKind, RunConfig,
};
use gfb_core::{greedy_dominating_set, make_graph, Error as CoreError, FeedbackGraph, GraphFamily};

/// Experiment runner for online learning with graph feedback.
#[derive(Parser)]
#[command(
    name = "gfb",
    version,
    about = "Run, sweep, and plot graph-feedback bandit experiments",
    after_help = "Environment:\n  GBL_THREADS  caps how many replications run in parallel"
)]
struct Cli {
    /// Suppress progress output on stdout.
    #[arg(long, global = true)]
    quiet: bool,

    /// Overwrite existing output files.
    #[arg(long, global = true)]
    force: bool,

    /// Override the seed from the config file.
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a configured experiment; writes trace.csv, events.json, summary.txt.
    Run {
        /// Experiment config (JSON).
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Run the experiment at several horizons; writes one trace per horizon
    /// plus a scaling summary CSV (columns T, mean_regret, std).
    Sweep {
        /// Experiment config (JSON); its horizon field is ignored.
        config: PathBuf,
        /// Strictly increasing horizons, comma separated.
        #[arg(long, value_delimiter = ',', required = true)]
        horizons: Vec<u64>,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a trace CSV (single-run or aggregate) to a standalone SVG.
    Plot {
        /// Trace CSV produced by `run` or `sweep`.
        trace: PathBuf,
        /// Output SVG path.
        out: PathBuf,
        /// Plot title; defaults to the trace file stem.
        #[arg(long)]
        title: Option<String>,
    },
    /// Show a graph's size, observability, and greedy dominating set.
    GraphInfo {
        /// Path to a graph JSON file, or family spec
        /// `family:K[:edge_prob[:seed]]`, e.g. `bar:4` or
        /// `random_observable:10:0.3:7`.
        spec: String,
    },
}

enum Failure {
    /// Bad input (config, file, parameter): exit 2.
    Input(String),
    /// Runtime failure: exit 1.
    Runtime(String),
}

impl Failure {
    fn code(&self) -> i32 {
        match self {
            Failure::Input(_) => 2,
            Failure::Runtime(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Runtime(m) => m,
        }
    }
}

impl From<CoreError> for Failure {
    fn from(e: CoreError) -> Self {
        if e.is_input_error() {
            Failure::Input(e.to_string())
        } else {
            Failure::Runtime(e.to_string())
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Runtime(e.to_string())
    }
}

fn main() {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Run { config, out } => cmd_run(&cli, config, out),
        Command::Sweep {
            config,
            horizons,
            out,
        } => cmd_sweep(&cli, config, horizons, out),
        Command::Plot { trace, out, title } => cmd_plot(&cli, trace, out, title.as_deref()),
        Command::GraphInfo { spec } => cmd_graph_info(spec),
    };
    match result {
        Ok(()) => {}
        Err(f) => {
            eprintln!("error: {}", f.message());
            std::process::exit(f.code());
        }
    }
}

fn refuse_clobber(force: bool, paths: &[PathBuf]) -> Result<(), Failure> {
    if force {
        return Ok(());
    }
    for p in paths {
        if p.exists() {
            return Err(Failure::Input(format!(
                "{} already exists (use --force to overwrite)",
                p.display()
            )));
        }
    }
    Ok(())
}

fn load_config(cli: &Cli, path: &Path) -> Result<ExperimentConfig, Failure> {
    let mut config = ExperimentConfig::load(path).map_err(Failure::Input)?;
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    Ok(config)
}

fn cmd_run(cli: &Cli, config_path: &Path, out: &Path) -> Result<(), Failure> {
    let config = load_config(cli, config_path)?;
    let rc = config.run_config();
    rc.resolve()?; // surface config problems before touching the filesystem

    let trace_path = out.join("trace.csv");
    let events_path = out.join("events.json");
    let summary_path = out.join("summary.txt");
    let plot_path = out.join("plot.svg");
    let mut outputs = vec![trace_path.clone(), events_path.clone(), summary_path.clone()];
    if config.plot {
        outputs.push(plot_path.clone());
    }
    refuse_clobber(cli.force, &outputs)?;
    std::fs::create_dir_all(out)?;

    let agg = run_replicated(&rc, config.seeds)?;

    let trace = if config.seeds == 1 {
        trace_csv(&agg.runs[0])
    } else {
        aggregate_csv(&agg)
    };
    std::fs::write(&trace_path, &trace)?;
    let events = if config.seeds == 1 {
        events_json(&agg.runs[0])
    } else {
        events_json_many(&agg.runs)
    };
    std::fs::write(&events_path, events)?;
    std::fs::write(&summary_path, summary_text(&rc, &config, &agg)?)?;
    if config.plot {
        let data = read_trace_csv(&trace_path)?;
        let title = config
            .plot_title
            .clone()
            .unwrap_or_else(|| default_title(&rc));
        std::fs::write(&plot_path, svg::render(&data, &title))?;
    }

    if !cli.quiet {
        println!(
            "wrote {} ({} seeds, mean final regret {:.3}, wall {:.2}s)",
            out.display(),
            config.seeds,
            agg.mean_total_regret,
            agg.wall.as_secs_f64()
        );
    }
    Ok(())
}

fn cmd_sweep(
    cli: &Cli,
    config_path: &Path,
    horizons: &[u64],
    out: &Path,
) -> Result<(), Failure> {
    if horizons.is_empty() {
        return Err(Failure::Input("no horizons given".into()));
    }
    if horizons.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Failure::Input(format!(
            "horizons must be strictly increasing, got {horizons:?}"
        )));
    }
    let config = load_config(cli, config_path)?;

    let summary_path = out.join("sweep_summary.csv");
    let mut outputs = vec![summary_path.clone()];
    for &t in horizons {
        outputs.push(out.join(format!("trace_T{t}.csv")));
    }
    refuse_clobber(cli.force, &outputs)?;
    std::fs::create_dir_all(out)?;

    let mut summary = String::from("T,mean_regret,std\n");
    for &horizon in horizons {
        let mut rc = config.run_config();
        rc.horizon = horizon;
        rc.resolve()?;
        let agg = run_replicated(&rc, config.seeds)?;
        let trace = if config.seeds == 1 {
            trace_csv(&agg.runs[0])
        } else {
            aggregate_csv(&agg)
        };
        std::fs::write(out.join(format!("trace_T{horizon}.csv")), trace)?;
        let _ = writeln!(
            summary,
            "{horizon},{},{}",
            agg.mean_total_regret, agg.std_total_regret
        );
        if !cli.quiet {
            println!(
                "T={horizon}: mean regret {:.3} (std {:.3}, wall {:.2}s)",
                agg.mean_total_regret,
                agg.std_total_regret,
                agg.wall.as_secs_f64()
            );
        }
    }
    std::fs::write(&summary_path, summary)?;
    if !cli.quiet {
        println!("wrote {}", summary_path.display());
    }
    Ok(())
}

fn cmd_plot(cli: &Cli, trace: &Path, out: &Path, title: Option<&str>) -> Result<(), Failure> {
    let data = read_trace_csv(trace)?;
    refuse_clobber(cli.force, std::slice::from_ref(&out.to_path_buf()))?;
    let fallback = trace
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "regret".into());
    let svg = svg::render(&data, title.unwrap_or(&fallback));
    if let Some(parent) = out.parent() {
        if !parent.as_os_str().is_empty() {
            std::fs::create_dir_all(parent)?;
        }
    }
    std::fs::write(out, svg)?;
    if !cli.quiet {
        println!("wrote {}", out.display());
    }
    Ok(())
}

fn cmd_graph_info(spec: &str) -> Result<(), Failure> {
    let graph = parse_graph_spec(spec)?;
    println!("K: {}", graph.arm_count());
    println!("|E|: {}", graph.edge_count());
    let unobservable = graph.unobservable_arms();
    if unobservable.is_empty() {
        println!("observable: yes");
        let dom = greedy_dominating_set(&graph)?;
        let members: Vec<usize> = dom.members().iter().map(|&a| a + 1).collect();
        println!("greedy dominating set: {members:?} (size {})", dom.len());
    } else {
        println!("observable: NOT OBSERVABLE");
        let arms: Vec<usize> = unobservable.iter().map(|&a| a + 1).collect();
        println!("unobservable arms: {arms:?}");
    }
    Ok(())
}

fn parse_graph_spec(spec: &str) -> Result<FeedbackGraph, Failure> {
    if spec.ends_with(".json") || Path::new(spec).exists() {
        return Ok(FeedbackGraph::from_json_file(spec)?);
    }
    let parts: Vec<&str> = spec.split(':').collect();
    let family = match parts[0] {
        "bandit" => GraphFamily::Bandit,
        "clique_loops" => GraphFamily::CliqueLoops,
        "bar" => GraphFamily::Bar,
        "loopless_cycle" => GraphFamily::LooplessCycle,
        "random_observable" => GraphFamily::RandomObservable,
        other => {
            return Err(Failure::Input(format!(
                "unknown graph family {other:?} (and no such file); families: bandit, \
                 clique_loops, bar, loopless_cycle, random_observable"
            )))
        }
    };
    if parts.len() < 2 {
        return Err(Failure::Input(format!(
            "family spec needs an arm count, e.g. {}:5",
            parts[0]
        )));
    }
    let parse_num = |s: &str, what: &str| -> Result<u64, Failure> {
        s.parse()
            .map_err(|_| Failure::Input(format!("cannot parse {s:?} as {what}")))
    };
    let k = parse_num(parts[1], "an arm count")? as usize;
    let edge_prob = parts
        .get(2)
        .map(|s| {
            s.parse::<f64>()
                .map_err(|_| Failure::Input(format!("cannot parse {s:?} as edge_prob")))
        })
        .transpose()?;
    let seed = parts.get(3).map(|s| parse_num(s, "a seed")).transpose()?;
    // A fixed default seed keeps `graph-info random_observable:K:p` deterministic.
    let seed = seed.or(match family {
        GraphFamily::RandomObservable => Some(0),
        _ => None,
    });
    Ok(make_graph(family, k, edge_prob, seed)?)
}

fn default_title(rc: &RunConfig) -> String {
    format!("{} regret, T={}", policy_name(rc.policy), rc.horizon)
}

fn policy_name(p: PolicyKind) -> &'static str {
    match p {
        PolicyKind::Bobw => "bobw",
        PolicyKind::Exp3g => "exp3g",
        PolicyKind::Uniform => "uniform",
    }
}

/// Deterministic run summary. Wall time goes to stdout only; output files
/// must stay byte-stable across reruns.
fn summary_text(
    rc: &RunConfig,
    config: &ExperimentConfig,
    agg: &AggregateRecord,
) -> Result<String, Failure> {
    let (graph, dom, env) = rc.resolve()?;
    let mut s = String::new();
    let _ = writeln!(s, "policy: {}", policy_name(rc.policy));
    let _ = writeln!(s, "graph: K={}, |E|={}", graph.arm_count(), graph.edge_count());
    let members: Vec<usize> = dom.members().iter().map(|&a| a + 1).collect();
    let _ = writeln!(s, "dominating set: {members:?} (size {})", dom.len());
    let _ = writeln!(
        s,
        "environment: {}",
        if env.is_adversarial() { "adversarial" } else { "stochastic" }
    );
    let _ = writeln!(s, "horizon: {}", rc.horizon);
    let _ = writeln!(s, "delta: {}", rc.delta);
    let _ = writeln!(
        s,
        "seeds: {}..{} ({} replications)",
        rc.seed,
        rc.seed + u64::from(config.seeds),
        config.seeds
    );
    let _ = writeln!(s, "trace stride: {}", rc.trace_stride);
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "final regret: mean {}, std {}",
        agg.mean_total_regret, agg.std_total_regret
    );
    if let Some(last) = agg.points.last() {
        let _ = writeln!(s, "final regret band: q05 {}, q95 {}", last.q05, last.q95);
    }
    let detections = agg
        .runs
        .iter()
        .filter(|r| r.events.detect_round.is_some())
        .count();
    let _ = writeln!(s, "adversary detections: {detections}/{} seeds", agg.runs.len());
    let mean_elims = agg.runs.iter().map(|r| r.events.tau.len()).sum::<usize>() as f64
        / agg.runs.len() as f64;
    let _ = writeln!(s, "eliminations per seed: mean {mean_elims}");
    let _ = writeln!(s);
    let _ = writeln!(s, "per-seed final regret:");
    for run in &agg.runs {
        let _ = writeln!(s, "  seed {}: {}", run.seed, run.total_regret);
    }
    Ok(s)
}
