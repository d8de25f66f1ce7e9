use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;

use dyngossip::bounds::{self, BoundReport};
use dyngossip::experiment::{self, ExperimentConfig, ExperimentKind};
use dyngossip::generators::Family;
use dyngossip::io::{self as gio, ScheduleSource};
use dyngossip::metrics::{self, to_f64};
use dyngossip::rng::CounterRng;
use dyngossip::schedule::{DynamicSchedule, Recording};
use dyngossip::sim::{self, Protocol, SimConfig};
use dyngossip::{Error, Graph, Result, VertexSet};

#[derive(Parser)]
#[command(name = "dyngossip", version, about = "Push-pull rumor spreading on dynamic graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Exact conductance, diligence and absolute diligence of a graph file.
    Metrics {
        graph: PathBuf,
        /// Largest n for subset enumeration.
        #[arg(long, default_value_t = 20)]
        cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Run independent trials and print `trial,seed,completion_time,events`.
    Simulate {
        /// Graph file or schedule directory.
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long, default_value = "async-push-pull")]
        protocol: String,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        trials: u64,
        /// Initial vertex, or `random` for a uniform one per trial.
        #[arg(long)]
        initial: Option<String>,
        /// Write the first trial's contact events as JSON lines.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long)]
        horizon: Option<f64>,
    },
    /// Write a schedule directory for a graph family.
    Generate {
        /// static-star, static-clique, static-expander, dynamic-star,
        /// two-clique, g-n-rho or gbar-n-rho.
        family: String,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        rho: Option<f64>,
        #[arg(long)]
        k: Option<usize>,
        /// Degree for static-expander.
        #[arg(long)]
        degree: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Per-step metrics and the T / T_abs crossings over a schedule prefix.
    Bounds {
        #[arg(long)]
        schedule: PathBuf,
        #[arg(long)]
        prefix: usize,
        #[arg(long, default_value_t = bounds::DEFAULT_C)]
        c: f64,
        #[arg(long, default_value_t = 20)]
        cap: usize,
        /// Seed of the run that drives an adaptive schedule.
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
    /// Run a named experiment and write raw.csv, summary.csv and verdicts.json.
    Experiment {
        name: String,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse().command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Metrics { graph, cap, json } => metrics_cmd(&graph, cap, json)?,
        Command::Simulate { schedule, protocol, seed, trials, initial, trace, horizon } => {
            simulate_cmd(&schedule, &protocol, seed, trials, initial.as_deref(), trace.as_deref(), horizon)?
        }
        Command::Generate { family, n, rho, k, degree, seed, out } => {
            generate_cmd(&family, n, rho, k, degree, seed, &out)?
        }
        Command::Bounds { schedule, prefix, c, cap, seed, json } => bounds_cmd(&schedule, prefix, c, cap, seed, json)?,
        Command::Experiment { name, config, out } => return experiment_cmd(&name, config.as_deref(), &out),
    }
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct MetricsOut {
    n: usize,
    connected: bool,
    conductance: String,
    conductance_value: f64,
    conductance_witness: Option<Vec<usize>>,
    diligence: String,
    diligence_value: f64,
    diligence_witness: Option<Vec<usize>>,
    absolute_diligence: String,
    absolute_diligence_value: f64,
    absolute_witness: Option<(usize, usize)>,
}

fn metrics_cmd(path: &Path, cap: usize, json: bool) -> Result<()> {
    let g = gio::read_graph(path)?;
    let r = metrics::metric_report(&g, cap)?;
    let set = |s: &Option<VertexSet>| s.as_ref().map(|s| s.iter().collect::<Vec<_>>());
    let out = MetricsOut {
        n: r.n,
        connected: r.connected,
        conductance: r.conductance.to_string(),
        conductance_value: to_f64(&r.conductance),
        conductance_witness: set(&r.conductance_witness),
        diligence: r.diligence.to_string(),
        diligence_value: to_f64(&r.diligence),
        diligence_witness: set(&r.diligence_witness),
        absolute_diligence: r.absolute_diligence.to_string(),
        absolute_diligence_value: to_f64(&r.absolute_diligence),
        absolute_witness: r.absolute_witness,
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&out)?);
        return Ok(());
    }
    println!("n                   {}", out.n);
    println!("connected           {}", out.connected);
    println!("conductance         {} ({:.6}) witness {:?}", out.conductance, out.conductance_value, out.conductance_witness);
    println!("diligence           {} ({:.6}) witness {:?}", out.diligence, out.diligence_value, out.diligence_witness);
    println!(
        "absolute diligence  {} ({:.6}) witness {:?}",
        out.absolute_diligence, out.absolute_diligence_value, out.absolute_witness
    );
    Ok(())
}

/// Stream id for drawing a random initial vertex; disjoint from clock and
/// neighbor streams, which are `2v` and `2v + 1`.
const INITIAL_STREAM: u64 = u64::MAX;

fn initial_vertex(spec: Option<&str>, source: &ScheduleSource, seed: u64) -> Result<usize> {
    let n = source.n();
    let v = match spec {
        None => source.default_source(),
        Some("random") => CounterRng::new(seed, INITIAL_STREAM, 0).index(n),
        Some(s) => s.parse().map_err(|_| Error::Config(format!("--initial must be a vertex or `random`, got {s:?}")))?,
    };
    if v >= n {
        return Err(Error::Config(format!("initial vertex {v} is outside 0..{n}")));
    }
    Ok(v)
}

fn simulate_cmd(
    path: &Path,
    protocol: &str,
    seed: u64,
    trials: u64,
    initial: Option<&str>,
    trace: Option<&Path>,
    horizon: Option<f64>,
) -> Result<()> {
    let source = gio::load_schedule(path)?;
    let protocol = Protocol::parse(protocol)?;
    let stdout = io::stdout();
    let mut w = csv::Writer::from_writer(stdout.lock());
    w.write_record(["trial", "seed", "completion_time", "events"])?;
    for trial in 0..trials {
        let s = seed + trial;
        let v = initial_vertex(initial, &source, s)?;
        let mut schedule = source.build(None)?;
        let mut cfg = SimConfig::new(protocol, s, VertexSet::from_vertices(source.n(), [v]));
        if let Some(h) = horizon {
            cfg = cfg.with_horizon(h);
        }
        let record = trial == 0 && trace.is_some();
        if record {
            cfg = cfg.recording();
        }
        let t = sim::simulate(&mut *schedule, &cfg)?;
        if record {
            let p = trace.expect("checked above");
            fs::write(p, t.to_jsonl()).map_err(|e| Error::Config(format!("{}: {e}", p.display())))?;
        }
        let completion = t.completion_time.map_or_else(|| "inf".to_string(), |x| x.to_string());
        w.write_record([trial.to_string(), s.to_string(), completion, t.num_events.to_string()])?;
    }
    w.flush().map_err(|e| Error::Config(e.to_string()))?;
    Ok(())
}

fn family_from_args(code: &str, n: usize, rho: Option<f64>, k: Option<usize>, degree: Option<usize>) -> Result<Family> {
    let need_rho = || rho.ok_or_else(|| Error::Config(format!("{code} needs --rho")));
    Ok(match code {
        "static-star" => Family::StaticStar { n },
        "static-clique" => Family::StaticClique { n },
        "static-expander" => Family::StaticExpander { n, degree: degree.unwrap_or(4) },
        "dynamic-star" => Family::DynamicStar { n },
        "two-clique" => Family::TwoClique { n },
        "g-n-rho" => Family::GNRho { n, rho: need_rho()?, k },
        "gbar-n-rho" => Family::GbarNRho { n, rho: need_rho()? },
        other => return Err(Error::Config(format!("unknown family {other:?}"))),
    })
}

fn generate_cmd(
    code: &str,
    n: usize,
    rho: Option<f64>,
    k: Option<usize>,
    degree: Option<usize>,
    seed: u64,
    out: &Path,
) -> Result<()> {
    let family = family_from_args(code, n, rho, k, degree)?;
    if family.is_adaptive() {
        // fail now rather than at simulation time
        family.build(seed)?;
        gio::write_adaptive_schedule(out, &family, seed)?;
        println!("wrote adaptive:{} manifest to {}", family.code(), out.display());
        return Ok(());
    }
    let mut s = family.build(seed)?;
    let none = VertexSet::new(s.n());
    let graphs: Vec<Graph> = match family {
        // the bridge only exists at step 0; later steps repeat the second graph
        Family::TwoClique { .. } => vec![(*s.graph_at(0, &none)?).clone(), (*s.graph_at(1, &none)?).clone()],
        _ => vec![(*s.graph_at(0, &none)?).clone()],
    };
    let files = gio::write_graph_schedule(out, &graphs)?;
    println!("wrote {} graph file(s) and a manifest to {}", files.len(), out.display());
    Ok(())
}

/// The first `len` snapshots. Adaptive schedules are driven by one
/// asynchronous run from their default source.
fn realized_prefix(source: &ScheduleSource, len: usize, seed: u64) -> Result<Vec<Graph>> {
    let mut inner = source.build(None)?;
    let n = inner.n();
    let steps = match source {
        ScheduleSource::Adaptive { .. } => {
            let mut rec = Recording::new(&mut *inner);
            let cfg = SimConfig::new(Protocol::AsyncPushPull, seed, VertexSet::from_vertices(n, [source.default_source()]))
                .with_horizon(len.max(1) as f64);
            let t = sim::run_async(&mut rec, &cfg)?;
            let informed = if t.completed() { VertexSet::full(n) } else { VertexSet::from_vertices(n, [source.default_source()]) };
            // the run queries every step it reaches; finish the prefix after completion
            let mut step = 0u64;
            while (step as usize) < len {
                rec.graph_at(step, &informed)?;
                step += 1;
            }
            rec.into_steps()
        }
        _ => dyngossip::schedule::prefix(&mut *inner, &VertexSet::new(n), len)?,
    };
    Ok(steps.into_iter().take(len).map(|g| (*g).clone()).collect())
}

fn bounds_cmd(path: &Path, len: usize, c: f64, cap: usize, seed: u64, json: bool) -> Result<()> {
    let source = gio::load_schedule(path)?;
    let prefix = realized_prefix(&source, len, seed)?;
    let report = bounds::bound_report(&prefix, c, cap)?;
    if json {
        println!("{}", serde_json::to_string_pretty(&report)?);
    } else {
        print_bounds_csv(&report)?;
    }
    Ok(())
}

fn print_bounds_csv(r: &BoundReport) -> Result<()> {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    let opt = |x: Option<f64>| x.map_or_else(String::new, |v| v.to_string());
    let mut w = csv::Writer::from_writer(&mut lock);
    w.write_record(["step", "connected", "conductance", "diligence", "absolute_diligence"])?;
    for row in &r.rows {
        w.write_record([
            row.step.to_string(),
            row.connected.to_string(),
            opt(row.conductance),
            opt(row.diligence),
            row.absolute_diligence.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::Config(e.to_string()))?;
    drop(w);
    let crossing = |c: Option<&bounds::Crossing>| match c {
        Some(c) => serde_json::to_string(c).expect("crossings serialize"),
        None => "over enumeration cap".into(),
    };
    let _ = writeln!(lock, "# C = {:.6}, C ln n = {:.6}", r.constants.big_c, r.constants.conductance_threshold);
    let _ = writeln!(lock, "# T     {}", crossing(r.t_conductance.as_ref()));
    let _ = writeln!(lock, "# T_abs {}", crossing(Some(&r.t_absolute)));
    let _ = writeln!(lock, "# min   {}", r.combined.map_or_else(|| "not reached".into(), |s| s.to_string()));
    Ok(())
}

fn experiment_cmd(name: &str, config: Option<&Path>, out: &Path) -> Result<ExitCode> {
    let kind = ExperimentKind::parse(name)?;
    let cfg = match config {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::new(kind),
    };
    if cfg.experiment != kind {
        return Err(Error::Config(format!("config is for {}, not {}", cfg.experiment.code(), kind.code())));
    }
    let result = experiment::run_experiment(&cfg)?;
    result.write(out)?;
    for v in &result.verdicts {
        println!(
            "{} {}  observed {:.4}  threshold {:.4}  slack {:.4}",
            if v.passed { "PASS" } else { "FAIL" },
            v.criterion,
            v.observed,
            v.threshold,
            v.slack
        );
    }
    Ok(if result.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}
