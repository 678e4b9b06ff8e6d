use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Args, Parser, Subcommand};

use gpisgrasp::artifacts::Mode;
use gpisgrasp::config::RunConfig;
use gpisgrasp::report::{write_report, RunData};
use gpisgrasp::run::{self, RunError};

#[derive(Parser)]
#[command(name = "gpisgrasp", version, about = "GPIS tactile grasp exploration simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bayesian-optimisation exploration.
    Explore(RunArgs),
    /// Heuristic baseline with the same evaluation.
    Baseline(RunArgs),
    /// Summaries and plots across run directories.
    Report {
        /// Run directories written by explore or baseline.
        #[arg(required = true)]
        runs: Vec<PathBuf>,
        #[arg(long, default_value = "report")]
        out: PathBuf,
        /// Threshold for the cumulative stable-grasp count.
        #[arg(long, default_value_t = 0.5)]
        stable_pfc: f64,
    },
    /// Shape model only, from a cloud file or the configured object's view.
    Reconstruct {
        #[command(flatten)]
        common: CommonArgs,
        /// `x y z` point cloud; omitted, the object's single view is rendered.
        #[arg(long)]
        cloud: Option<PathBuf>,
    },
}

#[derive(Args)]
struct CommonArgs {
    /// Run config file; every key is optional.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Seed, or a batch: `1,2,7` or `1-5`.
    #[arg(long)]
    seed: Option<String>,
    /// Builtin object name or OBJ path.
    #[arg(long)]
    object: Option<String>,
    /// Output directory; batches get one `seed-N` directory each.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Iteration budget (overrides exploration.n_stop).
    #[arg(long)]
    iterations: Option<usize>,
}

enum Failure {
    Config(String),
    Run(RunError),
}

impl Failure {
    fn report(&self) -> ExitCode {
        match self {
            Failure::Config(m) => {
                eprintln!("error: {m}");
                ExitCode::from(2)
            }
            Failure::Run(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        }
    }
}

fn parse_seeds(s: &str) -> Result<Vec<u64>, String> {
    let bad = || format!("bad --seed {s:?}: expected N, N,M,... or N-M");
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once('-') {
            let (a, b): (u64, u64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b < a {
                return Err(bad());
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    if out.is_empty() {
        return Err(bad());
    }
    Ok(out)
}

/// Base config plus command-line overrides, one per seed.
fn configs(common: &CommonArgs, iterations: Option<usize>) -> Result<Vec<RunConfig>, Failure> {
    let mut base = match &common.config {
        Some(p) => RunConfig::load(p).map_err(|e| Failure::Run(e.into()))?,
        None => RunConfig::default(),
    };
    if let Some(o) = &common.object {
        base.run.object = o.clone();
    }
    if let Some(n) = iterations {
        base.exploration.n_stop = n;
    }
    if let Some(o) = &common.out {
        base.run.out = o.display().to_string();
    }
    let seeds = match &common.seed {
        Some(s) => parse_seeds(s).map_err(Failure::Config)?,
        None => vec![base.run.seed],
    };
    let batch = seeds.len() > 1;
    let out = PathBuf::from(&base.run.out);
    let cfgs: Vec<RunConfig> = seeds
        .into_iter()
        .map(|seed| {
            let mut c = base.clone();
            c.run.seed = seed;
            if batch {
                c.run.out = out.join(format!("seed-{seed}")).display().to_string();
            }
            c
        })
        .collect();
    for c in &cfgs {
        c.validate().map_err(Failure::Config)?;
    }
    Ok(cfgs)
}

/// Worker count: `GG_THREADS` if set, else the available parallelism.
fn worker_count(jobs: usize) -> Result<usize, Failure> {
    let avail = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1);
    let cap = match std::env::var("GG_THREADS") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Config(format!("GG_THREADS must be a positive integer, got {v:?}")))?,
        Err(_) => avail,
    };
    Ok(cap.min(jobs).max(1))
}

/// Independent seeded runs, at most `GG_THREADS` at a time. Output order
/// follows the input order regardless of scheduling.
fn run_batch(cfgs: Vec<RunConfig>, mode: Mode) -> Result<(), Failure> {
    let workers = worker_count(cfgs.len())?;
    let next = AtomicUsize::new(0);
    let results: Mutex<Vec<Option<Result<String, RunError>>>> = Mutex::new((0..cfgs.len()).map(|_| None).collect());
    std::thread::scope(|s| {
        for _ in 0..workers {
            s.spawn(|| loop {
                let k = next.fetch_add(1, Ordering::Relaxed);
                let Some(cfg) = cfgs.get(k) else { break };
                let r = run::run(cfg, mode).map(|o| {
                    format!(
                        "{} {} seed {}: {} iterations, best P_FC {}, {} stable grasps -> {}",
                        mode.name(),
                        o.summary.object,
                        o.summary.seed,
                        o.summary.iterations,
                        o.summary.best_pfc,
                        o.summary.stable_grasps,
                        o.dir.display()
                    )
                });
                results.lock().expect("no panics while holding the lock")[k] = Some(r);
            });
        }
    });
    let mut first_err = None;
    for r in results.into_inner().expect("workers joined").into_iter().flatten() {
        match r {
            Ok(line) => println!("{line}"),
            Err(e) => {
                eprintln!("error: {e}");
                first_err.get_or_insert(e);
            }
        }
    }
    match first_err {
        Some(e) => Err(Failure::Run(e)),
        None => Ok(()),
    }
}

fn report(runs: &[PathBuf], out: &Path, stable_pfc: f64) -> Result<(), Failure> {
    if !(stable_pfc > 0.0 && stable_pfc < 1.0) {
        return Err(Failure::Config("--stable-pfc must be in (0, 1)".into()));
    }
    let data = runs
        .iter()
        .map(|d| RunData::load(d))
        .collect::<Result<Vec<_>, _>>()
        .map_err(|e| Failure::Config(e.to_string()))?;
    let files = write_report(&data, out, stable_pfc).map_err(|e| Failure::Run(RunError::Io {
        path: e.path,
        source: std::io::Error::other(e.message),
    }))?;
    print!("{}", files.text);
    for f in files.written {
        println!("wrote {}", f.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Explore(a) => configs(&a.common, a.iterations).and_then(|c| run_batch(c, Mode::Explore)),
        Command::Baseline(a) => configs(&a.common, a.iterations).and_then(|c| run_batch(c, Mode::Baseline)),
        Command::Report { runs, out, stable_pfc } => report(&runs, &out, stable_pfc),
        Command::Reconstruct { common, cloud } => configs(&common, None).and_then(|cfgs| {
            for cfg in &cfgs {
                let r = run::reconstruct(cfg, cloud.as_deref()).map_err(Failure::Run)?;
                println!(
                    "{} points, com {:?}, mean variance {}{} -> {}",
                    r.points,
                    r.com,
                    r.mean_variance,
                    r.hausdorff.map(|h| format!(", Hausdorff {h}")).unwrap_or_default(),
                    cfg.run.out
                );
            }
            Ok(())
        }),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => f.report(),
    }
}
