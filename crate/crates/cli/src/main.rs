//! arrival-lab: a command-line workbench for one-dimensional arrival-time
//! experiments.
//!
//! Exit codes: 0 success, 2 configuration error, 3 convergence failure,
//! 4 acceptance violation (the run finished but a physics invariant in the
//! summary was breached).

mod config;
mod experiments;
mod report;
mod table;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use clap::{Parser, Subcommand};

use config::ScenarioConfig;
use experiments::{run_scenario, RunError};

const EXIT_CONFIG: u8 = 2;
const EXIT_CONVERGENCE: u8 = 3;
const EXIT_VIOLATION: u8 = 4;

#[derive(Parser)]
#[command(
    name = "arrival-lab",
    version,
    about = "Arrival-time distributions, decoherent histories and POVMs on a 1D lattice",
    after_help = "The ARRIVAL_LAB_OUTDIR environment variable overrides output.directory."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a TOML scenario file.
    Run {
        /// Path to the scenario TOML.
        config: PathBuf,
    },
    /// Check a scenario file and report every problem found, without running.
    Validate {
        /// Path to the scenario TOML.
        config: PathBuf,
    },
    /// Run the scenario once per sweep value, in parallel, with
    /// deterministically merged outputs.
    Sweep {
        /// Path to the scenario TOML.
        config: PathBuf,
        /// Parameter to vary (overrides the [sweep] block).
        #[arg(long)]
        param: Option<String>,
        /// Comma-separated values (overrides the [sweep] block).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Option<Vec<f64>>,
        /// Worker threads.
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Aggregate every summary in an output directory into one CSV.
    Report {
        /// Directory holding *summary.json files.
        dir: PathBuf,
        /// Write the aggregate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run { config } => cmd_run(&config),
        Command::Validate { config } => cmd_validate(&config),
        Command::Sweep {
            config,
            param,
            values,
            workers,
        } => cmd_sweep(&config, param, values, workers),
        Command::Report { dir, out } => cmd_report(&dir, out.as_deref()),
    }
}

fn load(path: &Path) -> Result<ScenarioConfig, String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let config = ScenarioConfig::parse(&text)?;
    let errors = config.validate();
    if errors.is_empty() {
        Ok(config)
    } else {
        Err(errors.join("\n"))
    }
}

fn cmd_run(path: &Path) -> ExitCode {
    let config = match load(path) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    run_one(&config, "")
}

/// Run a resolved config, writing artifacts with the given file-stem prefix.
fn run_one(config: &ScenarioConfig, prefix: &str) -> ExitCode {
    match run_scenario(config) {
        Ok(mut artifacts) => {
            let dir = PathBuf::from(config.out_dir());
            match artifacts.write(&dir, prefix, &config.output.formats, &config.hash()) {
                Ok(files) => {
                    for f in &files {
                        println!("wrote {}", dir.join(f).display());
                    }
                }
                Err(e) => {
                    eprintln!("output error: {e:#}");
                    return ExitCode::from(EXIT_CONFIG);
                }
            }
            if artifacts.summary.violations.is_empty() {
                ExitCode::SUCCESS
            } else {
                for v in &artifacts.summary.violations {
                    eprintln!("acceptance violation: {v}");
                }
                ExitCode::from(EXIT_VIOLATION)
            }
        }
        Err(err @ RunError::Config(_)) => {
            eprintln!("{err}");
            ExitCode::from(EXIT_CONFIG)
        }
        Err(err @ RunError::Convergence(_)) => {
            eprintln!("{err}");
            ExitCode::from(EXIT_CONVERGENCE)
        }
    }
}

fn cmd_validate(path: &Path) -> ExitCode {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("cannot read {}: {e}", path.display());
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let config = match ScenarioConfig::parse(&text) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let errors = config.validate();
    if errors.is_empty() {
        println!("ok: {} ({})", config.experiment.kind.name(), config.hash());
        ExitCode::SUCCESS
    } else {
        for e in &errors {
            eprintln!("{e}");
        }
        eprintln!("{} problem(s) found", errors.len());
        ExitCode::from(EXIT_CONFIG)
    }
}

fn cmd_sweep(
    path: &Path,
    param: Option<String>,
    values: Option<Vec<f64>>,
    workers: usize,
) -> ExitCode {
    let base = match load(path) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("{msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    let (param, values) = match (param, values, &base.sweep) {
        (Some(p), Some(v), _) => (p, v),
        (None, None, Some(block)) => (block.parameter.clone(), block.values.clone()),
        (None, None, None) => {
            eprintln!("no sweep requested: pass --param/--values or add a [sweep] block");
            return ExitCode::from(EXIT_CONFIG);
        }
        _ => {
            eprintln!("--param and --values must be given together");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if values.is_empty() {
        eprintln!("sweep values: must be non-empty");
        return ExitCode::from(EXIT_CONFIG);
    }

    // resolve every point up front so a bad assignment fails before any work
    let mut points = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        let point = match base.with_parameter(&param, v) {
            Ok(p) => p,
            Err(msg) => {
                eprintln!("{msg}");
                return ExitCode::from(EXIT_CONFIG);
            }
        };
        let errors = point.validate();
        if !errors.is_empty() {
            eprintln!("sweep point {i} ({param} = {v}):");
            for e in &errors {
                eprintln!("  {e}");
            }
            return ExitCode::from(EXIT_CONFIG);
        }
        points.push(point);
    }

    // worker pool over an atomic index; each point writes under its own
    // prefix, so the merged directory layout is independent of scheduling
    let next = AtomicUsize::new(0);
    let results: Vec<Mutex<Option<ExitCode>>> =
        (0..points.len()).map(|_| Mutex::new(None)).collect();
    let workers = workers.max(1).min(points.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                if i >= points.len() {
                    break;
                }
                let prefix = format!("point{i:03}_");
                let code = run_one(&points[i], &prefix);
                *results[i].lock().unwrap() = Some(code);
            });
        }
    });

    // worst exit code wins, reported in point order
    let mut worst = ExitCode::SUCCESS;
    let mut worst_rank = 0u8;
    for (i, slot) in results.iter().enumerate() {
        let code = slot.lock().unwrap().take().expect("sweep point ran");
        let rank = if code == ExitCode::SUCCESS { 0 } else { 1 };
        if rank > 0 {
            eprintln!("sweep point {i} ({param} = {}) failed", values[i]);
        }
        if rank > worst_rank || (rank > 0 && worst == ExitCode::SUCCESS) {
            worst_rank = rank;
            worst = code;
        }
    }
    println!(
        "sweep complete: {} point(s) of {param} into {}",
        points.len(),
        base.out_dir()
    );
    worst
}

fn cmd_report(dir: &Path, out: Option<&Path>) -> ExitCode {
    match report::aggregate(dir) {
        Ok(csv) => {
            if let Some(path) = out {
                if let Err(e) = std::fs::write(path, &csv) {
                    eprintln!("cannot write {}: {e}", path.display());
                    return ExitCode::from(EXIT_CONFIG);
                }
                println!("wrote {}", path.display());
            } else {
                print!("{csv}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e:#}");
            ExitCode::from(EXIT_CONFIG)
        }
    }
}
