//! Command-line front end: run one experiment or a sweep of configs, emit the
//! JSON report plus one CSV per metric, and return a meaningful exit code:
//! 0 all verdicts pass, 1 some verdict failed, 2 usage or config error,
//! 3 I/O error.

use clap::Parser;
use nlw_core::config::RunConfig;
use nlw_core::report::{self, ExperimentReport};
use nlw_core::{experiments, NlwError};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

#[derive(Parser, Debug)]
#[command(
    name = "nlw",
    about = "numerical laboratory for the radial energy-critical wave equation",
    version
)]
struct Cli {
    /// Config file in the documented key = value format
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Experiment name (overrides the config file)
    #[arg(long, value_name = "NAME")]
    experiment: Option<String>,
    /// Override one config key, e.g. --set lambda=1 (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
    /// Output directory (overrides the config file)
    #[arg(long, value_name = "DIR")]
    out: Option<PathBuf>,
    /// File listing config paths (one per line) to run as a sweep
    #[arg(long, value_name = "PATH")]
    sweep: Option<PathBuf>,
    /// Print the experiment registry and exit
    #[arg(long)]
    list: bool,
}

const EXIT_PASS: u8 = 0;
const EXIT_VERDICT: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_IO: u8 = 3;

fn error_code(e: &NlwError) -> u8 {
    match e {
        NlwError::Io(_) => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

fn load_config(path: &Path) -> Result<RunConfig, (u8, String)> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| (EXIT_IO, format!("cannot read {}: {e}", path.display())))?;
    RunConfig::parse_str(&text).map_err(|e| (EXIT_USAGE, format!("{}: {e}", path.display())))
}

fn build_config(cli: &Cli) -> Result<RunConfig, (u8, String)> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(name) = &cli.experiment {
        cfg.experiment = name.clone();
    }
    for assignment in &cli.set {
        cfg.apply_set(assignment)
            .map_err(|e| (EXIT_USAGE, e.to_string()))?;
    }
    if let Some(dir) = &cli.out {
        cfg.out_dir = dir.display().to_string();
    }
    cfg.validate().map_err(|e| (EXIT_USAGE, e.to_string()))?;
    Ok(cfg)
}

/// Run one validated config: execute, write outputs, print verdict lines.
fn execute(cfg: &RunConfig) -> Result<ExperimentReport, (u8, String)> {
    let report =
        experiments::run(&cfg.experiment, cfg).map_err(|e| (error_code(&e), e.to_string()))?;
    let paths = report::write_outputs(&report, cfg, Path::new(&cfg.out_dir))
        .map_err(|e| (EXIT_IO, e.to_string()))?;
    let hash = report::config_hash(cfg);
    println!("experiment {} ({hash})", report.name);
    for v in &report.verdicts {
        let mark = if v.passed { "PASS" } else { "FAIL" };
        if v.tolerance.is_nan() {
            println!("  [{mark}] {} measured={:.6e}", v.label, v.measured);
        } else {
            println!(
                "  [{mark}] {} measured={:.6e} tolerance={:.6e}",
                v.label, v.measured, v.tolerance
            );
        }
    }
    if let Some(t) = report.blowup_time {
        println!("  blow-up at t = {t:.4}");
    }
    println!("report: {}", paths[0].display());
    Ok(report)
}

fn sweep_threads(jobs: usize) -> usize {
    let hardware = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1);
    let cap = std::env::var("NLW_THREADS")
        .ok()
        .and_then(|v| v.parse::<usize>().ok())
        .filter(|&n| n >= 1)
        .unwrap_or(hardware);
    cap.min(jobs).max(1)
}

fn run_sweep(cli: &Cli, list_path: &Path) -> u8 {
    let text = match std::fs::read_to_string(list_path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", list_path.display());
            return EXIT_IO;
        }
    };
    let mut configs = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        match load_config(Path::new(line)) {
            Ok(mut cfg) => {
                if let Some(dir) = &cli.out {
                    cfg.out_dir = dir.display().to_string();
                }
                if let Err(e) = cfg.validate() {
                    eprintln!("error: {line}: {e}");
                    return EXIT_USAGE;
                }
                configs.push((line.to_string(), cfg));
            }
            Err((code, msg)) => {
                eprintln!("error: {msg}");
                return code;
            }
        }
    }
    if configs.is_empty() {
        eprintln!("error: sweep file {} lists no configs", list_path.display());
        return EXIT_USAGE;
    }

    // fixed worker pool over a shared job index; each worker owns its runs
    let next = AtomicUsize::new(0);
    // per config: (display name, pass/fail or (exit code, message))
    type Outcome = (String, Result<bool, (u8, String)>);
    let results: Mutex<Vec<Outcome>> = Mutex::new(Vec::new());
    let workers = sweep_threads(configs.len());
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some((label, cfg)) = configs.get(i) else {
                    break;
                };
                let outcome = experiments::run(&cfg.experiment, cfg)
                    .map_err(|e| (error_code(&e), e.to_string()))
                    .and_then(|rep| {
                        report::write_outputs(&rep, cfg, Path::new(&cfg.out_dir))
                            .map_err(|e| (EXIT_IO, e.to_string()))?;
                        Ok(rep.passed())
                    });
                results.lock().unwrap().push((label.clone(), outcome));
            });
        }
    });

    let mut results = results.into_inner().unwrap();
    results.sort_by(|a, b| a.0.cmp(&b.0));
    let mut code = EXIT_PASS;
    for (label, outcome) in &results {
        match outcome {
            Ok(true) => println!("{label}: pass"),
            Ok(false) => {
                println!("{label}: FAIL");
                code = code.max(EXIT_VERDICT);
            }
            Err((c, msg)) => {
                eprintln!("{label}: error: {msg}");
                code = code.max(*c);
            }
        }
    }
    code
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.list {
        for name in experiments::REGISTRY {
            println!("{name}");
        }
        return ExitCode::from(EXIT_PASS);
    }
    if let Some(path) = cli.sweep.clone() {
        return ExitCode::from(run_sweep(&cli, &path));
    }
    let cfg = match build_config(&cli) {
        Ok(cfg) => cfg,
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(code);
        }
    };
    match execute(&cfg) {
        Ok(report) => ExitCode::from(if report.passed() {
            EXIT_PASS
        } else {
            EXIT_VERDICT
        }),
        Err((code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
