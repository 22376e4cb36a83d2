//! Command-line harness: seeded, reproducible experiments over the
//! fractional-diffusion simulation and drift-estimation library.
//!
//! Exit codes: 0 = all checks pass, 1 = a check failed, 2 = config error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fracdrift::config::{ExperimentConfig, SelftestConfig};
use fracdrift::experiment;
use fracdrift::report::{ReportMeta, Table};
use fracdrift::selftest::run_selftest;

#[derive(Parser)]
#[command(name = "fracdrift", version, about = "Fractional-diffusion drift estimation experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct RunOpts {
    /// experiment config (JSON)
    #[arg(long)]
    config: PathBuf,
    /// override the master seed from the config
    #[arg(long)]
    seed: Option<u64>,
    /// worker threads (default: all cores)
    #[arg(long)]
    workers: Option<usize>,
    /// output directory for CSV reports
    #[arg(long, default_value = "out")]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Run the built-in module checks
    Selftest {
        /// negative-control hook; "constants" corrupts the Hurst constants
        #[arg(long)]
        inject_fault: Option<String>,
        #[arg(long)]
        workers: Option<usize>,
    },
    /// Generate fBm / diffusion paths as CSV files
    Simulate(RunOpts),
    /// Batch-estimate the drift from diffusion CSV paths
    Estimate(RunOpts),
    /// Error-vs-horizon consistency experiment
    Consistency(RunOpts),
    /// Deviation-probability bound conformance experiment
    Deviation(RunOpts),
    /// Ergodic time-average and event-probability studies
    Ergodic(RunOpts),
}

fn main() -> ExitCode {
    match run() {
        Ok(pass) => {
            if pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn run() -> anyhow::Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Selftest { inject_fault, workers } => {
            init_workers(workers);
            let report = run_selftest(&SelftestConfig { inject_fault })?;
            print!("{}", report.summary());
            Ok(report.pass())
        }
        Command::Simulate(opts) => {
            let (cfg, meta) = load(&opts)?;
            let c = match cfg {
                ExperimentConfig::Simulate(c) => c,
                _ => anyhow::bail!("config is not a simulate experiment"),
            };
            let rep = experiment::run_simulate(&c, &opts.out)?;
            let _ = meta;
            println!("simulate: wrote {} files to {}", rep.files.len(), opts.out.display());
            Ok(true)
        }
        Command::Estimate(opts) => {
            let (cfg, meta) = load(&opts)?;
            let c = match cfg {
                ExperimentConfig::Estimate(c) => c,
                _ => anyhow::bail!("config is not an estimate experiment"),
            };
            let table = experiment::run_estimate(&c)?;
            write_table(&opts.out, "estimates.csv", &table, &meta)?;
            println!("estimate: {} rows -> {}", table.rows.len(), opts.out.join("estimates.csv").display());
            Ok(true)
        }
        Command::Consistency(opts) => {
            let (cfg, meta) = load(&opts)?;
            let c = match cfg {
                ExperimentConfig::Consistency(c) => c,
                _ => anyhow::bail!("config is not a consistency experiment"),
            };
            let rep = experiment::run_consistency(&c)?;
            write_table(&opts.out, "consistency.csv", &rep.table(), &meta)?;
            write_summary(&opts.out, &rep.summary())?;
            print!("{}", rep.summary());
            Ok(rep.pass())
        }
        Command::Deviation(opts) => {
            let (cfg, meta) = load(&opts)?;
            let c = match cfg {
                ExperimentConfig::Deviation(c) => c,
                _ => anyhow::bail!("config is not a deviation experiment"),
            };
            let rep = experiment::run_deviation(&c)?;
            write_table(&opts.out, "deviation.csv", &rep.table(), &meta)?;
            write_summary(&opts.out, &rep.summary())?;
            print!("{}", rep.summary());
            Ok(rep.pass())
        }
        Command::Ergodic(opts) => {
            let (cfg, meta) = load(&opts)?;
            let c = match cfg {
                ExperimentConfig::Ergodic(c) => c,
                _ => anyhow::bail!("config is not an ergodic experiment"),
            };
            let rep = experiment::run_ergodic(&c)?;
            write_table(&opts.out, "ergodic.csv", &rep.table(), &meta)?;
            if !rep.event_rows.is_empty() {
                write_table(&opts.out, "ergodic_events.csv", &rep.event_table(), &meta)?;
            }
            write_summary(&opts.out, &rep.summary())?;
            print!("{}", rep.summary());
            Ok(rep.pass())
        }
    }
}

fn load(opts: &RunOpts) -> anyhow::Result<(ExperimentConfig, ReportMeta)> {
    init_workers(opts.workers);
    let text = std::fs::read_to_string(&opts.config)?;
    let mut cfg = ExperimentConfig::from_json(&text)?;
    if let Some(seed) = opts.seed {
        cfg.set_seed(seed);
    }
    let seed = match &cfg {
        ExperimentConfig::Simulate(c) => c.seed,
        ExperimentConfig::Consistency(c) => c.seed,
        ExperimentConfig::Deviation(c) => c.seed,
        ExperimentConfig::Ergodic(c) => c.seed,
        _ => 0,
    };
    let meta = ReportMeta::now(cfg.hash(), seed, git_revision());
    Ok((cfg, meta))
}

fn init_workers(workers: Option<usize>) {
    if let Some(n) = workers {
        // a later call fails once the global pool exists; that is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn git_revision() -> Option<String> {
    let out = std::process::Command::new("git")
        .args(["rev-parse", "--short", "HEAD"])
        .output()
        .ok()?;
    if !out.status.success() {
        return None;
    }
    Some(String::from_utf8_lossy(&out.stdout).trim().to_string())
}

fn write_table(dir: &Path, name: &str, table: &Table, meta: &ReportMeta) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join(name), table.to_csv(meta))?;
    Ok(())
}

fn write_summary(dir: &Path, text: &str) -> anyhow::Result<()> {
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("summary.txt"), text)?;
    Ok(())
}
