//! Command-line drivers for the experiments: `gbs-flatten`, `cat-prep`,
//! `cubic-prep`, and `verify-cubic`. Each subcommand writes a JSON report to
//! `--out` plus a sibling `<stem>_trajectory.csv` (and, for `gbs-flatten`,
//! `<stem>_histogram.csv` with before/after |A|² distributions). A JSON
//! config file may be supplied via `--config`; explicit flags override its
//! fields. The environment variable `GFQ_HBAR` overrides ħ (default 2).

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use ndarray::Array1;

use gfq::experiments::borealis::{histogram_series, run_gbs_flatten, GbsConfig};
use gfq::experiments::report::write_histogram_csv;
use gfq::experiments::state_prep::{
    run_cat_prep, run_cubic_prep, verify_cubic_solution, CatPrepConfig, CubicPrepConfig,
};
use gfq::experiments::ExperimentReport;

#[derive(Parser)]
#[command(name = "gfq", version, about = "Gaussian quantum optics experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Flatten the A matrix of a layered GBS interferometer
    GbsFlatten(GbsArgs),
    /// Prepare a cat state by heralding photons on the second mode
    CatPrep(CatArgs),
    /// Prepare a cubic phase state by staged heralding on two modes
    CubicPrep(CubicArgs),
    /// Verify the published cubic-phase solution matrix
    VerifyCubic(VerifyArgs),
}

#[derive(Args)]
struct GbsArgs {
    #[arg(long)]
    base: Option<usize>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long)]
    lr: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    squeezing: Option<f64>,
    #[arg(long)]
    max_seconds: Option<f64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CatArgs {
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    herald: Option<usize>,
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long = "symplectic-lr")]
    symplectic_lr: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CubicArgs {
    /// Comma-separated herald schedule, e.g. 2,4,8,12,16
    #[arg(long)]
    schedule: Option<String>,
    #[arg(long)]
    cutoff: Option<usize>,
    #[arg(long = "steps-per-stage")]
    steps_per_stage: Option<usize>,
    #[arg(long = "symplectic-lr")]
    symplectic_lr: Option<f64>,
    #[arg(long = "euclidean-lr")]
    euclidean_lr: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyArgs {
    #[arg(long)]
    out: PathBuf,
}

fn load_config<T: serde::de::DeserializeOwned + Default>(path: &Option<PathBuf>) -> Result<T> {
    match path {
        None => Ok(T::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .with_context(|| format!("reading config {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing config {}", p.display()))
        }
    }
}

fn sibling(out: &Path, suffix: &str) -> PathBuf {
    let stem = out.file_stem().and_then(|s| s.to_str()).unwrap_or("report");
    out.with_file_name(format!("{}_{}.csv", stem, suffix))
}

fn emit(report: &ExperimentReport, out: &Path) -> Result<()> {
    report.write_json(out).context("writing report")?;
    report
        .write_trajectory_csv(&sibling(out, "trajectory"))
        .context("writing trajectory CSV")?;
    println!("report: {}", out.display());
    for (k, v) in &report.metrics {
        println!("  {} = {:.6e}", k, v);
    }
    for note in &report.notes {
        println!("  note: {}", note);
    }
    Ok(())
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::GbsFlatten(args) => {
            let mut config: GbsConfig = load_config(&args.config)?;
            if let Some(v) = args.base {
                config.base = v;
            }
            if let Some(v) = args.depth {
                config.depth = v;
            }
            if let Some(v) = args.steps {
                config.steps = v;
            }
            if let Some(v) = args.lr {
                config.lr = v;
            }
            if let Some(v) = args.seed {
                config.seed = v;
            }
            if let Some(v) = args.squeezing {
                config.squeezing = v;
            }
            if let Some(v) = args.max_seconds {
                config.max_seconds = Some(v);
            }
            let report = run_gbs_flatten(&config)?;
            emit(&report, &args.out)?;
            let initial: Vec<f64> = report
                .extra
                .as_ref()
                .and_then(|e| e.get("initial_angles"))
                .and_then(|v| serde_json::from_value(v.clone()).ok())
                .context("report is missing initial angles")?;
            let final_angles: Vec<f64> = report
                .solution_d
                .clone()
                .context("report is missing final angles")?;
            let (edges, series) = histogram_series(
                &config,
                &Array1::from(initial),
                &Array1::from(final_angles),
            )?;
            let hist_path = sibling(&args.out, "histogram");
            write_histogram_csv(&hist_path, &edges, &series).context("writing histogram CSV")?;
            println!("histogram: {}", hist_path.display());
        }
        Command::CatPrep(args) => {
            let mut config: CatPrepConfig = load_config(&args.config)?;
            if let Some(v) = args.alpha {
                config.alpha = v;
            }
            if let Some(v) = args.herald {
                config.herald = v;
            }
            if let Some(v) = args.cutoff {
                config.cutoff = v;
            }
            if let Some(v) = args.steps {
                config.steps = v;
            }
            if let Some(v) = args.symplectic_lr {
                config.symplectic_lr = v;
            }
            if let Some(v) = args.seed {
                config.seed = v;
            }
            let report = run_cat_prep(&config)?;
            emit(&report, &args.out)?;
        }
        Command::CubicPrep(args) => {
            let mut config: CubicPrepConfig = load_config(&args.config)?;
            if let Some(s) = args.schedule {
                config.schedule = s
                    .split(',')
                    .map(|t| t.trim().parse::<usize>())
                    .collect::<std::result::Result<Vec<_>, _>>()
                    .context("parsing --schedule")?;
            }
            if let Some(v) = args.cutoff {
                config.cutoff = v;
            }
            if let Some(v) = args.steps_per_stage {
                config.steps_per_stage = v;
            }
            if let Some(v) = args.symplectic_lr {
                config.symplectic_lr = v;
            }
            if let Some(v) = args.euclidean_lr {
                config.euclidean_lr = v;
            }
            if let Some(v) = args.seed {
                config.seed = v;
            }
            let report = run_cubic_prep(&config)?;
            emit(&report, &args.out)?;
        }
        Command::VerifyCubic(args) => {
            let report = verify_cubic_solution()?;
            emit(&report, &args.out)?;
        }
    }
    Ok(())
}
