//! `tsbench`: characterize datasets, run forecasting benchmarks, and emit
//! synthetic panels.
//!
//! Exit codes: 0 on success, 1 when one or more benchmark cells failed,
//! 2 on configuration or data errors.

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;
use tsbench_cli::config::{config_hash, ExperimentConfig};
use tsbench_cli::runner;

#[derive(Parser)]
#[command(
    name = "tsbench",
    version,
    about = "Multi-horizon time-series forecasting benchmark toolkit"
)]
struct Cli {
    /// Worker threads for benchmark cells (1 = sequential).
    #[arg(long, global = true, default_value_t = 1)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Score every configured dataset's intrinsic characteristics.
    Characterize {
        /// Experiment config (JSON).
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Run the (dataset x model x horizon x seed) benchmark grid.
    Benchmark {
        /// Experiment config (JSON).
        #[arg(short, long)]
        config: PathBuf,
    },
    /// Generate a synthetic panel and write it as a wide CSV.
    Synth {
        /// Name of a built-in preset.
        #[arg(long, conflicts_with = "spec")]
        preset: Option<String>,
        /// Path to a generator spec (JSON).
        #[arg(long)]
        spec: Option<PathBuf>,
        /// Output CSV path.
        #[arg(short, long)]
        output: PathBuf,
    },
}

fn fail(message: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {message}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == 0 {
        return fail("--threads must be at least 1");
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build_global()
        .ok();

    match cli.command {
        Command::Characterize { config } => {
            let (experiment, _) = match ExperimentConfig::load(&config) {
                Ok(loaded) => loaded,
                Err(e) => return fail(e),
            };
            let reports = match runner::run_characterize(&experiment) {
                Ok(reports) => reports,
                Err(e) => return fail(e),
            };
            if let Err(e) = runner::write_characterize_outputs(&reports, &experiment.output_dir)
            {
                return fail(e);
            }
            for (name, report) in &reports {
                println!(
                    "{name}: F_T={:.4} F_S={:.4} JS={:.4} outliers {:.3}%/{:.3}%",
                    report.trend_strength,
                    report.seasonality_strength,
                    report.js_divergence,
                    report.outlier_global_pct,
                    report.outlier_local_pct
                );
            }
            ExitCode::SUCCESS
        }
        Command::Benchmark { config } => {
            let (experiment, text) = match ExperimentConfig::load(&config) {
                Ok(loaded) => loaded,
                Err(e) => return fail(e),
            };
            let outcome = match runner::run_benchmark(&experiment, config_hash(&text)) {
                Ok(outcome) => outcome,
                Err(e) => return fail(e),
            };
            if let Err(e) = runner::write_benchmark_outputs(&outcome, &experiment.output_dir) {
                return fail(e);
            }
            println!(
                "{} result rows, {} raw reports, {} failed cells -> {}",
                outcome.table.rows.len(),
                outcome.raw.len(),
                outcome.table.errors.len(),
                experiment.output_dir.display()
            );
            for err in &outcome.table.errors {
                eprintln!(
                    "cell failed: {} {} h{} seed {}: {}",
                    err.dataset, err.model, err.horizon, err.seed, err.message
                );
            }
            if outcome.any_cell_failed() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Command::Synth {
            preset,
            spec,
            output,
        } => {
            let generator = match (preset, spec) {
                (Some(name), None) => match tsbench_core::synth::preset(&name) {
                    Ok(spec) => spec,
                    Err(e) => return fail(e),
                },
                (None, Some(path)) => {
                    let text = match std::fs::read_to_string(&path) {
                        Ok(text) => text,
                        Err(e) => return fail(format!("{}: {e}", path.display())),
                    };
                    match serde_json::from_str(&text) {
                        Ok(spec) => spec,
                        Err(e) => return fail(format!("{}: {e}", path.display())),
                    }
                }
                _ => return fail("exactly one of --preset or --spec is required"),
            };
            if let Err(e) = runner::write_synth_csv(&generator, &output) {
                return fail(e);
            }
            println!("wrote {}", output.display());
            ExitCode::SUCCESS
        }
    }
}
