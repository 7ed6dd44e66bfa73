//! Experiment execution: characterization runs, benchmark runs over the
//! (dataset x model x horizon x seed) grid, and synthetic CSV emission.
//!
//! Benchmark cells are independent and may run on a thread pool; outputs are
//! identical regardless of parallelism because every cell is deterministic
//! and aggregation follows config order.

use crate::config::{ConfigError, DatasetConfig, ExperimentConfig};
use ndarray::{Array2, Array3};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;
use thiserror::Error;
use tsbench_core::characterize::{characterize_dataset, CharacterizationReport};
use tsbench_core::data::{
    apply_scaler, fit_scaler, load_wide_csv, make_windows, split_dataset, Dataset,
    ForecastInstance, ScaleDirection, Scaler,
};
use tsbench_core::metrics::{aggregate_runs, evaluate, MetricReport, SampleForecast};
use tsbench_core::models::{fit, predict};
use tsbench_core::synth::SynthSpec;

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io {
        path: std::path::PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("dataset {dataset:?}: {message}")]
    Dataset { dataset: String, message: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> RunError + '_ {
    move |source| RunError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Provenance stamped into every result document.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Provenance {
    pub config_hash: String,
    pub toolkit_version: String,
    pub timestamp: String,
}

impl Provenance {
    pub fn new(config_hash: String) -> Self {
        Self {
            config_hash,
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339(),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultRow {
    pub dataset: String,
    pub model: String,
    pub horizon: usize,
    pub metric: String,
    pub mean: f64,
    pub std: f64,
    pub n_seeds: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CellError {
    pub dataset: String,
    pub model: String,
    pub horizon: usize,
    pub seed: u64,
    pub message: String,
}

/// Per-seed report, persisted for auditability.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawRecord {
    pub dataset: String,
    pub model: String,
    pub horizon: usize,
    pub seed: u64,
    pub report: MetricReport,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResultTable {
    pub provenance: Provenance,
    pub rows: Vec<ResultRow>,
    pub errors: Vec<CellError>,
}

#[derive(Debug)]
pub struct BenchmarkOutcome {
    pub table: ResultTable,
    pub raw: Vec<RawRecord>,
}

impl BenchmarkOutcome {
    pub fn any_cell_failed(&self) -> bool {
        !self.table.errors.is_empty()
    }
}

/// Seed offset applied to every configured seed (env `TSBENCH_SEED_OFFSET`).
pub fn seed_offset_from_env() -> u64 {
    std::env::var("TSBENCH_SEED_OFFSET")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(0)
}

struct PreparedDataset {
    name: String,
    scaler: Scaler,
    train_std: Dataset,
    full_std: Dataset,
    full_orig: Dataset,
    test_len: usize,
}

fn prepare_dataset(
    config: &ExperimentConfig,
    source: &DatasetConfig,
) -> Result<PreparedDataset, RunError> {
    let ds = source.resolve()?;
    let (train, _, _) = split_dataset(&ds, config.split).map_err(|e| RunError::Dataset {
        dataset: source.name.clone(),
        message: e.to_string(),
    })?;
    let scaler = fit_scaler(&train).map_err(|e| RunError::Dataset {
        dataset: source.name.clone(),
        message: e.to_string(),
    })?;
    let train_std = apply_scaler(&train, &scaler, ScaleDirection::Forward).unwrap();
    let full_std = apply_scaler(&ds, &scaler, ScaleDirection::Forward).unwrap();
    Ok(PreparedDataset {
        name: source.name.clone(),
        scaler,
        train_std,
        full_std,
        full_orig: ds,
        test_len: config.split.test_len,
    })
}

/// Standardized evaluation windows whose targets tile the test segment
/// (stride = horizon, non-overlapping), paired with original-unit targets.
struct EvalSet {
    train_windows: Vec<ForecastInstance>,
    eval_windows: Vec<ForecastInstance>,
    /// Original-unit targets pooled over the evaluation windows: `[K, W*T]`.
    pooled_targets: Array2<f64>,
}

fn prepare_eval(
    prepared: &PreparedDataset,
    context_len: usize,
    horizon: usize,
) -> Result<EvalSet, String> {
    let n = prepared.full_std.n_steps();
    if n < prepared.test_len + context_len {
        return Err(format!(
            "series of {n} steps cannot hold context {context_len} plus test {}",
            prepared.test_len
        ));
    }
    let train_windows =
        make_windows(&prepared.train_std, context_len, horizon, 1).map_err(|e| e.to_string())?;

    // slice so window origins place every target inside the test segment
    let tail_start = n - prepared.test_len - context_len;
    let tail_std = slice_panel(&prepared.full_std, tail_start);
    let tail_orig = slice_panel(&prepared.full_orig, tail_start);
    let eval_windows =
        make_windows(&tail_std, context_len, horizon, horizon).map_err(|e| e.to_string())?;
    let orig_windows =
        make_windows(&tail_orig, context_len, horizon, horizon).map_err(|e| e.to_string())?;

    let k = prepared.full_orig.n_variates();
    let w = eval_windows.len();
    let mut pooled_targets = Array2::zeros((k, w * horizon));
    for (i, window) in orig_windows.iter().enumerate() {
        for v in 0..k {
            for t in 0..horizon {
                pooled_targets[[v, i * horizon + t]] = window.target[[v, t]];
            }
        }
    }
    Ok(EvalSet {
        train_windows,
        eval_windows,
        pooled_targets,
    })
}

fn slice_panel(ds: &Dataset, start: usize) -> Dataset {
    Dataset {
        name: ds.name.clone(),
        values: ds.values.slice(ndarray::s![.., start..]).to_owned(),
        timestamps: ds.timestamps[start..].to_vec(),
        freq: ds.freq,
        covariates: ds
            .covariates
            .as_ref()
            .map(|c| c.slice(ndarray::s![.., start..]).to_owned()),
    }
}

/// Fit, forecast over every evaluation window, pool, and score one cell.
fn run_cell(
    config: &ExperimentConfig,
    prepared: &PreparedDataset,
    eval_set: &EvalSet,
    model_idx: usize,
    horizon: usize,
    seed: u64,
) -> Result<MetricReport, String> {
    let model_config = &config.models[model_idx];
    let spec = model_config.to_spec(config.context_len, horizon, seed);
    let model = fit(&spec, &eval_set.train_windows)
        .map_err(|e| e.to_string())?
        .with_scaler(prepared.scaler.clone());

    let k = eval_set.pooled_targets.nrows();
    let w = eval_set.eval_windows.len();
    let mut pooled: Option<Array3<f64>> = None;
    for (i, window) in eval_set.eval_windows.iter().enumerate() {
        let fc = predict(&model, window, config.n_forecast_samples).map_err(|e| e.to_string())?;
        let s = fc.n_samples();
        let pool = pooled.get_or_insert_with(|| Array3::zeros((s, k, w * horizon)));
        if pool.dim().0 != s {
            return Err("sample count changed across windows".into());
        }
        for si in 0..s {
            for v in 0..k {
                for t in 0..horizon {
                    pool[[si, v, i * horizon + t]] = fc.samples[[si, v, t]];
                }
            }
        }
    }
    let pooled = pooled.ok_or("no evaluation windows")?;
    evaluate(
        &eval_set.pooled_targets,
        &SampleForecast::new(pooled),
    )
    .map_err(|e| e.to_string())
}

/// Run the full benchmark grid. Per-cell failures land in the errors section
/// without aborting the remaining cells.
pub fn run_benchmark(
    config: &ExperimentConfig,
    config_hash: String,
) -> Result<BenchmarkOutcome, RunError> {
    config.validate()?;
    let seed_offset = seed_offset_from_env();
    let prepared: Vec<PreparedDataset> = config
        .datasets
        .iter()
        .map(|source| prepare_dataset(config, source))
        .collect::<Result<_, _>>()?;

    // cell grid in config order
    struct Cell {
        dataset_idx: usize,
        model_idx: usize,
        horizon: usize,
        seed: u64,
    }
    let mut cells = Vec::new();
    for dataset_idx in 0..prepared.len() {
        for model_idx in 0..config.models.len() {
            for &horizon in &config.horizons {
                for &seed in &config.seeds {
                    cells.push(Cell {
                        dataset_idx,
                        model_idx,
                        horizon,
                        seed: seed.wrapping_add(seed_offset),
                    });
                }
            }
        }
    }

    // evaluation windows shared by every (model, seed) of a (dataset, horizon)
    let mut eval_sets: Vec<Vec<Result<EvalSet, String>>> = Vec::new();
    for p in &prepared {
        eval_sets.push(
            config
                .horizons
                .iter()
                .map(|&h| prepare_eval(p, config.context_len, h))
                .collect(),
        );
    }
    let horizon_index =
        |h: usize| config.horizons.iter().position(|&x| x == h).unwrap();

    let outcomes: Vec<Result<MetricReport, String>> = cells
        .par_iter()
        .map(|cell| {
            let eval_set = eval_sets[cell.dataset_idx][horizon_index(cell.horizon)]
                .as_ref()
                .map_err(Clone::clone)?;
            run_cell(
                config,
                &prepared[cell.dataset_idx],
                eval_set,
                cell.model_idx,
                cell.horizon,
                cell.seed,
            )
        })
        .collect();

    let mut raw = Vec::new();
    let mut errors = Vec::new();
    for (cell, outcome) in cells.iter().zip(outcomes) {
        let dataset = prepared[cell.dataset_idx].name.clone();
        let model = config.models[cell.model_idx].label();
        match outcome {
            Ok(report) => raw.push(RawRecord {
                dataset,
                model,
                horizon: cell.horizon,
                seed: cell.seed,
                report,
            }),
            Err(message) => errors.push(CellError {
                dataset,
                model,
                horizon: cell.horizon,
                seed: cell.seed,
                message,
            }),
        }
    }

    // aggregate across seeds; a row appears only when every seed succeeded
    let mut rows = Vec::new();
    for p in &prepared {
        for model in &config.models {
            for &horizon in &config.horizons {
                let label = model.label();
                let reports: Vec<MetricReport> = raw
                    .iter()
                    .filter(|r| {
                        r.dataset == p.name && r.model == label && r.horizon == horizon
                    })
                    .map(|r| r.report)
                    .collect();
                if reports.len() != config.seeds.len() {
                    continue;
                }
                for aggregate in aggregate_runs(&reports).expect("non-empty") {
                    rows.push(ResultRow {
                        dataset: p.name.clone(),
                        model: label.clone(),
                        horizon,
                        metric: aggregate.metric,
                        mean: aggregate.mean,
                        std: aggregate.std,
                        n_seeds: config.seeds.len(),
                    });
                }
            }
        }
    }

    Ok(BenchmarkOutcome {
        table: ResultTable {
            provenance: Provenance::new(config_hash),
            rows,
            errors,
        },
        raw,
    })
}

/// `results.csv` body: one row per (dataset, model, horizon, metric).
pub fn results_csv(table: &ResultTable) -> String {
    let mut out = String::from("dataset,model,horizon,metric,mean,std,n_seeds\n");
    for r in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.dataset, r.model, r.horizon, r.metric, r.mean, r.std, r.n_seeds
        ));
    }
    out
}

/// Persist `results.csv`, `results.json`, and the per-seed `raw/*.json`.
pub fn write_benchmark_outputs(
    outcome: &BenchmarkOutcome,
    output_dir: &Path,
) -> Result<(), RunError> {
    std::fs::create_dir_all(output_dir).map_err(io_err(output_dir))?;
    let csv_path = output_dir.join("results.csv");
    std::fs::write(&csv_path, results_csv(&outcome.table)).map_err(io_err(&csv_path))?;
    let json_path = output_dir.join("results.json");
    std::fs::write(
        &json_path,
        serde_json::to_string_pretty(&outcome.table).expect("serializable"),
    )
    .map_err(io_err(&json_path))?;

    let raw_dir = output_dir.join("raw");
    std::fs::create_dir_all(&raw_dir).map_err(io_err(&raw_dir))?;
    for record in &outcome.raw {
        let path = raw_dir.join(format!(
            "{}_{}_h{}_s{}.json",
            record.dataset, record.model, record.horizon, record.seed
        ));
        std::fs::write(
            &path,
            serde_json::to_string_pretty(record).expect("serializable"),
        )
        .map_err(io_err(&path))?;
    }
    Ok(())
}

/// Characterize every configured dataset.
pub fn run_characterize(
    config: &ExperimentConfig,
) -> Result<Vec<(String, CharacterizationReport)>, RunError> {
    config.validate()?;
    let c = &config.characterization;
    let mut out = Vec::new();
    for source in &config.datasets {
        let ds = source.resolve()?;
        let report = characterize_dataset(&ds, c.period, c.window_len, c.n_bins, c.method)
            .map_err(|e| RunError::Dataset {
                dataset: source.name.clone(),
                message: e.to_string(),
            })?;
        out.push((source.name.clone(), report));
    }
    Ok(out)
}

/// Combined CSV with one column per dataset and one row per score.
pub fn characterization_csv(reports: &[(String, CharacterizationReport)]) -> String {
    let mut out = String::from("metric");
    for (name, _) in reports {
        out.push(',');
        out.push_str(name);
    }
    out.push('\n');
    let rows: [(&str, fn(&CharacterizationReport) -> f64); 5] = [
        ("trend_strength", |r| r.trend_strength),
        ("seasonality_strength", |r| r.seasonality_strength),
        ("js_divergence", |r| r.js_divergence),
        ("outlier_global_pct", |r| r.outlier_global_pct),
        ("outlier_local_pct", |r| r.outlier_local_pct),
    ];
    for (label, getter) in rows {
        out.push_str(label);
        for (_, report) in reports {
            out.push_str(&format!(",{}", getter(report)));
        }
        out.push('\n');
    }
    out
}

/// Write one JSON report per dataset plus the combined CSV.
pub fn write_characterize_outputs(
    reports: &[(String, CharacterizationReport)],
    output_dir: &Path,
) -> Result<(), RunError> {
    std::fs::create_dir_all(output_dir).map_err(io_err(output_dir))?;
    for (name, report) in reports {
        let path = output_dir.join(format!("characterization_{name}.json"));
        std::fs::write(
            &path,
            serde_json::to_string_pretty(report).expect("serializable"),
        )
        .map_err(io_err(&path))?;
    }
    let csv_path = output_dir.join("characterization.csv");
    std::fs::write(&csv_path, characterization_csv(reports)).map_err(io_err(&csv_path))?;
    Ok(())
}

/// Generate a panel and write it as a wide CSV; the output reloads exactly
/// through the CSV loader (shortest round-trip float formatting).
pub fn write_synth_csv(spec: &SynthSpec, out: &Path) -> Result<(), RunError> {
    let ds = tsbench_core::synth::gen_series(spec).map_err(|e| RunError::Dataset {
        dataset: "synth".into(),
        message: e.to_string(),
    })?;
    let mut file = std::fs::File::create(out).map_err(io_err(out))?;
    let mut header = String::from("timestamp");
    for k in 0..ds.n_variates() {
        header.push_str(&format!(",v{}", k + 1));
    }
    writeln!(file, "{header}").map_err(io_err(out))?;
    for t in 0..ds.n_steps() {
        let mut line = ds.timestamps[t].to_rfc3339();
        for k in 0..ds.n_variates() {
            line.push_str(&format!(",{}", ds.values[[k, t]]));
        }
        writeln!(file, "{line}").map_err(io_err(out))?;
    }
    Ok(())
}

/// Round-trip helper used by tests: emit and reload a synthetic panel.
pub fn synth_round_trip(spec: &SynthSpec, out: &Path) -> Result<Dataset, RunError> {
    write_synth_csv(spec, out)?;
    load_wide_csv(out, tsbench_core::data::Freq::Hourly).map_err(|e| RunError::Dataset {
        dataset: "synth".into(),
        message: e.to_string(),
    })
}
