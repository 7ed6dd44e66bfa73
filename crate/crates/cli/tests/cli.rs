//! End-to-end tests of the `tsbench` binary: subcommand behaviour, exit
//! codes (0 ok, 1 cell failures, 2 config/data errors), output files, and
//! rerun determinism.

use std::path::Path;
use std::process::{Command, Output};

fn tsbench(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsbench"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, value: serde_json::Value) -> std::path::PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, serde_json::to_string_pretty(&value).unwrap()).unwrap();
    path
}

fn benchmark_config(out: &str) -> serde_json::Value {
    serde_json::json!({
        "datasets": [{"name": "seasonal", "preset": "seasonal_dominant"}],
        "split": {"val_len": 0, "test_len": 240},
        "context_len": 48,
        "horizons": [24],
        "models": [
            {"family": "batch_mean"},
            {"family": "linear_nar", "ridge_lambda": 1e-6}
        ],
        "seeds": [1, 2],
        "n_forecast_samples": 10,
        "output_dir": out
    })
}

#[test]
fn synth_preset_round_trips_through_loader() {
    let dir = tempfile::tempdir().unwrap();
    let out = tsbench(
        &["synth", "--preset", "seasonal_dominant", "-o", "panel.csv"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let ds = tsbench_core::data::load_wide_csv(
        dir.path().join("panel.csv"),
        tsbench_core::data::Freq::Hourly,
    )
    .unwrap();
    assert_eq!(ds.n_variates(), 3);
    let report = tsbench_core::characterize::characterize_dataset(
        &ds,
        24,
        30,
        20,
        tsbench_core::characterize::DecompositionMethod::Classical,
    )
    .unwrap();
    assert!(report.seasonality_strength >= 0.99);
}

#[test]
fn synth_unknown_preset_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = tsbench(&["synth", "--preset", "nope", "-o", "x.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));
}

#[test]
fn synth_spec_with_zero_steps_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let spec = dir.path().join("spec.json");
    std::fs::write(
        &spec,
        serde_json::json!({
            "n_steps": 0,
            "n_variates": 1,
            "noise": {"gaussian": {"sigma": 1.0}},
            "seed": 1
        })
        .to_string(),
    )
    .unwrap();
    let out = tsbench(
        &["synth", "--spec", spec.to_str().unwrap(), "-o", "x.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn benchmark_writes_outputs_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path(), benchmark_config("out"));

    let first = tsbench(&["benchmark", "-c", config.to_str().unwrap()], dir.path());
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    let csv_first = std::fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    assert!(dir.path().join("out/results.json").exists());
    assert!(dir.path().join("out/raw").read_dir().unwrap().count() == 4);

    let second = tsbench(
        &["benchmark", "-c", config.to_str().unwrap(), "--threads", "4"],
        dir.path(),
    );
    assert!(second.status.success());
    let csv_second = std::fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    // byte-identical apart from the timestamp, which lives in results.json
    assert_eq!(csv_first, csv_second);
}

#[test]
fn benchmark_cell_failure_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = benchmark_config("out");
    config["models"] = serde_json::json!([
        {"family": "batch_mean"},
        {"family": "linear_ar", "ar_order": 4096}
    ]);
    let path = write_config(dir.path(), config);
    let out = tsbench(&["benchmark", "-c", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
    // surviving model still produced rows
    let csv = std::fs::read_to_string(dir.path().join("out/results.csv")).unwrap();
    assert!(csv.contains("batch_mean"));
    assert!(!csv.contains("linear_ar"));
}

#[test]
fn benchmark_missing_csv_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = benchmark_config("out");
    config["datasets"] = serde_json::json!([
        {"name": "ghost", "csv": "does-not-exist.csv", "freq": "hourly"}
    ]);
    let path = write_config(dir.path(), config);
    let out = tsbench(&["benchmark", "-c", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ghost"));
}

#[test]
fn benchmark_dataset_without_source_names_fields() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = benchmark_config("out");
    config["datasets"] = serde_json::json!([{"name": "empty"}]);
    let path = write_config(dir.path(), config);
    let out = tsbench(&["benchmark", "-c", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("csv"), "stderr should name the field: {stderr}");
}

#[test]
fn benchmark_unknown_config_key_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = benchmark_config("out");
    config["typo_key"] = serde_json::json!(true);
    let path = write_config(dir.path(), config);
    let out = tsbench(&["benchmark", "-c", path.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn seed_offset_changes_gaussian_results() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = benchmark_config("out");
    config["models"] = serde_json::json!([
        {"family": "gaussian_linear_nar", "ridge_lambda": 1e-6}
    ]);
    let path = write_config(dir.path(), config);
    let run = |offset: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_tsbench"))
            .args(["benchmark", "-c", path.to_str().unwrap()])
            .env("TSBENCH_SEED_OFFSET", offset)
            .current_dir(dir.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read_to_string(dir.path().join("out/results.csv")).unwrap()
    };
    let base = run("0");
    let base_again = run("0");
    let shifted = run("1000");
    assert_eq!(base, base_again);
    assert_ne!(base, shifted);
}

#[test]
fn characterize_emits_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut config = benchmark_config("out");
    config["datasets"] = serde_json::json!([
        {"name": "trendy", "preset": "trend_dominant"},
        {"name": "noisy", "preset": "gaussian_noise"}
    ]);
    let path = write_config(dir.path(), config);
    let out = tsbench(&["characterize", "-c", path.to_str().unwrap()], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("out/characterization_trendy.json").exists());
    assert!(dir.path().join("out/characterization_noisy.json").exists());
    let csv = std::fs::read_to_string(dir.path().join("out/characterization.csv")).unwrap();
    assert!(csv.starts_with("metric,trendy,noisy\n"));

    let report: tsbench_core::CharacterizationReport = serde_json::from_str(
        &std::fs::read_to_string(dir.path().join("out/characterization_trendy.json")).unwrap(),
    )
    .unwrap();
    assert!(report.trend_strength >= 0.99);
}
