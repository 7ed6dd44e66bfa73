//! Library surface of the benchmark CLI: configuration schema and the
//! experiment runner. The `tsbench` binary is a thin wrapper over these.

pub mod config;
pub mod runner;

pub use config::{config_hash, ConfigError, DatasetConfig, ExperimentConfig, ModelConfig};
pub use runner::{
    run_benchmark, run_characterize, write_benchmark_outputs, write_characterize_outputs,
    write_synth_csv, BenchmarkOutcome, ResultRow, ResultTable, RunError,
};
