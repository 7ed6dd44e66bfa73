//! Core building blocks for multi-horizon time-series forecasting benchmarks.
//!
//! The crate is organized around five pieces:
//!
//! - [`data`]: multivariate panels, CSV ingestion, splitting, standardization,
//!   and sliding-window extraction of forecasting instances.
//! - [`characterize`]: intrinsic dataset characteristics — trend strength,
//!   seasonality strength, distributional distance from a Gaussian, and
//!   outlier ratios.
//! - [`metrics`]: point-level (MAE, MSE, NMAE, NRMSE and their `_sum`
//!   variants) and distribution-level (CRPS, CRPS_sum) scoring.
//! - [`models`]: desk-scale forecasters built on a decoupled
//!   encoder/forecaster contract, with both autoregressive and
//!   non-autoregressive decoding.
//! - [`synth`]: a deterministic synthetic-series generator with controllable
//!   trend, seasonality, noise distribution, and outliers.

pub mod characterize;
pub mod data;
pub mod metrics;
pub mod models;
mod seeding;
pub mod synth;

pub use characterize::{CharacterizationReport, Components, DecompositionMethod};
pub use data::{Dataset, ForecastInstance, Freq, Scaler, SplitSpec};
pub use metrics::{MetricReport, SampleForecast};
pub use models::{ModelFamily, ModelSpec, TrainedModel};
pub use synth::SynthSpec;
