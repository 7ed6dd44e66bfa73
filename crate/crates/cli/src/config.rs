//! Experiment configuration: a single JSON document with a strict schema.
//! Unknown keys are errors, not warnings.

use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use thiserror::Error;
use tsbench_core::characterize::DecompositionMethod;
use tsbench_core::data::{load_wide_csv, DataError, Dataset, Freq, SplitSpec};
use tsbench_core::models::{ChannelMode, ModelFamily, ModelSpec};
use tsbench_core::synth::{gen_series, preset, SynthError, SynthSpec};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Schema { path: PathBuf, message: String },
    #[error("dataset {name:?}: {message}")]
    Dataset { name: String, message: String },
    #[error("dataset {name:?}: {source}")]
    Load {
        name: String,
        #[source]
        source: DataError,
    },
    #[error("dataset {name:?}: {source}")]
    Synth {
        name: String,
        #[source]
        source: SynthError,
    },
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// One data source: exactly one of `csv` (with `freq`), `preset`, or `synth`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetConfig {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub freq: Option<Freq>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub preset: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub synth: Option<SynthSpec>,
}

impl DatasetConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        let sources =
            self.csv.is_some() as u8 + self.preset.is_some() as u8 + self.synth.is_some() as u8;
        if sources != 1 {
            return Err(ConfigError::Dataset {
                name: self.name.clone(),
                message: "exactly one of `csv`, `preset`, or `synth` must be set".into(),
            });
        }
        if self.csv.is_some() && self.freq.is_none() {
            return Err(ConfigError::Dataset {
                name: self.name.clone(),
                message: "`csv` requires `freq`".into(),
            });
        }
        if self.csv.is_none() && self.freq.is_some() {
            return Err(ConfigError::Dataset {
                name: self.name.clone(),
                message: "`freq` only applies to `csv` sources".into(),
            });
        }
        Ok(())
    }

    /// Load or generate the panel, renamed to the configured name.
    pub fn resolve(&self) -> Result<Dataset, ConfigError> {
        self.validate()?;
        let mut ds = if let Some(path) = &self.csv {
            load_wide_csv(path, self.freq.unwrap()).map_err(|source| ConfigError::Load {
                name: self.name.clone(),
                source,
            })?
        } else {
            let spec = match (&self.preset, &self.synth) {
                (Some(name), None) => preset(name).map_err(|source| ConfigError::Synth {
                    name: self.name.clone(),
                    source,
                })?,
                (None, Some(spec)) => spec.clone(),
                _ => unreachable!("validated above"),
            };
            gen_series(&spec).map_err(|source| ConfigError::Synth {
                name: self.name.clone(),
                source,
            })?
        };
        ds.name = self.name.clone();
        Ok(ds)
    }
}

fn default_ar_order() -> usize {
    1
}

fn default_ma_window() -> usize {
    25
}

/// Model configuration; context length and horizon come from the experiment
/// grid, the seed from the experiment seed list.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub family: ModelFamily,
    /// Row label; defaults to the family name.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    #[serde(default = "default_ar_order")]
    pub ar_order: usize,
    #[serde(default)]
    pub ridge_lambda: f64,
    #[serde(default = "default_ma_window")]
    pub ma_window: usize,
    #[serde(default)]
    pub channel_mode: ChannelMode,
    #[serde(default)]
    pub use_covariates: bool,
}

impl ModelConfig {
    pub fn label(&self) -> String {
        self.name
            .clone()
            .unwrap_or_else(|| self.family.name().to_string())
    }

    pub fn to_spec(&self, context_len: usize, horizon: usize, seed: u64) -> ModelSpec {
        ModelSpec {
            family: self.family,
            context_len,
            horizon,
            ar_order: self.ar_order,
            ridge_lambda: self.ridge_lambda,
            ma_window: self.ma_window,
            channel_mode: self.channel_mode,
            use_covariates: self.use_covariates,
            seed,
        }
    }
}

fn default_period() -> usize {
    24
}

fn default_window_len() -> usize {
    30
}

fn default_n_bins() -> usize {
    20
}

fn default_method() -> DecompositionMethod {
    DecompositionMethod::Classical
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CharacterizationConfig {
    #[serde(default = "default_period")]
    pub period: usize,
    #[serde(default = "default_window_len")]
    pub window_len: usize,
    #[serde(default = "default_n_bins")]
    pub n_bins: usize,
    #[serde(default = "default_method")]
    pub method: DecompositionMethod,
}

impl Default for CharacterizationConfig {
    fn default() -> Self {
        Self {
            period: default_period(),
            window_len: default_window_len(),
            n_bins: default_n_bins(),
            method: default_method(),
        }
    }
}

fn default_n_forecast_samples() -> usize {
    100
}

/// Top-level experiment description.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub datasets: Vec<DatasetConfig>,
    pub split: SplitSpec,
    /// Observation history length L.
    pub context_len: usize,
    pub horizons: Vec<usize>,
    pub models: Vec<ModelConfig>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_n_forecast_samples")]
    pub n_forecast_samples: usize,
    #[serde(default)]
    pub characterization: CharacterizationConfig,
    pub output_dir: PathBuf,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.datasets.is_empty() {
            return Err(ConfigError::Invalid("`datasets` must be non-empty".into()));
        }
        if self.horizons.is_empty() {
            return Err(ConfigError::Invalid("`horizons` must be non-empty".into()));
        }
        if self.models.is_empty() {
            return Err(ConfigError::Invalid("`models` must be non-empty".into()));
        }
        if self.seeds.is_empty() {
            return Err(ConfigError::Invalid("`seeds` must be non-empty".into()));
        }
        if self.context_len == 0 {
            return Err(ConfigError::Invalid("`context_len` must be positive".into()));
        }
        for ds in &self.datasets {
            ds.validate()?;
        }
        for &h in &self.horizons {
            if h == 0 {
                return Err(ConfigError::Invalid("`horizons` entries must be positive".into()));
            }
            if h > self.split.test_len {
                return Err(ConfigError::Invalid(format!(
                    "horizon {h} exceeds split.test_len {}; the test segment cannot \
                     hold a single forecast window",
                    self.split.test_len
                )));
            }
        }
        let mut labels: Vec<String> = self.models.iter().map(ModelConfig::label).collect();
        labels.sort();
        labels.dedup();
        if labels.len() != self.models.len() {
            return Err(ConfigError::Invalid(
                "model labels must be unique; set `name` to disambiguate".into(),
            ));
        }
        Ok(())
    }

    /// Read and validate a config file.
    pub fn load(path: &Path) -> Result<(Self, String), ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let config: ExperimentConfig =
            serde_json::from_str(&text).map_err(|e| ConfigError::Schema {
                path: path.to_path_buf(),
                message: e.to_string(),
            })?;
        config.validate()?;
        Ok((config, text))
    }
}

/// Hex SHA-256 of the raw config text, recorded as provenance.
pub fn config_hash(text: &str) -> String {
    use sha2::{Digest, Sha256};
    let digest = Sha256::digest(text.as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_config_json() -> serde_json::Value {
        serde_json::json!({
            "datasets": [{"name": "trendy", "preset": "trend_dominant"}],
            "split": {"val_len": 0, "test_len": 480},
            "context_len": 96,
            "horizons": [24],
            "models": [{"family": "global_mean"}],
            "seeds": [1],
            "output_dir": "out"
        })
    }

    #[test]
    fn minimal_config_parses_with_defaults() {
        let config: ExperimentConfig =
            serde_json::from_value(minimal_config_json()).unwrap();
        config.validate().unwrap();
        assert_eq!(config.n_forecast_samples, 100);
        assert_eq!(config.characterization.period, 24);
        assert_eq!(config.characterization.window_len, 30);
        assert_eq!(config.characterization.n_bins, 20);
    }

    #[test]
    fn unknown_keys_are_errors() {
        let mut value = minimal_config_json();
        value["surprise"] = serde_json::json!(1);
        let parsed: Result<ExperimentConfig, _> = serde_json::from_value(value);
        assert!(parsed.is_err());
    }

    #[test]
    fn dataset_requires_exactly_one_source() {
        let ds = DatasetConfig {
            name: "x".into(),
            csv: None,
            freq: None,
            preset: None,
            synth: None,
        };
        let err = ds.validate().unwrap_err().to_string();
        assert!(err.contains("csv"), "error should name the field: {err}");

        let both = DatasetConfig {
            name: "x".into(),
            csv: Some("a.csv".into()),
            freq: Some(Freq::Hourly),
            preset: Some("trend_dominant".into()),
            synth: None,
        };
        assert!(both.validate().is_err());
    }

    #[test]
    fn csv_requires_freq() {
        let ds = DatasetConfig {
            name: "x".into(),
            csv: Some("a.csv".into()),
            freq: None,
            preset: None,
            synth: None,
        };
        let err = ds.validate().unwrap_err().to_string();
        assert!(err.contains("freq"));
    }

    #[test]
    fn horizon_must_fit_in_test_segment() {
        let mut config: ExperimentConfig =
            serde_json::from_value(minimal_config_json()).unwrap();
        config.horizons = vec![960];
        assert!(config.validate().is_err());
    }

    #[test]
    fn duplicate_model_labels_rejected() {
        let mut value = minimal_config_json();
        value["models"] = serde_json::json!([
            {"family": "global_mean"},
            {"family": "global_mean"}
        ]);
        let config: ExperimentConfig = serde_json::from_value(value).unwrap();
        assert!(config.validate().is_err());
    }

    #[test]
    fn hash_is_stable() {
        assert_eq!(config_hash("abc"), config_hash("abc"));
        assert_ne!(config_hash("abc"), config_hash("abd"));
        assert_eq!(config_hash("abc").len(), 64);
    }
}
