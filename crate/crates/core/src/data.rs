//! Multivariate time-series panels: loading, splitting, standardization,
//! windowing, and calendar covariates.
//!
//! A [`Dataset`] is a K-variate, N-step real-valued panel with uniformly
//! spaced timestamps and optional covariate rows. All containers here are
//! immutable after construction and safe to share read-only across threads.

use chrono::{DateTime, Datelike, Duration, NaiveDate, NaiveDateTime, TimeZone, Timelike, Utc};
use ndarray::{s, Array2};
use serde::{Deserialize, Serialize};
use std::path::Path;
use thiserror::Error;

/// Default lower bound applied to per-variate standard deviations.
pub const STD_FLOOR: f64 = 1e-8;

/// Errors from panel loading and preprocessing.
#[derive(Debug, Error)]
pub enum DataError {
    #[error("missing or non-finite value at row {row}, column {col}")]
    MissingValue { row: usize, col: usize },
    #[error("parse error at row {row}: {msg}")]
    ParseError { row: usize, msg: String },
    #[error("timestamps not strictly increasing at row {row}")]
    NonMonotoneTimestamps { row: usize },
    #[error("irregular timestamp spacing at row {row}: expected {expected}, got {got}")]
    IrregularSpacing {
        row: usize,
        expected: String,
        got: String,
    },
    #[error("split (val {val_len} + test {test_len}) does not leave a training segment for {n} steps")]
    SplitTooLarge {
        val_len: usize,
        test_len: usize,
        n: usize,
    },
    #[error("need at least 2 timesteps to fit a scaler, got {n}")]
    TooFewSamples { n: usize },
    #[error("dimension mismatch: expected {expected} variates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("series too short: {n} steps, need at least {needed}")]
    SeriesTooShort { n: usize, needed: usize },
    #[error("invalid dataset: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

/// Sampling frequency of a panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Freq {
    /// Fixed step of `m` minutes.
    Minute(u32),
    Hourly,
    Daily,
    BusinessDaily,
    Weekly,
}

impl Freq {
    /// Timestamp that must follow `ts` under this frequency.
    pub fn next(&self, ts: DateTime<Utc>) -> DateTime<Utc> {
        match self {
            Freq::Minute(m) => ts + Duration::minutes(i64::from(*m)),
            Freq::Hourly => ts + Duration::hours(1),
            Freq::Daily => ts + Duration::days(1),
            Freq::BusinessDaily => {
                // Skip forward to the next weekday.
                let mut next = ts + Duration::days(1);
                while matches!(next.weekday(), chrono::Weekday::Sat | chrono::Weekday::Sun) {
                    next += Duration::days(1);
                }
                next
            }
            Freq::Weekly => ts + Duration::weeks(1),
        }
    }
}

/// A K-variate, N-step panel with timestamps and optional covariates.
///
/// Invariants (enforced by [`Dataset::new`]): `K >= 1`, `N >= 1`, values all
/// finite, timestamps strictly increasing with spacing given by `freq`, and
/// covariates (when present) have exactly N columns.
#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    /// Values, one row per variate: shape `[K, N]`.
    pub values: Array2<f64>,
    pub timestamps: Vec<DateTime<Utc>>,
    pub freq: Freq,
    /// Optional covariates, shape `[N_c, N]`.
    pub covariates: Option<Array2<f64>>,
}

impl Dataset {
    pub fn new(
        name: impl Into<String>,
        values: Array2<f64>,
        timestamps: Vec<DateTime<Utc>>,
        freq: Freq,
        covariates: Option<Array2<f64>>,
    ) -> Result<Self, DataError> {
        let (k, n) = values.dim();
        if k == 0 || n == 0 {
            return Err(DataError::Invalid(format!(
                "panel must be non-empty, got {k} variates x {n} steps"
            )));
        }
        if timestamps.len() != n {
            return Err(DataError::Invalid(format!(
                "{} timestamps for {n} steps",
                timestamps.len()
            )));
        }
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            let (row, col) = (bad / n, bad % n);
            return Err(DataError::Invalid(format!(
                "non-finite value for variate {row} at step {col}"
            )));
        }
        for i in 1..n {
            if timestamps[i] <= timestamps[i - 1] {
                return Err(DataError::NonMonotoneTimestamps { row: i + 1 });
            }
            let expected = freq.next(timestamps[i - 1]);
            if timestamps[i] != expected {
                return Err(DataError::IrregularSpacing {
                    row: i + 1,
                    expected: expected.to_rfc3339(),
                    got: timestamps[i].to_rfc3339(),
                });
            }
        }
        if let Some(cov) = &covariates {
            if cov.ncols() != n {
                return Err(DataError::Invalid(format!(
                    "covariates have {} columns, expected {n}",
                    cov.ncols()
                )));
            }
        }
        Ok(Self {
            name: name.into(),
            values,
            timestamps,
            freq,
            covariates,
        })
    }

    /// Number of variates K.
    pub fn n_variates(&self) -> usize {
        self.values.nrows()
    }

    /// Number of timesteps N.
    pub fn n_steps(&self) -> usize {
        self.values.ncols()
    }

    /// Number of covariate rows N_c (0 when absent).
    pub fn covariate_dim(&self) -> usize {
        self.covariates.as_ref().map_or(0, Array2::nrows)
    }

    /// Contiguous time slice `[start, end)`. May be empty (used by splits);
    /// the non-emptiness invariant applies to loaded/generated panels only.
    fn slice_time(&self, start: usize, end: usize) -> Dataset {
        Dataset {
            name: self.name.clone(),
            values: self.values.slice(s![.., start..end]).to_owned(),
            timestamps: self.timestamps[start..end].to_vec(),
            freq: self.freq,
            covariates: self
                .covariates
                .as_ref()
                .map(|c| c.slice(s![.., start..end]).to_owned()),
        }
    }
}

/// Lengths of the validation and test tails of a panel.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SplitSpec {
    pub val_len: usize,
    pub test_len: usize,
}

/// Per-variate standardization parameters, fitted on the training segment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scaler {
    pub means: Vec<f64>,
    pub stds: Vec<f64>,
    pub std_floor: f64,
}

/// Direction of a standardization pass.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScaleDirection {
    /// `(x - mean) / std`
    Forward,
    /// `x * std + mean`
    Inverse,
}

/// One (context, target) example cut from a panel.
///
/// `context = values[:, origin-L+1 ..= origin]` and
/// `target = values[:, origin+1 ..= origin+T]`. Covariate windows follow the
/// same column ranges and have zero rows when the panel carries none.
#[derive(Debug, Clone)]
pub struct ForecastInstance {
    /// Shape `[K, L]`.
    pub context: Array2<f64>,
    /// Shape `[K, T]`.
    pub target: Array2<f64>,
    /// Shape `[N_c, L]`.
    pub context_covariates: Array2<f64>,
    /// Shape `[N_c, T]`.
    pub target_covariates: Array2<f64>,
    /// Index of the last context step within the source panel.
    pub origin_index: usize,
}

impl ForecastInstance {
    pub fn context_len(&self) -> usize {
        self.context.ncols()
    }

    pub fn horizon(&self) -> usize {
        self.target.ncols()
    }

    pub fn n_variates(&self) -> usize {
        self.context.nrows()
    }
}

fn parse_timestamp(text: &str, row: usize) -> Result<DateTime<Utc>, DataError> {
    let trimmed = text.trim();
    if let Ok(ts) = DateTime::parse_from_rfc3339(trimmed) {
        return Ok(ts.with_timezone(&Utc));
    }
    for fmt in ["%Y-%m-%d %H:%M:%S", "%Y-%m-%d %H:%M"] {
        if let Ok(naive) = NaiveDateTime::parse_from_str(trimmed, fmt) {
            return Ok(Utc.from_utc_datetime(&naive));
        }
    }
    if let Ok(date) = NaiveDate::parse_from_str(trimmed, "%Y-%m-%d") {
        return Ok(Utc.from_utc_datetime(&date.and_hms_opt(0, 0, 0).unwrap()));
    }
    Err(DataError::ParseError {
        row,
        msg: format!("unrecognized timestamp {trimmed:?}"),
    })
}

/// Load a wide CSV: header row, first column `timestamp`, one numeric column
/// per variate. Rows in errors are 1-based data rows (header excluded).
pub fn load_wide_csv(path: impl AsRef<Path>, freq: Freq) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new().has_headers(true).from_path(path)?;
    let headers = reader.headers()?.clone();
    if headers.len() < 2 {
        return Err(DataError::Invalid(
            "CSV needs a timestamp column and at least one variate column".into(),
        ));
    }
    let k = headers.len() - 1;

    let mut timestamps = Vec::new();
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); k];
    for (idx, record) in reader.records().enumerate() {
        let row = idx + 1;
        let record = record?;
        if record.len() != k + 1 {
            return Err(DataError::ParseError {
                row,
                msg: format!("expected {} fields, got {}", k + 1, record.len()),
            });
        }
        timestamps.push(parse_timestamp(&record[0], row)?);
        for col in 1..=k {
            let cell = record[col].trim();
            if cell.is_empty() {
                return Err(DataError::MissingValue { row, col });
            }
            let value: f64 = cell.parse().map_err(|_| DataError::ParseError {
                row,
                msg: format!("invalid number {cell:?} in column {col}"),
            })?;
            if !value.is_finite() {
                return Err(DataError::MissingValue { row, col });
            }
            columns[col - 1].push(value);
        }
    }

    let n = timestamps.len();
    if n == 0 {
        return Err(DataError::Invalid("CSV contains no data rows".into()));
    }
    let mut values = Array2::zeros((k, n));
    for (j, col) in columns.iter().enumerate() {
        for (t, &v) in col.iter().enumerate() {
            values[[j, t]] = v;
        }
    }
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "dataset".to_string());
    Dataset::new(name, values, timestamps, freq, None)
}

/// Split into contiguous (train, val, test) segments in temporal order.
/// `val` may be empty; their concatenation reproduces the input exactly.
pub fn split_dataset(
    ds: &Dataset,
    spec: SplitSpec,
) -> Result<(Dataset, Dataset, Dataset), DataError> {
    let n = ds.n_steps();
    if spec.test_len == 0 {
        return Err(DataError::Invalid("test_len must be at least 1".into()));
    }
    if spec.val_len + spec.test_len >= n {
        return Err(DataError::SplitTooLarge {
            val_len: spec.val_len,
            test_len: spec.test_len,
            n,
        });
    }
    let train_end = n - spec.val_len - spec.test_len;
    let val_end = n - spec.test_len;
    Ok((
        ds.slice_time(0, train_end),
        ds.slice_time(train_end, val_end),
        ds.slice_time(val_end, n),
    ))
}

/// Fit per-variate population mean/std on a training segment.
pub fn fit_scaler(train: &Dataset) -> Result<Scaler, DataError> {
    let n = train.n_steps();
    if n < 2 {
        return Err(DataError::TooFewSamples { n });
    }
    let mut means = Vec::with_capacity(train.n_variates());
    let mut stds = Vec::with_capacity(train.n_variates());
    for row in train.values.rows() {
        let mean = row.sum() / n as f64;
        let var = row.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        means.push(mean);
        stds.push(var.sqrt().max(STD_FLOOR));
    }
    Ok(Scaler {
        means,
        stds,
        std_floor: STD_FLOOR,
    })
}

/// Standardize (or undo standardization of) every variate of a panel.
/// Timestamps and covariates pass through unchanged.
pub fn apply_scaler(
    ds: &Dataset,
    scaler: &Scaler,
    direction: ScaleDirection,
) -> Result<Dataset, DataError> {
    if ds.n_variates() != scaler.means.len() {
        return Err(DataError::DimensionMismatch {
            expected: scaler.means.len(),
            got: ds.n_variates(),
        });
    }
    let mut values = ds.values.clone();
    for (k, mut row) in values.rows_mut().into_iter().enumerate() {
        let (mean, std) = (scaler.means[k], scaler.stds[k]);
        match direction {
            ScaleDirection::Forward => row.mapv_inplace(|v| (v - mean) / std),
            ScaleDirection::Inverse => row.mapv_inplace(|v| v * std + mean),
        }
    }
    Ok(Dataset {
        name: ds.name.clone(),
        values,
        timestamps: ds.timestamps.clone(),
        freq: ds.freq,
        covariates: ds.covariates.clone(),
    })
}

/// Cut sliding (context, target) windows at origins `L-1, L-1+stride, ...`.
///
/// Yields `floor((N - L - T) / stride) + 1` instances.
pub fn make_windows(
    ds: &Dataset,
    context_len: usize,
    horizon: usize,
    stride: usize,
) -> Result<Vec<ForecastInstance>, DataError> {
    assert!(context_len >= 1 && horizon >= 1 && stride >= 1, "window parameters must be positive");
    let n = ds.n_steps();
    if n < context_len + horizon {
        return Err(DataError::SeriesTooShort {
            n,
            needed: context_len + horizon,
        });
    }
    let n_cov = ds.covariate_dim();
    let count = (n - context_len - horizon) / stride + 1;
    let mut out = Vec::with_capacity(count);
    for i in 0..count {
        let origin = context_len - 1 + i * stride;
        let ctx_start = origin + 1 - context_len;
        let tgt_end = origin + 1 + horizon;
        let cov_slice = |start: usize, end: usize| match &ds.covariates {
            Some(c) => c.slice(s![.., start..end]).to_owned(),
            None => Array2::zeros((n_cov, end - start)),
        };
        out.push(ForecastInstance {
            context: ds.values.slice(s![.., ctx_start..=origin]).to_owned(),
            target: ds.values.slice(s![.., origin + 1..tgt_end]).to_owned(),
            context_covariates: cov_slice(ctx_start, origin + 1),
            target_covariates: cov_slice(origin + 1, tgt_end),
            origin_index: origin,
        });
    }
    Ok(out)
}

// Calendar feature value scaled affinely onto [-0.5, 0.5].
fn scaled(value: f64, max: f64) -> f64 {
    -0.5 + value / max
}

/// Attach per-frequency calendar covariates, each scaled to `[-0.5, 0.5]`.
///
/// hourly: hour-of-day, day-of-week; minute: minute-of-hour, hour-of-day,
/// day-of-week; daily & business-daily: day-of-week, day-of-month;
/// weekly: week-of-year. Any existing covariates are replaced.
pub fn calendar_covariates(ds: &Dataset) -> Dataset {
    let n = ds.n_steps();
    let features: Vec<fn(&DateTime<Utc>) -> f64> = match ds.freq {
        Freq::Hourly => vec![
            |ts| scaled(f64::from(ts.hour()), 23.0),
            |ts| scaled(f64::from(ts.weekday().num_days_from_monday()), 6.0),
        ],
        Freq::Minute(_) => vec![
            |ts| scaled(f64::from(ts.minute()), 59.0),
            |ts| scaled(f64::from(ts.hour()), 23.0),
            |ts| scaled(f64::from(ts.weekday().num_days_from_monday()), 6.0),
        ],
        Freq::Daily | Freq::BusinessDaily => vec![
            |ts| scaled(f64::from(ts.weekday().num_days_from_monday()), 6.0),
            |ts| scaled(f64::from(ts.day() - 1), 30.0),
        ],
        Freq::Weekly => vec![|ts| scaled(f64::from(ts.iso_week().week() - 1), 52.0)],
    };
    let mut cov = Array2::zeros((features.len(), n));
    for (r, feature) in features.iter().enumerate() {
        for (t, ts) in ds.timestamps.iter().enumerate() {
            cov[[r, t]] = feature(ts);
        }
    }
    Dataset {
        name: ds.name.clone(),
        values: ds.values.clone(),
        timestamps: ds.timestamps.clone(),
        freq: ds.freq,
        covariates: Some(cov),
    }
}

/// Synthetic hourly timestamps starting at a fixed epoch, used by generators.
pub fn synthetic_hourly_timestamps(n: usize) -> Vec<DateTime<Utc>> {
    let start = Utc.with_ymd_and_hms(2000, 1, 1, 0, 0, 0).unwrap();
    (0..n).map(|i| start + Duration::hours(i as i64)).collect()
}
