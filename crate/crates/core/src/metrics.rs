//! Point-level and distribution-level forecast scoring.
//!
//! Point metrics (MAE, MSE) and their normalized forms follow the usual
//! per-point averages; `_sum` variants first sum across variates and then
//! score the aggregate series. NMAE uses the pooled convention
//! `sum|err| / sum|x|`, which keeps it finite near zero targets and makes the
//! S=1 normalized CRPS collapse onto it exactly.
//!
//! CRPS uses the energy-form estimator with the `1/(2 S^2)` pairwise term,
//! which equals the exact integral of `(F_hat(z) - 1{x <= z})^2 dz` for the
//! empirical CDF of the samples.

use ndarray::{Array2, Array3, Axis};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("shape mismatch: target {target:?} vs prediction {pred:?}")]
    ShapeMismatch {
        target: Vec<usize>,
        pred: Vec<usize>,
    },
    #[error("normalization denominator is zero")]
    DenominatorZero,
    #[error("sample set is empty")]
    EmptySamples,
    #[error("no reports to aggregate")]
    EmptyInput,
}

/// S sample paths over a K-variate horizon, shape `[S, K, T]`.
///
/// A point forecast is the S = 1 case.
#[derive(Debug, Clone)]
pub struct SampleForecast {
    pub samples: Array3<f64>,
}

impl SampleForecast {
    pub fn new(samples: Array3<f64>) -> Self {
        assert!(samples.dim().0 >= 1, "need at least one sample path");
        assert!(
            samples.iter().all(|v| v.is_finite()),
            "sample paths must be finite"
        );
        Self { samples }
    }

    /// Wrap a single path as an S = 1 forecast.
    pub fn from_point(path: Array2<f64>) -> Self {
        let (k, t) = path.dim();
        Self::new(path.into_shape_with_order((1, k, t)).unwrap())
    }

    pub fn n_samples(&self) -> usize {
        self.samples.dim().0
    }

    /// Per-cell mean across samples, the point path used for point metrics.
    pub fn mean_path(&self) -> Array2<f64> {
        self.samples.mean_axis(Axis(0)).unwrap()
    }
}

/// Every score for one evaluation run. CRPS fields are in normalized form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricReport {
    pub mae: f64,
    pub mae_sum: f64,
    pub nmae: f64,
    pub nmae_sum: f64,
    pub mse: f64,
    pub mse_sum: f64,
    pub nrmse: f64,
    pub nrmse_sum: f64,
    pub crps: f64,
    pub crps_sum: f64,
}

impl MetricReport {
    pub const FIELD_NAMES: [&'static str; 10] = [
        "mae", "mae_sum", "nmae", "nmae_sum", "mse", "mse_sum", "nrmse", "nrmse_sum", "crps",
        "crps_sum",
    ];

    pub fn fields(&self) -> [f64; 10] {
        [
            self.mae, self.mae_sum, self.nmae, self.nmae_sum, self.mse, self.mse_sum, self.nrmse,
            self.nrmse_sum, self.crps, self.crps_sum,
        ]
    }
}

/// Mean and population std of one metric across runs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricAggregate {
    pub metric: String,
    pub mean: f64,
    pub std: f64,
}

fn check_shapes(target: &Array2<f64>, pred: &Array2<f64>) -> Result<(), MetricsError> {
    if target.dim() != pred.dim() {
        return Err(MetricsError::ShapeMismatch {
            target: target.shape().to_vec(),
            pred: pred.shape().to_vec(),
        });
    }
    Ok(())
}

fn sum_over_variates(panel: &Array2<f64>) -> Vec<f64> {
    panel.sum_axis(Axis(0)).to_vec()
}

/// MAE, MSE, and their variate-summed variants.
pub fn point_errors(
    target: &Array2<f64>,
    pred: &Array2<f64>,
) -> Result<(f64, f64, f64, f64), MetricsError> {
    check_shapes(target, pred)?;
    let cells = target.len() as f64;
    let mut abs = 0.0;
    let mut sq = 0.0;
    for (x, p) in target.iter().zip(pred.iter()) {
        let err = x - p;
        abs += err.abs();
        sq += err * err;
    }
    let horizon = target.ncols() as f64;
    let target_sum = sum_over_variates(target);
    let pred_sum = sum_over_variates(pred);
    let mut abs_sum = 0.0;
    let mut sq_sum = 0.0;
    for (x, p) in target_sum.iter().zip(&pred_sum) {
        let err = x - p;
        abs_sum += err.abs();
        sq_sum += err * err;
    }
    Ok((abs / cells, sq / cells, abs_sum / horizon, sq_sum / horizon))
}

/// NMAE, NRMSE, and their variate-summed variants.
///
/// `NMAE = sum|x - xhat| / sum|x|`; `NRMSE = RMSE / mean|x|`.
pub fn normalized_errors(
    target: &Array2<f64>,
    pred: &Array2<f64>,
) -> Result<(f64, f64, f64, f64), MetricsError> {
    check_shapes(target, pred)?;
    let (mae, mse, mae_sum, mse_sum) = point_errors(target, pred)?;
    let denom = target.iter().map(|x| x.abs()).sum::<f64>() / target.len() as f64;
    let denom_sum = sum_over_variates(target)
        .iter()
        .map(|x| x.abs())
        .sum::<f64>()
        / target.ncols() as f64;
    if denom <= 0.0 || denom_sum <= 0.0 {
        return Err(MetricsError::DenominatorZero);
    }
    Ok((
        mae / denom,
        mse.sqrt() / denom,
        mae_sum / denom_sum,
        mse_sum.sqrt() / denom_sum,
    ))
}

/// Energy-form CRPS of a sample set against one observation, computed with
/// the O(S log S) sorted-sample identity:
/// `mean|X_i - x| - (1/S^2) * sum_i (2i - S - 1) * X_(i)` (1-based i).
pub fn crps_empirical(samples: &[f64], x: f64) -> Result<f64, MetricsError> {
    let s = samples.len();
    if s == 0 {
        return Err(MetricsError::EmptySamples);
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let sf = s as f64;
    let mut abs_term = 0.0;
    let mut pair_term = 0.0;
    for (i, &v) in sorted.iter().enumerate() {
        abs_term += (v - x).abs();
        pair_term += (2.0 * (i + 1) as f64 - sf - 1.0) * v;
    }
    Ok((abs_term - pair_term / sf) / sf)
}

/// CRPS over a whole panel: raw form averages the per-cell scores; the
/// normalized form divides pooled CRPS by pooled `|x|`.
pub fn crps_panel(
    target: &Array2<f64>,
    fc: &SampleForecast,
    normalize: bool,
) -> Result<f64, MetricsError> {
    let (_, k, t) = fc.samples.dim();
    if target.dim() != (k, t) {
        return Err(MetricsError::ShapeMismatch {
            target: target.shape().to_vec(),
            pred: fc.samples.shape().to_vec(),
        });
    }
    let mut crps_total = 0.0;
    for ki in 0..k {
        for ti in 0..t {
            let cell: Vec<f64> = fc.samples.slice(ndarray::s![.., ki, ti]).to_vec();
            crps_total += crps_empirical(&cell, target[[ki, ti]])?;
        }
    }
    if normalize {
        let denom: f64 = target.iter().map(|x| x.abs()).sum();
        if denom <= 0.0 {
            return Err(MetricsError::DenominatorZero);
        }
        Ok(crps_total / denom)
    } else {
        Ok(crps_total / (k * t) as f64)
    }
}

/// CRPS of the across-variate sum series, averaged over the horizon.
pub fn crps_sum_panel(
    target: &Array2<f64>,
    fc: &SampleForecast,
    normalize: bool,
) -> Result<f64, MetricsError> {
    let (_, k, t) = fc.samples.dim();
    if target.dim() != (k, t) {
        return Err(MetricsError::ShapeMismatch {
            target: target.shape().to_vec(),
            pred: fc.samples.shape().to_vec(),
        });
    }
    let target_sum = sum_over_variates(target);
    let sample_sums = fc.samples.sum_axis(Axis(1)); // [S, T]
    let mut crps_total = 0.0;
    for ti in 0..t {
        let cell: Vec<f64> = sample_sums.column(ti).to_vec();
        crps_total += crps_empirical(&cell, target_sum[ti])?;
    }
    if normalize {
        let denom: f64 = target_sum.iter().map(|x| x.abs()).sum();
        if denom <= 0.0 {
            return Err(MetricsError::DenominatorZero);
        }
        Ok(crps_total / denom)
    } else {
        Ok(crps_total / t as f64)
    }
}

/// Fill a full [`MetricReport`]: point metrics from the sample mean path
/// (the path itself when S = 1), distributional metrics from all samples.
pub fn evaluate(target: &Array2<f64>, fc: &SampleForecast) -> Result<MetricReport, MetricsError> {
    let point = fc.mean_path();
    let (mae, mse, mae_sum, mse_sum) = point_errors(target, &point)?;
    let (nmae, nrmse, nmae_sum, nrmse_sum) = normalized_errors(target, &point)?;
    let crps = crps_panel(target, fc, true)?;
    let crps_sum = crps_sum_panel(target, fc, true)?;
    Ok(MetricReport {
        mae,
        mae_sum,
        nmae,
        nmae_sum,
        mse,
        mse_sum,
        nrmse,
        nrmse_sum,
        crps,
        crps_sum,
    })
}

/// Per-field mean and population std across runs.
pub fn aggregate_runs(reports: &[MetricReport]) -> Result<Vec<MetricAggregate>, MetricsError> {
    if reports.is_empty() {
        return Err(MetricsError::EmptyInput);
    }
    let n = reports.len() as f64;
    let mut out = Vec::with_capacity(MetricReport::FIELD_NAMES.len());
    for (i, name) in MetricReport::FIELD_NAMES.iter().enumerate() {
        let values: Vec<f64> = reports.iter().map(|r| r.fields()[i]).collect();
        // identical runs must aggregate to (value, 0) exactly, without the
        // ulp lost in sum/n
        let (mean, std) = if values.windows(2).all(|w| w[0] == w[1]) {
            (values[0], 0.0)
        } else {
            let mean = values.iter().sum::<f64>() / n;
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            (mean, var.sqrt())
        };
        out.push(MetricAggregate {
            metric: (*name).to_string(),
            mean,
            std,
        });
    }
    Ok(out)
}

/// Render aggregates as `metric,mean,std` CSV.
pub fn aggregate_csv(aggregates: &[MetricAggregate]) -> String {
    let mut out = String::from("metric,mean,std\n");
    for a in aggregates {
        out.push_str(&format!("{},{},{}\n", a.metric, a.mean, a.std));
    }
    out
}
