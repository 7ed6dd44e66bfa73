//! Desk-scale forecasters on a decoupled encoder/forecaster contract.
//!
//! Every family is either non-autoregressive (one forward application emits
//! the whole horizon) or autoregressive (a rolling hidden state of the last
//! `p` values is advanced one step at a time, feeding predictions back).
//! Point families emit a single path; gaussian families sample from per-step
//! normal heads. Linear weights come from closed-form ridge least squares
//! `W = Y X^T (X X^T + lambda I)^-1`.
//!
//! Models operate in standardized space; attaching a [`Scaler`] makes
//! [`predict`] return forecasts in original units.

use crate::data::{ForecastInstance, Scaler};
use crate::metrics::SampleForecast;
use crate::seeding::derive_seed;
use nalgebra::{DMatrix, DVector};
use ndarray::{Array2, Array3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Smallest admissible gaussian-head standard deviation.
const SIGMA_FLOOR: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("no training windows")]
    EmptyTrainingSet,
    #[error("design is rank-deficient and ridge_lambda is 0")]
    SingularSystem,
    #[error("operation needs a {expected} family, model is {family:?}")]
    FamilyMismatch {
        expected: &'static str,
        family: ModelFamily,
    },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("point models emit a single path, {requested} samples requested")]
    NSamplesOnPointModel { requested: usize },
    #[error("forecast contains non-finite values")]
    NonFiniteForecast,
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    GlobalMean,
    BatchMean,
    LinearNar,
    Nlinear,
    Dlinear,
    LinearAr,
    GaussianLinearNar,
    GaussianLinearAr,
}

impl ModelFamily {
    pub fn is_autoregressive(self) -> bool {
        matches!(self, ModelFamily::LinearAr | ModelFamily::GaussianLinearAr)
    }

    pub fn is_probabilistic(self) -> bool {
        matches!(
            self,
            ModelFamily::GaussianLinearNar | ModelFamily::GaussianLinearAr
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::GlobalMean => "global_mean",
            ModelFamily::BatchMean => "batch_mean",
            ModelFamily::LinearNar => "linear_nar",
            ModelFamily::Nlinear => "nlinear",
            ModelFamily::Dlinear => "dlinear",
            ModelFamily::LinearAr => "linear_ar",
            ModelFamily::GaussianLinearNar => "gaussian_linear_nar",
            ModelFamily::GaussianLinearAr => "gaussian_linear_ar",
        }
    }
}

/// Whether one weight set serves every variate or each variate gets its own.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ChannelMode {
    #[default]
    Shared,
    PerVariate,
}

fn default_ar_order() -> usize {
    1
}

fn default_ma_window() -> usize {
    25
}

/// Configuration of one forecaster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelSpec {
    pub family: ModelFamily,
    /// Context length L.
    pub context_len: usize,
    /// Forecast horizon T.
    pub horizon: usize,
    /// AR lag order p (AR families only).
    #[serde(default = "default_ar_order")]
    pub ar_order: usize,
    #[serde(default)]
    pub ridge_lambda: f64,
    /// DLinear trend moving-average window (odd).
    #[serde(default = "default_ma_window")]
    pub ma_window: usize,
    #[serde(default)]
    pub channel_mode: ChannelMode,
    /// Concatenate calendar covariates into the linear design
    /// (linear_nar / gaussian_linear_nar only).
    #[serde(default)]
    pub use_covariates: bool,
    #[serde(default)]
    pub seed: u64,
}

impl ModelSpec {
    pub fn new(family: ModelFamily, context_len: usize, horizon: usize) -> Self {
        Self {
            family,
            context_len,
            horizon,
            ar_order: default_ar_order(),
            ridge_lambda: 0.0,
            ma_window: default_ma_window(),
            channel_mode: ChannelMode::Shared,
            use_covariates: false,
            seed: 0,
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.context_len == 0 || self.horizon == 0 {
            return Err(ModelError::InvalidSpec(
                "context_len and horizon must be positive".into(),
            ));
        }
        if self.ridge_lambda < 0.0 {
            return Err(ModelError::InvalidSpec("ridge_lambda must be >= 0".into()));
        }
        if self.family.is_autoregressive() {
            if self.ar_order == 0 {
                return Err(ModelError::InvalidSpec("ar_order must be >= 1".into()));
            }
            if self.ar_order > self.context_len {
                return Err(ModelError::InvalidSpec(format!(
                    "ar_order {} exceeds context_len {}",
                    self.ar_order, self.context_len
                )));
            }
        }
        if self.family == ModelFamily::Dlinear && self.ma_window % 2 == 0 {
            return Err(ModelError::InvalidSpec(format!(
                "ma_window must be odd, got {}",
                self.ma_window
            )));
        }
        if self.use_covariates
            && !matches!(
                self.family,
                ModelFamily::LinearNar | ModelFamily::GaussianLinearNar
            )
        {
            return Err(ModelError::InvalidSpec(format!(
                "covariate concatenation is only supported for linear_nar and \
                 gaussian_linear_nar, not {}",
                self.family.name()
            )));
        }
        Ok(())
    }
}

/// Rolling hidden state for autoregressive decoding: the last `p` values.
#[derive(Debug, Clone)]
pub struct EncoderState {
    pub h: Vec<f64>,
}

impl EncoderState {
    fn from_context(context_row: &[f64], p: usize) -> Self {
        Self {
            h: context_row[context_row.len() - p..].to_vec(),
        }
    }

    /// Advance the state with the next observed or predicted value.
    fn advance(&mut self, x: f64) {
        self.h.rotate_left(1);
        *self.h.last_mut().unwrap() = x;
    }

    fn dim(&self) -> usize {
        self.h.len()
    }
}

mod matrix_rows {
    //! Serialize `Array2<f64>` as nested row lists.

    use ndarray::Array2;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(m: &Array2<f64>, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<f64>> = m.rows().into_iter().map(|r| r.to_vec()).collect();
        rows.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Array2<f64>, D::Error> {
        let rows: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != ncols) {
            return Err(serde::de::Error::custom("ragged weight matrix"));
        }
        Array2::from_shape_vec((nrows, ncols), rows.concat()).map_err(serde::de::Error::custom)
    }
}

mod matrix_list {
    //! Serialize `Vec<Array2<f64>>` as a list of nested row lists.

    use ndarray::Array2;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(ms: &[Array2<f64>], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(ms.len()))?;
        for m in ms {
            let rows: Vec<Vec<f64>> = m.rows().into_iter().map(|r| r.to_vec()).collect();
            seq.serialize_element(&rows)?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Array2<f64>>, D::Error> {
        let lists: Vec<Vec<Vec<f64>>> = Vec::deserialize(d)?;
        lists
            .into_iter()
            .map(|rows| {
                let nrows = rows.len();
                let ncols = rows.first().map_or(0, Vec::len);
                if rows.iter().any(|r| r.len() != ncols) {
                    return Err(serde::de::Error::custom("ragged weight matrix"));
                }
                Array2::from_shape_vec((nrows, ncols), rows.concat())
                    .map_err(serde::de::Error::custom)
            })
            .collect()
    }
}

/// Family-specific fitted parameters. Weight lists hold one entry in shared
/// channel mode and one per variate otherwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ModelWeights {
    GlobalMean {
        means: Vec<f64>,
    },
    BatchMean,
    Linear {
        #[serde(with = "matrix_list")]
        w: Vec<Array2<f64>>,
    },
    Dlinear {
        #[serde(with = "matrix_list")]
        w_trend: Vec<Array2<f64>>,
        #[serde(with = "matrix_list")]
        w_remainder: Vec<Array2<f64>>,
    },
    GaussianNar {
        #[serde(with = "matrix_list")]
        w: Vec<Array2<f64>>,
        /// Per-horizon-step residual stds, shape `[groups][T]`.
        #[serde(with = "matrix_rows")]
        sigma: Array2<f64>,
    },
    Ar {
        coeffs: Vec<Vec<f64>>,
    },
    GaussianAr {
        coeffs: Vec<Vec<f64>>,
        /// One-step residual std per weight group.
        sigma: Vec<f64>,
    },
}

/// An immutable fitted forecaster.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub spec: ModelSpec,
    pub weights: ModelWeights,
    /// When present, predictions are mapped back to original units.
    pub scaler: Option<Scaler>,
}

impl TrainedModel {
    pub fn with_scaler(mut self, scaler: Scaler) -> Self {
        self.scaler = Some(scaler);
        self
    }

    pub fn to_json(&self) -> serde_json::Result<String> {
        serde_json::to_string_pretty(self)
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// Weight-group index serving variate `k`.
    fn group(&self, k: usize) -> usize {
        match self.spec.channel_mode {
            ChannelMode::Shared => 0,
            ChannelMode::PerVariate => k,
        }
    }
}

/// Closed-form ridge solve `W = B (A + lambda I)^-1` with `A = X X^T`
/// accumulated sample by sample. Rank is only checked when `lambda` is 0.
struct RidgeAccumulator {
    a: DMatrix<f64>,
    b: DMatrix<f64>,
    n_samples: usize,
}

impl RidgeAccumulator {
    fn new(design_dim: usize, out_dim: usize) -> Self {
        Self {
            a: DMatrix::zeros(design_dim, design_dim),
            b: DMatrix::zeros(out_dim, design_dim),
            n_samples: 0,
        }
    }

    fn add(&mut self, x: &DVector<f64>, y: &DVector<f64>) {
        self.a.ger(1.0, x, x, 1.0);
        self.b.ger(1.0, y, x, 1.0);
        self.n_samples += 1;
    }

    fn solve(mut self, lambda: f64) -> Result<Array2<f64>, ModelError> {
        let d = self.a.nrows();
        for i in 0..d {
            self.a[(i, i)] += lambda;
        }
        let svd = self.a.svd(true, true);
        let max_sv = svd
            .singular_values
            .iter()
            .cloned()
            .fold(0.0_f64, f64::max);
        if lambda == 0.0 {
            // exact deficiency shows up at float-noise scale; ill-conditioned
            // designs (1e-8-ish relative) are still solvable
            let rank_eps = max_sv * 1e-12;
            if max_sv == 0.0 || svd.rank(rank_eps) < d {
                return Err(ModelError::SingularSystem);
            }
        }
        let wt = svd
            .solve(&self.b.transpose(), max_sv * 1e-14)
            .map_err(|_| ModelError::SingularSystem)?;
        let t_out = self.b.nrows();
        Ok(Array2::from_shape_fn((t_out, d), |(r, c)| wt[(c, r)]))
    }
}

/// Moving average with replicate padding at the edges; `window` is odd.
fn moving_average_replicate(xs: &[f64], window: usize) -> Vec<f64> {
    let n = xs.len();
    let half = (window / 2) as isize;
    (0..n as isize)
        .map(|t| {
            let mut acc = 0.0;
            for j in t - half..=t + half {
                acc += xs[j.clamp(0, n as isize - 1) as usize];
            }
            acc / window as f64
        })
        .collect()
}

fn dlinear_split(context_row: &[f64], ma_window: usize) -> (Vec<f64>, Vec<f64>) {
    let trend = moving_average_replicate(context_row, ma_window);
    let remainder: Vec<f64> = context_row.iter().zip(&trend).map(|(x, t)| x - t).collect();
    (trend, remainder)
}

/// Flattened covariate extension of the design: context covariates then
/// target covariates, row-major.
fn covariate_extension(instance: &ForecastInstance) -> Vec<f64> {
    instance
        .context_covariates
        .iter()
        .chain(instance.target_covariates.iter())
        .copied()
        .collect()
}

fn check_windows(
    spec: &ModelSpec,
    windows: &[ForecastInstance],
) -> Result<(usize, usize), ModelError> {
    let first = windows.first().ok_or(ModelError::EmptyTrainingSet)?;
    let k = first.n_variates();
    let n_cov = first.context_covariates.nrows();
    for w in windows {
        if w.context_len() != spec.context_len || w.horizon() != spec.horizon {
            return Err(ModelError::ShapeMismatch(format!(
                "window is {}x{}, spec wants {}x{}",
                w.context_len(),
                w.horizon(),
                spec.context_len,
                spec.horizon
            )));
        }
        if w.n_variates() != k {
            return Err(ModelError::ShapeMismatch(
                "windows disagree on variate count".into(),
            ));
        }
    }
    if spec.use_covariates && n_cov == 0 {
        return Err(ModelError::InvalidSpec(
            "use_covariates set but windows carry no covariates".into(),
        ));
    }
    Ok((k, n_cov))
}

/// Variate index groups for fitting: one group with every variate in shared
/// mode, K singleton groups per variate otherwise.
fn fit_groups(mode: ChannelMode, k: usize) -> Vec<Vec<usize>> {
    match mode {
        ChannelMode::Shared => vec![(0..k).collect()],
        ChannelMode::PerVariate => (0..k).map(|v| vec![v]).collect(),
    }
}

/// Design/target pair for one (window, variate) sample of a NAR family.
fn nar_sample(
    spec: &ModelSpec,
    window: &ForecastInstance,
    variate: usize,
) -> (DVector<f64>, DVector<f64>) {
    let ctx: Vec<f64> = window.context.row(variate).to_vec();
    let tgt: Vec<f64> = window.target.row(variate).to_vec();
    let (mut x, y): (Vec<f64>, Vec<f64>) = match spec.family {
        ModelFamily::Nlinear => {
            let anchor = *ctx.last().unwrap();
            (
                ctx.iter().map(|v| v - anchor).collect(),
                tgt.iter().map(|v| v - anchor).collect(),
            )
        }
        ModelFamily::Dlinear => {
            let (trend, remainder) = dlinear_split(&ctx, spec.ma_window);
            let mut stacked = trend;
            stacked.extend(remainder);
            (stacked, tgt)
        }
        _ => (ctx, tgt),
    };
    if spec.use_covariates {
        x.extend(covariate_extension(window));
    }
    (DVector::from_vec(x), DVector::from_vec(y))
}

fn fit_nar_linear(
    spec: &ModelSpec,
    windows: &[ForecastInstance],
    groups: &[Vec<usize>],
    design_dim: usize,
) -> Result<Vec<Array2<f64>>, ModelError> {
    let mut out = Vec::with_capacity(groups.len());
    for group in groups {
        let mut acc = RidgeAccumulator::new(design_dim, spec.horizon);
        for window in windows {
            for &variate in group {
                let (x, y) = nar_sample(spec, window, variate);
                acc.add(&x, &y);
            }
        }
        out.push(acc.solve(spec.ridge_lambda)?);
    }
    Ok(out)
}

/// One-step lag-vector samples from the concatenated context and target of a
/// training window.
fn ar_samples(window: &ForecastInstance, variate: usize, p: usize) -> Vec<(DVector<f64>, f64)> {
    let mut series: Vec<f64> = window.context.row(variate).to_vec();
    series.extend(window.target.row(variate).iter());
    (0..series.len() - p)
        .map(|i| {
            (
                DVector::from_iterator(p, series[i..i + p].iter().copied()),
                series[i + p],
            )
        })
        .collect()
}

fn fit_ar_linear(
    spec: &ModelSpec,
    windows: &[ForecastInstance],
    groups: &[Vec<usize>],
) -> Result<Vec<Vec<f64>>, ModelError> {
    let p = spec.ar_order;
    let mut out = Vec::with_capacity(groups.len());
    for group in groups {
        let mut acc = RidgeAccumulator::new(p, 1);
        for window in windows {
            for &variate in group {
                for (x, y) in ar_samples(window, variate, p) {
                    acc.add(&x, &DVector::from_element(1, y));
                }
            }
        }
        out.push(acc.solve(spec.ridge_lambda)?.row(0).to_vec());
    }
    Ok(out)
}

fn linear_forecast_row(w: &Array2<f64>, x: &[f64]) -> Vec<f64> {
    w.rows()
        .into_iter()
        .map(|row| row.iter().zip(x).map(|(a, b)| a * b).sum())
        .collect()
}

/// Mean forecast of a NAR linear group for one (window, variate) pair,
/// mirroring the design construction used at fit time.
fn nar_group_forecast(
    spec: &ModelSpec,
    w: &Array2<f64>,
    instance: &ForecastInstance,
    variate: usize,
) -> Vec<f64> {
    let ctx: Vec<f64> = instance.context.row(variate).to_vec();
    match spec.family {
        ModelFamily::Nlinear => {
            let anchor = *ctx.last().unwrap();
            let anchored: Vec<f64> = ctx.iter().map(|v| v - anchor).collect();
            linear_forecast_row(w, &anchored)
                .into_iter()
                .map(|v| v + anchor)
                .collect()
        }
        ModelFamily::Dlinear => {
            let (trend, remainder) = dlinear_split(&ctx, spec.ma_window);
            let mut stacked = trend;
            stacked.extend(remainder);
            linear_forecast_row(w, &stacked)
        }
        _ => {
            let mut x = ctx;
            if spec.use_covariates {
                x.extend(covariate_extension(instance));
            }
            linear_forecast_row(w, &x)
        }
    }
}

/// Per-step residual stds of the fitted mean map over the training windows,
/// pooled within each weight group and floored at 1e-6.
fn nar_residual_sigma(
    spec: &ModelSpec,
    windows: &[ForecastInstance],
    groups: &[Vec<usize>],
    w: &[Array2<f64>],
) -> Array2<f64> {
    let t = spec.horizon;
    let mut sigma = Array2::zeros((groups.len(), t));
    for (g, group) in groups.iter().enumerate() {
        let mut sq = vec![0.0; t];
        let mut count = 0usize;
        for window in windows {
            for &variate in group {
                let forecast = nar_group_forecast(spec, &w[g], window, variate);
                for (step, f) in forecast.iter().enumerate() {
                    let err = window.target[[variate, step]] - f;
                    sq[step] += err * err;
                }
                count += 1;
            }
        }
        for (step, total) in sq.iter().enumerate() {
            sigma[[g, step]] = (total / count as f64).sqrt().max(SIGMA_FLOOR);
        }
    }
    sigma
}

fn ar_residual_sigma(
    spec: &ModelSpec,
    windows: &[ForecastInstance],
    groups: &[Vec<usize>],
    coeffs: &[Vec<f64>],
) -> Vec<f64> {
    let p = spec.ar_order;
    groups
        .iter()
        .enumerate()
        .map(|(g, group)| {
            let mut sq = 0.0;
            let mut count = 0usize;
            for window in windows {
                for &variate in group {
                    for (x, y) in ar_samples(window, variate, p) {
                        let pred: f64 = coeffs[g].iter().zip(x.iter()).map(|(a, b)| a * b).sum();
                        sq += (y - pred).powi(2);
                        count += 1;
                    }
                }
            }
            (sq / count as f64).sqrt().max(SIGMA_FLOOR)
        })
        .collect()
}

/// Fit a model to training windows (already in standardized space).
pub fn fit(spec: &ModelSpec, windows: &[ForecastInstance]) -> Result<TrainedModel, ModelError> {
    spec.validate()?;
    let (k, n_cov) = check_windows(spec, windows)?;
    let groups = fit_groups(spec.channel_mode, k);

    let weights = match spec.family {
        ModelFamily::GlobalMean => {
            // mean over every context and target cell seen in training
            let mut means = vec![0.0; k];
            let cells = windows.len() * (spec.context_len + spec.horizon);
            for window in windows {
                for v in 0..k {
                    means[v] += window.context.row(v).sum() + window.target.row(v).sum();
                }
            }
            for m in &mut means {
                *m /= cells as f64;
            }
            ModelWeights::GlobalMean { means }
        }
        ModelFamily::BatchMean => ModelWeights::BatchMean,
        ModelFamily::LinearNar | ModelFamily::Nlinear => {
            let design_dim = spec.context_len
                + if spec.use_covariates {
                    n_cov * (spec.context_len + spec.horizon)
                } else {
                    0
                };
            ModelWeights::Linear {
                w: fit_nar_linear(spec, windows, &groups, design_dim)?,
            }
        }
        ModelFamily::Dlinear => {
            let w = fit_nar_linear(spec, windows, &groups, 2 * spec.context_len)?;
            let (mut w_trend, mut w_remainder) = (Vec::new(), Vec::new());
            for full in w {
                let l = spec.context_len;
                w_trend.push(full.slice(ndarray::s![.., ..l]).to_owned());
                w_remainder.push(full.slice(ndarray::s![.., l..]).to_owned());
            }
            ModelWeights::Dlinear {
                w_trend,
                w_remainder,
            }
        }
        ModelFamily::GaussianLinearNar => {
            let design_dim = spec.context_len
                + if spec.use_covariates {
                    n_cov * (spec.context_len + spec.horizon)
                } else {
                    0
                };
            let w = fit_nar_linear(spec, windows, &groups, design_dim)?;
            let sigma = nar_residual_sigma(spec, windows, &groups, &w);
            ModelWeights::GaussianNar { w, sigma }
        }
        ModelFamily::LinearAr => ModelWeights::Ar {
            coeffs: fit_ar_linear(spec, windows, &groups)?,
        },
        ModelFamily::GaussianLinearAr => {
            let coeffs = fit_ar_linear(spec, windows, &groups)?;
            let sigma = ar_residual_sigma(spec, windows, &groups, &coeffs);
            ModelWeights::GaussianAr { coeffs, sigma }
        }
    };

    Ok(TrainedModel {
        spec: spec.clone(),
        weights,
        scaler: None,
    })
}

fn check_instance(model: &TrainedModel, instance: &ForecastInstance) -> Result<usize, ModelError> {
    if instance.context_len() != model.spec.context_len {
        return Err(ModelError::ShapeMismatch(format!(
            "instance context length {} differs from model context length {}",
            instance.context_len(),
            model.spec.context_len
        )));
    }
    let k = instance.n_variates();
    let weight_groups = match &model.weights {
        ModelWeights::GlobalMean { means } => means.len(),
        ModelWeights::BatchMean => k,
        ModelWeights::Linear { w } | ModelWeights::GaussianNar { w, .. } => match model
            .spec
            .channel_mode
        {
            ChannelMode::Shared => k,
            ChannelMode::PerVariate => w.len(),
        },
        ModelWeights::Dlinear { w_trend, .. } => match model.spec.channel_mode {
            ChannelMode::Shared => k,
            ChannelMode::PerVariate => w_trend.len(),
        },
        ModelWeights::Ar { coeffs } | ModelWeights::GaussianAr { coeffs, .. } => {
            match model.spec.channel_mode {
                ChannelMode::Shared => k,
                ChannelMode::PerVariate => coeffs.len(),
            }
        }
    };
    if weight_groups != k {
        return Err(ModelError::ShapeMismatch(format!(
            "model fitted for {weight_groups} variates, instance has {k}"
        )));
    }
    Ok(k)
}

/// Single forward application of a non-autoregressive family: all T horizon
/// steps at once, deterministic given the weights.
pub fn decode_nar(
    model: &TrainedModel,
    instance: &ForecastInstance,
) -> Result<Array2<f64>, ModelError> {
    if model.spec.family.is_autoregressive() {
        return Err(ModelError::FamilyMismatch {
            expected: "non-autoregressive",
            family: model.spec.family,
        });
    }
    let k = check_instance(model, instance)?;
    let t = model.spec.horizon;
    let mut out = Array2::zeros((k, t));
    for v in 0..k {
        let row: Vec<f64> = match &model.weights {
            ModelWeights::GlobalMean { means } => vec![means[v]; t],
            ModelWeights::BatchMean => {
                let mean = instance.context.row(v).sum() / instance.context_len() as f64;
                vec![mean; t]
            }
            ModelWeights::Linear { w } | ModelWeights::GaussianNar { w, .. } => {
                nar_group_forecast(&model.spec, &w[model.group(v)], instance, v)
            }
            ModelWeights::Dlinear {
                w_trend,
                w_remainder,
            } => {
                let g = model.group(v);
                let ctx: Vec<f64> = instance.context.row(v).to_vec();
                let (trend, remainder) = dlinear_split(&ctx, model.spec.ma_window);
                let a = linear_forecast_row(&w_trend[g], &trend);
                let b = linear_forecast_row(&w_remainder[g], &remainder);
                a.iter().zip(&b).map(|(x, y)| x + y).collect()
            }
            ModelWeights::Ar { .. } | ModelWeights::GaussianAr { .. } => unreachable!(),
        };
        for (step, value) in row.iter().enumerate() {
            out[[v, step]] = *value;
        }
    }
    Ok(out)
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    <StandardNormal as Distribution<f64>>::sample(&StandardNormal, rng)
}

/// Iterative decoding of an autoregressive family: the hidden state holds the
/// last `p` known-or-predicted values and every emission is fed back.
pub fn decode_ar(
    model: &TrainedModel,
    instance: &ForecastInstance,
    n_samples: usize,
) -> Result<Array3<f64>, ModelError> {
    if !model.spec.family.is_autoregressive() {
        return Err(ModelError::FamilyMismatch {
            expected: "autoregressive",
            family: model.spec.family,
        });
    }
    let k = check_instance(model, instance)?;
    let t = model.spec.horizon;
    let p = model.spec.ar_order;

    let (coeffs, sigma): (&Vec<Vec<f64>>, Option<&Vec<f64>>) = match &model.weights {
        ModelWeights::Ar { coeffs } => {
            if n_samples != 1 {
                return Err(ModelError::NSamplesOnPointModel {
                    requested: n_samples,
                });
            }
            (coeffs, None)
        }
        ModelWeights::GaussianAr { coeffs, sigma } => (coeffs, Some(sigma)),
        _ => unreachable!(),
    };

    let mut out = Array3::zeros((n_samples, k, t));
    for s in 0..n_samples {
        for v in 0..k {
            let g = model.group(v);
            let ctx: Vec<f64> = instance.context.row(v).to_vec();
            let mut state = EncoderState::from_context(&ctx, p);
            let mut rng = sigma.map(|_| {
                ChaCha8Rng::seed_from_u64(derive_seed(
                    model.spec.seed,
                    instance.origin_index as u64 ^ ((v as u64) << 40),
                    s as u64,
                ))
            });
            for step in 0..t {
                let mean: f64 = coeffs[g]
                    .iter()
                    .zip(&state.h)
                    .map(|(a, x)| a * x)
                    .sum();
                debug_assert_eq!(state.dim(), p);
                let value = match (&mut rng, sigma) {
                    (Some(rng), Some(sigma)) => mean + sigma[g] * standard_normal(rng),
                    _ => mean,
                };
                out[[s, v, step]] = value;
                state.advance(value);
            }
        }
    }
    Ok(out)
}

/// Produce a forecast, dispatching on the family's decoding scheme.
///
/// Point families return S = 1 regardless of `n_samples`; gaussian families
/// return `n_samples` independent paths. Output is in original units when a
/// scaler is attached.
pub fn predict(
    model: &TrainedModel,
    instance: &ForecastInstance,
    n_samples: usize,
) -> Result<SampleForecast, ModelError> {
    let n_samples = n_samples.max(1);
    let samples = match model.spec.family {
        ModelFamily::LinearAr => decode_ar(model, instance, 1)?,
        ModelFamily::GaussianLinearAr => decode_ar(model, instance, n_samples)?,
        ModelFamily::GaussianLinearNar => {
            let mean = decode_nar(model, instance)?;
            let sigma = match &model.weights {
                ModelWeights::GaussianNar { sigma, .. } => sigma,
                _ => unreachable!(),
            };
            let (k, t) = mean.dim();
            let mut samples = Array3::zeros((n_samples, k, t));
            for s in 0..n_samples {
                for v in 0..k {
                    let g = model.group(v);
                    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(
                        model.spec.seed,
                        instance.origin_index as u64 ^ ((v as u64) << 40),
                        s as u64,
                    ));
                    for step in 0..t {
                        samples[[s, v, step]] =
                            mean[[v, step]] + sigma[[g, step]] * standard_normal(&mut rng);
                    }
                }
            }
            samples
        }
        _ => {
            let path = decode_nar(model, instance)?;
            let (k, t) = path.dim();
            path.into_shape_with_order((1, k, t)).unwrap()
        }
    };

    // unstable AR recursions can overflow over long horizons
    if samples.iter().any(|v| !v.is_finite()) {
        return Err(ModelError::NonFiniteForecast);
    }
    let samples = match &model.scaler {
        Some(scaler) => {
            let (s_n, k, t) = samples.dim();
            if scaler.means.len() != k {
                return Err(ModelError::ShapeMismatch(format!(
                    "scaler fitted for {} variates, forecast has {k}",
                    scaler.means.len()
                )));
            }
            let mut rescaled = samples;
            for s in 0..s_n {
                for v in 0..k {
                    for step in 0..t {
                        rescaled[[s, v, step]] =
                            rescaled[[s, v, step]] * scaler.stds[v] + scaler.means[v];
                    }
                }
            }
            rescaled
        }
        None => samples,
    };
    Ok(SampleForecast::new(samples))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{make_windows, synthetic_hourly_timestamps, Dataset, Freq};
    use ndarray::array;
    use rand::Rng;

    fn instance(context: Array2<f64>, horizon: usize) -> ForecastInstance {
        let k = context.nrows();
        ForecastInstance {
            target: Array2::zeros((k, horizon)),
            context_covariates: Array2::zeros((0, context.ncols())),
            target_covariates: Array2::zeros((0, horizon)),
            origin_index: context.ncols() - 1,
            context,
        }
    }

    fn windows_from_series(series: Vec<f64>, l: usize, t: usize) -> Vec<ForecastInstance> {
        let n = series.len();
        let values = Array2::from_shape_vec((1, n), series).unwrap();
        let ds = Dataset::new(
            "w",
            values,
            synthetic_hourly_timestamps(n),
            Freq::Hourly,
            None,
        )
        .unwrap();
        make_windows(&ds, l, t, 1).unwrap()
    }

    #[test]
    fn global_mean_predicts_training_mean() {
        let windows = windows_from_series(vec![7.0; 40], 8, 4);
        let spec = ModelSpec::new(ModelFamily::GlobalMean, 8, 4);
        let model = fit(&spec, &windows).unwrap();
        let out = decode_nar(&model, &windows[0]).unwrap();
        assert!(out.iter().all(|v| (v - 7.0).abs() < 1e-12));
    }

    #[test]
    fn batch_mean_is_context_mean() {
        let ctx = array![[1.0, 2.0, 3.0], [10.0, 20.0, 30.0]];
        let spec = ModelSpec::new(ModelFamily::BatchMean, 3, 2);
        let model = fit(&spec, &[instance(ctx.clone(), 2)]).unwrap();
        let out = decode_nar(&model, &instance(ctx, 2)).unwrap();
        assert_eq!(out, array![[2.0, 2.0], [20.0, 20.0]]);
    }

    #[test]
    fn linear_nar_recovers_planted_map() {
        let l = 6;
        let t = 3;
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        let planted = Array2::from_shape_fn((t, l), |_| rng.gen_range(-1.0..1.0));
        let mut windows = Vec::new();
        for _ in 0..80 {
            let ctx = Array2::from_shape_fn((1, l), |_| rng.gen_range(-2.0..2.0));
            let x: Vec<f64> = ctx.row(0).to_vec();
            let y = linear_forecast_row(&planted, &x);
            let mut inst = instance(ctx, t);
            for (i, v) in y.iter().enumerate() {
                inst.target[[0, i]] = *v;
            }
            windows.push(inst);
        }
        let spec = ModelSpec::new(ModelFamily::LinearNar, l, t);
        let model = fit(&spec, &windows).unwrap();
        match &model.weights {
            ModelWeights::Linear { w } => {
                let max_err = w[0]
                    .iter()
                    .zip(planted.iter())
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max);
                assert!(max_err < 1e-6, "max weight error {max_err}");
            }
            other => panic!("unexpected weights {other:?}"),
        }
    }

    #[test]
    fn duplicate_rows_with_zero_lambda_are_singular() {
        let ctx = array![[1.0, 2.0, 3.0, 4.0]];
        let mut inst = instance(ctx, 2);
        inst.target = array![[5.0, 6.0]];
        // two identical samples, design dim 4 -> rank 1
        let windows = vec![inst.clone(), inst];
        let spec = ModelSpec::new(ModelFamily::LinearNar, 4, 2);
        assert!(matches!(fit(&spec, &windows), Err(ModelError::SingularSystem)));
    }

    #[test]
    fn empty_training_set() {
        let spec = ModelSpec::new(ModelFamily::GlobalMean, 4, 2);
        assert!(matches!(fit(&spec, &[]), Err(ModelError::EmptyTrainingSet)));
    }

    #[test]
    fn nlinear_zero_weights_return_anchor() {
        let spec = ModelSpec::new(ModelFamily::Nlinear, 4, 3);
        let model = TrainedModel {
            spec,
            weights: ModelWeights::Linear {
                w: vec![Array2::zeros((3, 4))],
            },
            scaler: None,
        };
        let out = decode_nar(&model, &instance(array![[1.0, 2.0, 3.0, 4.5]], 3)).unwrap();
        assert_eq!(out, array![[4.5, 4.5, 4.5]]);
    }

    #[test]
    fn dlinear_pure_trend_context_uses_trend_branch() {
        // constant context: remainder is identically zero after the split
        let spec = ModelSpec {
            ma_window: 3,
            ..ModelSpec::new(ModelFamily::Dlinear, 5, 2)
        };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let w_trend = Array2::from_shape_fn((2, 5), |_| rng.gen_range(-1.0..1.0));
        let w_remainder = Array2::from_shape_fn((2, 5), |_| rng.gen_range(-1.0..1.0));
        let model = TrainedModel {
            spec,
            weights: ModelWeights::Dlinear {
                w_trend: vec![w_trend.clone()],
                w_remainder: vec![w_remainder],
            },
            scaler: None,
        };
        let ctx = array![[2.0, 2.0, 2.0, 2.0, 2.0]];
        let out = decode_nar(&model, &instance(ctx, 2)).unwrap();
        let trend_only = linear_forecast_row(&w_trend, &[2.0; 5]);
        for i in 0..2 {
            assert!((out[[0, i]] - trend_only[i]).abs() < 1e-12);
        }
    }

    #[test]
    fn dlinear_branch_additivity() {
        let series: Vec<f64> = (0..60)
            .map(|t| 0.2 * t as f64 + (t as f64 * 0.81).sin())
            .collect();
        let windows = windows_from_series(series, 10, 4);
        let spec = ModelSpec {
            ma_window: 5,
            ridge_lambda: 1e-6,
            ..ModelSpec::new(ModelFamily::Dlinear, 10, 4)
        };
        let model = fit(&spec, &windows).unwrap();
        let inst = &windows[3];
        let full = decode_nar(&model, inst).unwrap();
        match &model.weights {
            ModelWeights::Dlinear {
                w_trend,
                w_remainder,
            } => {
                let ctx: Vec<f64> = inst.context.row(0).to_vec();
                let (trend, remainder) = dlinear_split(&ctx, 5);
                let a = linear_forecast_row(&w_trend[0], &trend);
                let b = linear_forecast_row(&w_remainder[0], &remainder);
                for i in 0..4 {
                    assert!((full[[0, i]] - (a[i] + b[i])).abs() < 1e-9);
                }
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn ar_geometric_decay() {
        let spec = ModelSpec {
            ar_order: 1,
            ..ModelSpec::new(ModelFamily::LinearAr, 4, 5)
        };
        let model = TrainedModel {
            spec,
            weights: ModelWeights::Ar {
                coeffs: vec![vec![0.9]],
            },
            scaler: None,
        };
        let out = decode_ar(&model, &instance(array![[0.0, 0.0, 0.0, 2.0]], 5), 1).unwrap();
        for k in 0..5 {
            let expected = 2.0 * 0.9_f64.powi(k as i32 + 1);
            assert!((out[[0, 0, k]] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn ar_unit_coefficient_extends_last_value() {
        let spec = ModelSpec {
            ar_order: 1,
            ..ModelSpec::new(ModelFamily::LinearAr, 3, 4)
        };
        let model = TrainedModel {
            spec,
            weights: ModelWeights::Ar {
                coeffs: vec![vec![1.0]],
            },
            scaler: None,
        };
        let out = decode_ar(&model, &instance(array![[5.0, 6.0, 7.5]], 4), 1).unwrap();
        assert!(out.iter().all(|v| (v - 7.5).abs() < 1e-12));
    }

    #[test]
    fn gaussian_ar_vanishing_noise_matches_point_recursion() {
        let coeffs = vec![vec![0.7, 0.25]];
        let point = TrainedModel {
            spec: ModelSpec {
                ar_order: 2,
                ..ModelSpec::new(ModelFamily::LinearAr, 5, 8)
            },
            weights: ModelWeights::Ar {
                coeffs: coeffs.clone(),
            },
            scaler: None,
        };
        let noisy = TrainedModel {
            spec: ModelSpec {
                ar_order: 2,
                seed: 3,
                ..ModelSpec::new(ModelFamily::GaussianLinearAr, 5, 8)
            },
            weights: ModelWeights::GaussianAr {
                coeffs,
                sigma: vec![1e-6],
            },
            scaler: None,
        };
        let inst = instance(array![[0.4, 0.8, 1.0, 1.1, 0.9]], 8);
        let a = decode_ar(&point, &inst, 1).unwrap();
        let b = decode_ar(&noisy, &inst, 1).unwrap();
        for i in 0..8 {
            assert!((a[[0, 0, i]] - b[[0, 0, i]]).abs() < 1e-3);
        }
    }

    #[test]
    fn unstable_ar_overflow_is_an_error_not_a_panic() {
        let spec = ModelSpec {
            ar_order: 1,
            ..ModelSpec::new(ModelFamily::LinearAr, 3, 1200)
        };
        let model = TrainedModel {
            spec,
            weights: ModelWeights::Ar {
                coeffs: vec![vec![2.0]],
            },
            scaler: None,
        };
        let inst = instance(array![[1.0, 1.0, 1.0]], 1200);
        assert!(matches!(
            predict(&model, &inst, 1),
            Err(ModelError::NonFiniteForecast)
        ));
    }

    #[test]
    fn ar_point_model_rejects_multiple_samples() {
        let spec = ModelSpec {
            ar_order: 1,
            ..ModelSpec::new(ModelFamily::LinearAr, 3, 2)
        };
        let model = TrainedModel {
            spec,
            weights: ModelWeights::Ar {
                coeffs: vec![vec![0.5]],
            },
            scaler: None,
        };
        assert!(matches!(
            decode_ar(&model, &instance(array![[1.0, 1.0, 1.0]], 2), 4),
            Err(ModelError::NSamplesOnPointModel { requested: 4 })
        ));
    }

    #[test]
    fn family_mismatch_both_ways() {
        let nar = fit(
            &ModelSpec::new(ModelFamily::BatchMean, 3, 2),
            &[instance(array![[1.0, 2.0, 3.0]], 2)],
        )
        .unwrap();
        assert!(matches!(
            decode_ar(&nar, &instance(array![[1.0, 2.0, 3.0]], 2), 1),
            Err(ModelError::FamilyMismatch { .. })
        ));
        let ar = TrainedModel {
            spec: ModelSpec {
                ar_order: 1,
                ..ModelSpec::new(ModelFamily::LinearAr, 3, 2)
            },
            weights: ModelWeights::Ar {
                coeffs: vec![vec![1.0]],
            },
            scaler: None,
        };
        assert!(matches!(
            decode_nar(&ar, &instance(array![[1.0, 2.0, 3.0]], 2)),
            Err(ModelError::FamilyMismatch { .. })
        ));
    }

    #[test]
    fn predict_point_family_returns_single_path() {
        let windows = windows_from_series((0..40).map(f64::from).collect(), 8, 4);
        let model = fit(&ModelSpec::new(ModelFamily::BatchMean, 8, 4), &windows).unwrap();
        let fc = predict(&model, &windows[0], 100).unwrap();
        assert_eq!(fc.n_samples(), 1);
    }

    #[test]
    fn predict_gaussian_nar_sample_mean_near_mu() {
        let series: Vec<f64> = (0..300).map(|t| (t as f64 * 0.3).sin()).collect();
        let windows = windows_from_series(series, 12, 4);
        let spec = ModelSpec {
            ridge_lambda: 1e-6,
            seed: 7,
            ..ModelSpec::new(ModelFamily::GaussianLinearNar, 12, 4)
        };
        let model = fit(&spec, &windows).unwrap();
        let inst = &windows[5];
        let mu = decode_nar(&model, inst).unwrap();
        let sigma = match &model.weights {
            ModelWeights::GaussianNar { sigma, .. } => sigma.clone(),
            _ => unreachable!(),
        };
        let fc = predict(&model, inst, 100).unwrap();
        assert_eq!(fc.n_samples(), 100);
        let mean_path = fc.mean_path();
        for step in 0..4 {
            let bound = 4.0 * sigma[[0, step]] / 10.0;
            assert!(
                (mean_path[[0, step]] - mu[[0, step]]).abs() < bound,
                "step {step}: sample mean too far from mu"
            );
        }
    }

    #[test]
    fn predict_same_seed_identical() {
        let series: Vec<f64> = (0..200).map(|t| (t as f64 * 0.7).cos()).collect();
        let windows = windows_from_series(series, 10, 3);
        let spec = ModelSpec {
            seed: 42,
            ridge_lambda: 1e-6,
            ..ModelSpec::new(ModelFamily::GaussianLinearNar, 10, 3)
        };
        let model = fit(&spec, &windows).unwrap();
        let a = predict(&model, &windows[1], 20).unwrap();
        let b = predict(&model, &windows[1], 20).unwrap();
        assert_eq!(a.samples, b.samples);
    }

    #[test]
    fn fit_is_bitwise_deterministic() {
        let series: Vec<f64> = (0..150)
            .map(|t| 0.1 * t as f64 + (t as f64 * 1.3).sin())
            .collect();
        let windows = windows_from_series(series, 12, 6);
        let spec = ModelSpec {
            ridge_lambda: 1e-4,
            ..ModelSpec::new(ModelFamily::LinearNar, 12, 6)
        };
        let a = fit(&spec, &windows).unwrap();
        let b = fit(&spec, &windows).unwrap();
        assert_eq!(a, b);
        let fa = decode_nar(&a, &windows[0]).unwrap();
        let fb = decode_nar(&b, &windows[0]).unwrap();
        assert_eq!(fa, fb);
    }

    #[test]
    fn scaler_maps_predictions_back() {
        let windows = windows_from_series(vec![0.0; 30], 5, 2);
        let model = fit(&ModelSpec::new(ModelFamily::GlobalMean, 5, 2), &windows)
            .unwrap()
            .with_scaler(Scaler {
                means: vec![100.0],
                stds: vec![5.0],
                std_floor: 1e-8,
            });
        let fc = predict(&model, &windows[0], 1).unwrap();
        // standardized forecast 0 maps to the original-unit mean
        assert!(fc.samples.iter().all(|v| (v - 100.0).abs() < 1e-12));
    }

    #[test]
    fn invalid_specs_rejected() {
        let mut spec = ModelSpec::new(ModelFamily::Dlinear, 8, 2);
        spec.ma_window = 4;
        assert!(matches!(spec.validate(), Err(ModelError::InvalidSpec(_))));

        let mut spec = ModelSpec::new(ModelFamily::LinearAr, 4, 2);
        spec.ar_order = 9;
        assert!(matches!(spec.validate(), Err(ModelError::InvalidSpec(_))));

        let mut spec = ModelSpec::new(ModelFamily::Dlinear, 8, 2);
        spec.use_covariates = true;
        assert!(matches!(spec.validate(), Err(ModelError::InvalidSpec(_))));
    }

    #[test]
    fn per_variate_mode_learns_distinct_maps() {
        let l = 5;
        let t = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        let maps = [
            Array2::from_shape_fn((t, l), |_| rng.gen_range(-1.0..1.0)),
            Array2::from_shape_fn((t, l), |_| rng.gen_range(-1.0..1.0)),
        ];
        let mut windows = Vec::new();
        for origin in 0..60 {
            let context = Array2::from_shape_fn((2, l), |_| rng.gen_range(-2.0..2.0));
            let mut target = Array2::zeros((2, t));
            for v in 0..2 {
                let y = linear_forecast_row(&maps[v], &context.row(v).to_vec());
                for (i, value) in y.iter().enumerate() {
                    target[[v, i]] = *value;
                }
            }
            windows.push(ForecastInstance {
                context,
                target,
                context_covariates: Array2::zeros((0, l)),
                target_covariates: Array2::zeros((0, t)),
                origin_index: origin + l - 1,
            });
        }
        let spec = ModelSpec {
            channel_mode: ChannelMode::PerVariate,
            ..ModelSpec::new(ModelFamily::LinearNar, l, t)
        };
        let model = fit(&spec, &windows).unwrap();
        match &model.weights {
            ModelWeights::Linear { w } => {
                assert_eq!(w.len(), 2);
                for v in 0..2 {
                    let max_err = w[v]
                        .iter()
                        .zip(maps[v].iter())
                        .map(|(a, b)| (a - b).abs())
                        .fold(0.0_f64, f64::max);
                    assert!(max_err < 1e-6, "variate {v}: max error {max_err}");
                }
            }
            other => panic!("unexpected weights {other:?}"),
        }
        // forecasts route each variate through its own map
        let out = decode_nar(&model, &windows[0]).unwrap();
        for v in 0..2 {
            for i in 0..t {
                assert!((out[[v, i]] - windows[0].target[[v, i]]).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn model_json_round_trip_fidelity() {
        let series: Vec<f64> = (0..120)
            .map(|t| (t as f64 * 0.37).sin() + 0.05 * t as f64)
            .collect();
        let windows = windows_from_series(series, 10, 4);
        let spec = ModelSpec {
            ridge_lambda: 1e-5,
            ..ModelSpec::new(ModelFamily::LinearNar, 10, 4)
        };
        let model = fit(&spec, &windows).unwrap();
        let back = TrainedModel::from_json(&model.to_json().unwrap()).unwrap();
        match (&model.weights, &back.weights) {
            (ModelWeights::Linear { w: a }, ModelWeights::Linear { w: b }) => {
                let max_err = a[0]
                    .iter()
                    .zip(b[0].iter())
                    .map(|(x, y)| (x - y).abs())
                    .fold(0.0_f64, f64::max);
                assert!(max_err < 1e-12);
            }
            _ => panic!("weights changed kind in round trip"),
        }
        assert_eq!(model.spec, back.spec);
    }

    #[test]
    fn covariates_enter_linear_design() {
        // target equals the first target covariate: learnable only with
        // covariates concatenated
        let l = 4;
        let t = 2;
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let mut windows = Vec::new();
        for origin in 0..40 {
            let context = Array2::from_shape_fn((1, l), |_| rng.gen_range(-1.0..1.0));
            let context_cov = Array2::from_shape_fn((1, l), |_| rng.gen_range(-1.0..1.0));
            let target_cov = Array2::from_shape_fn((1, t), |_| rng.gen_range(-1.0..1.0));
            let target = target_cov.clone();
            windows.push(ForecastInstance {
                context,
                target,
                context_covariates: context_cov,
                target_covariates: target_cov,
                origin_index: origin + l - 1,
            });
        }
        let spec = ModelSpec {
            use_covariates: true,
            ridge_lambda: 0.0,
            ..ModelSpec::new(ModelFamily::LinearNar, l, t)
        };
        let model = fit(&spec, &windows).unwrap();
        let out = decode_nar(&model, &windows[0]).unwrap();
        for step in 0..t {
            assert!(
                (out[[0, step]] - windows[0].target[[0, step]]).abs() < 1e-6,
                "covariate-driven target not recovered"
            );
        }
    }
}
