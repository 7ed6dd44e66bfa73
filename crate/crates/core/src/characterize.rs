//! Intrinsic dataset characteristics: trend strength, seasonality strength,
//! distributional distance from a Gaussian, and outlier ratios.
//!
//! The additive decomposition `y_t = T_t + S_t + R_t` drives the two strength
//! scores: `F_T = max(0, 1 - Var(R)/Var(T+R))` and
//! `F_S = max(0, 1 - Var(R)/Var(S+R))`, both with population variances.

use crate::data::Dataset;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Variance below this is treated as zero when forming strength ratios.
const VAR_EPS: f64 = 1e-12;

/// Window standard deviations below this skip the window in JS estimation.
const WINDOW_STD_FLOOR: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum CharacterizeError {
    #[error("series of length {n} too short for period {period}: need at least {needed}")]
    SeriesTooShortForPeriod {
        n: usize,
        period: usize,
        needed: usize,
    },
    #[error("period must be at least 2, got {0}")]
    BadPeriod(usize),
    #[error("window length {window_len} exceeds series length {n}")]
    WindowTooLong { window_len: usize, n: usize },
    #[error("window length must be at least 8, got {0}")]
    WindowTooShort(usize),
    #[error("need at least 4 histogram bins, got {0}")]
    TooFewBins(usize),
    #[error("variate {index}: {source}")]
    Variate {
        index: usize,
        #[source]
        source: Box<CharacterizeError>,
    },
}

/// Decomposition algorithm choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecompositionMethod {
    /// Centered moving-average trend plus per-phase seasonal means.
    Classical,
    /// Iterated LOESS seasonal-trend decomposition.
    Stl,
}

/// Additive components of a single series.
///
/// `trend + seasonal + remainder` reproduces the input exactly (the remainder
/// is defined as the residual).
#[derive(Debug, Clone)]
pub struct Components {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub remainder: Vec<f64>,
    pub period: usize,
}

/// Per-dataset characterization scores (unweighted means across variates).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharacterizationReport {
    pub trend_strength: f64,
    pub seasonality_strength: f64,
    pub js_divergence: f64,
    pub outlier_global_pct: f64,
    pub outlier_local_pct: f64,
    pub window_len: usize,
    pub period: usize,
    pub skipped_windows: usize,
}

fn population_mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn population_var(xs: &[f64]) -> f64 {
    let mean = population_mean(xs);
    xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / xs.len() as f64
}

/// Centered moving average of window `period`; even periods use the standard
/// 2 x p weighted average. Edge steps take the nearest valid interior value.
fn centered_moving_average(series: &[f64], period: usize) -> Vec<f64> {
    let n = series.len();
    let half = period / 2;
    let mut trend = vec![0.0; n];
    if period % 2 == 0 {
        // weights [0.5, 1, ..., 1, 0.5] / period over period + 1 points
        for t in half..n - half {
            let mut acc = 0.5 * (series[t - half] + series[t + half]);
            for j in (t - half + 1)..(t + half) {
                acc += series[j];
            }
            trend[t] = acc / period as f64;
        }
    } else {
        for t in half..n - half {
            let window = &series[t - half..=t + half];
            trend[t] = window.iter().sum::<f64>() / period as f64;
        }
    }
    for t in 0..half {
        trend[t] = trend[half];
    }
    for t in n - half..n {
        trend[t] = trend[n - half - 1];
    }
    trend
}

fn classical_decompose(series: &[f64], period: usize) -> Components {
    let n = series.len();
    let trend = centered_moving_average(series, period);
    let detrended: Vec<f64> = series.iter().zip(&trend).map(|(y, t)| y - t).collect();

    let mut phase_sums = vec![0.0; period];
    let mut phase_counts = vec![0usize; period];
    for (t, &d) in detrended.iter().enumerate() {
        phase_sums[t % period] += d;
        phase_counts[t % period] += 1;
    }
    let mut phase_means: Vec<f64> = phase_sums
        .iter()
        .zip(&phase_counts)
        .map(|(s, &c)| s / c as f64)
        .collect();
    let grand = population_mean(&phase_means);
    for m in &mut phase_means {
        *m -= grand;
    }

    let seasonal: Vec<f64> = (0..n).map(|t| phase_means[t % period]).collect();
    let remainder: Vec<f64> = (0..n)
        .map(|t| series[t] - trend[t] - seasonal[t])
        .collect();
    Components {
        trend,
        seasonal,
        remainder,
        period,
    }
}

/// Weighted local linear regression smoother with tricube weights.
///
/// `xs` are the abscissae of `ys`; the smoother is evaluated at `eval`.
/// `span` is the number of nearest neighbours used per fit, clamped to the
/// available points.
fn loess(xs: &[f64], ys: &[f64], eval: &[f64], span: usize) -> Vec<f64> {
    let n = xs.len();
    let q = span.min(n).max(1);
    let mut out = Vec::with_capacity(eval.len());
    for &x0 in eval {
        // q nearest neighbours of x0; xs is sorted, so scan a sliding range.
        let mut lo = match xs.binary_search_by(|x| x.partial_cmp(&x0).unwrap()) {
            Ok(i) | Err(i) => i.saturating_sub(q / 2).min(n - q),
        };
        // widen to the true q-nearest window
        loop {
            let shift_right = lo + q < n
                && (xs[lo + q] - x0).abs() < (xs[lo] - x0).abs();
            if shift_right {
                lo += 1;
            } else if lo > 0 && (xs[lo - 1] - x0).abs() < (xs[lo + q - 1] - x0).abs() {
                lo -= 1;
            } else {
                break;
            }
        }
        let window_x = &xs[lo..lo + q];
        let window_y = &ys[lo..lo + q];
        let dmax = window_x
            .iter()
            .map(|x| (x - x0).abs())
            .fold(0.0_f64, f64::max)
            .max(f64::EPSILON);

        // weighted least squares for a local line a + b*(x - x0)
        let (mut sw, mut swx, mut swy, mut swxx, mut swxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (&x, &y) in window_x.iter().zip(window_y) {
            let u = ((x - x0).abs() / dmax).min(1.0);
            let w = (1.0 - u * u * u).powi(3);
            let dx = x - x0;
            sw += w;
            swx += w * dx;
            swy += w * y;
            swxx += w * dx * dx;
            swxy += w * dx * y;
        }
        let det = sw * swxx - swx * swx;
        let value = if det.abs() > 1e-12 * sw.max(1.0) {
            (swxx * swy - swx * swxy) / det
        } else if sw > 0.0 {
            swy / sw
        } else {
            ys[lo]
        };
        out.push(value);
    }
    out
}

fn moving_average_shrink(series: &[f64], window: usize) -> Vec<f64> {
    let n = series.len();
    let mut out = Vec::with_capacity(n + 1 - window);
    let mut acc: f64 = series[..window].iter().sum();
    out.push(acc / window as f64);
    for t in window..n {
        acc += series[t] - series[t - window];
        out.push(acc / window as f64);
    }
    out
}

fn smallest_odd_at_least(x: f64) -> usize {
    let mut v = x.ceil() as usize;
    if v % 2 == 0 {
        v += 1;
    }
    v.max(3)
}

/// Seasonal-trend decomposition by LOESS with the classic inner loop:
/// cycle-subseries smoothing, low-pass filtering, and trend smoothing.
fn stl_decompose(series: &[f64], period: usize) -> Components {
    let n = series.len();
    let seasonal_span = 7usize;
    let lowpass_span = smallest_odd_at_least(period as f64);
    let trend_span =
        smallest_odd_at_least(1.5 * period as f64 / (1.0 - 1.5 / seasonal_span as f64));
    let inner_iterations = 2;

    let mut trend = vec![0.0; n];
    let mut seasonal = vec![0.0; n];

    for _ in 0..inner_iterations {
        // 1. detrend
        let detrended: Vec<f64> = series.iter().zip(&trend).map(|(y, t)| y - t).collect();

        // 2. cycle-subseries smoothing, extended one period on each side
        let mut extended = vec![0.0; n + 2 * period];
        for phase in 0..period {
            let sub_x: Vec<f64> = (phase..n).step_by(period).map(|t| t as f64).collect();
            let sub_y: Vec<f64> = (phase..n).step_by(period).map(|t| detrended[t]).collect();
            let mut eval: Vec<f64> = Vec::with_capacity(sub_x.len() + 2);
            eval.push(sub_x[0] - period as f64);
            eval.extend_from_slice(&sub_x);
            eval.push(sub_x[sub_x.len() - 1] + period as f64);
            let smoothed = loess(&sub_x, &sub_y, &eval, seasonal_span);
            for (j, &v) in smoothed.iter().enumerate() {
                let pos = (eval[j] + period as f64) as usize; // offset by one period
                extended[pos] = v;
            }
        }

        // 3. low-pass: MA(p), MA(p), MA(3), then LOESS
        let lp = moving_average_shrink(&extended, period);
        let lp = moving_average_shrink(&lp, period);
        let lp = moving_average_shrink(&lp, 3);
        debug_assert_eq!(lp.len(), n);
        let grid: Vec<f64> = (0..n).map(|t| t as f64).collect();
        let lowpass = loess(&grid, &lp, &grid, lowpass_span);

        // 4. seasonal = smoothed subseries minus low-pass
        for t in 0..n {
            seasonal[t] = extended[t + period] - lowpass[t];
        }

        // 5/6. deseasonalize and smooth the trend
        let deseasonalized: Vec<f64> = series.iter().zip(&seasonal).map(|(y, s)| y - s).collect();
        trend = loess(&grid, &deseasonalized, &grid, trend_span);
    }

    let remainder: Vec<f64> = (0..n)
        .map(|t| series[t] - trend[t] - seasonal[t])
        .collect();
    Components {
        trend,
        seasonal,
        remainder,
        period,
    }
}

/// Additive decomposition `y = T + S + R` of one series.
pub fn decompose(
    series: &[f64],
    period: usize,
    method: DecompositionMethod,
) -> Result<Components, CharacterizeError> {
    if period < 2 {
        return Err(CharacterizeError::BadPeriod(period));
    }
    let n = series.len();
    if n < 2 * period {
        return Err(CharacterizeError::SeriesTooShortForPeriod {
            n,
            period,
            needed: 2 * period,
        });
    }
    Ok(match method {
        DecompositionMethod::Classical => classical_decompose(series, period),
        DecompositionMethod::Stl => stl_decompose(series, period),
    })
}

fn variance_ratio_strength(var_r: f64, var_xr: f64) -> f64 {
    if var_xr < VAR_EPS {
        // no signal left once the component is removed: call it strength 0
        0.0
    } else {
        (1.0 - var_r / var_xr).max(0.0)
    }
}

/// `F_T = max(0, 1 - Var(R)/Var(T+R))` with population variances.
pub fn trend_strength(c: &Components) -> f64 {
    let tr: Vec<f64> = c.trend.iter().zip(&c.remainder).map(|(t, r)| t + r).collect();
    variance_ratio_strength(population_var(&c.remainder), population_var(&tr))
}

/// `F_S = max(0, 1 - Var(R)/Var(S+R))` with population variances.
pub fn seasonality_strength(c: &Components) -> f64 {
    let sr: Vec<f64> = c
        .seasonal
        .iter()
        .zip(&c.remainder)
        .map(|(s, r)| s + r)
        .collect();
    variance_ratio_strength(population_var(&c.remainder), population_var(&sr))
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * (1.0 + libm::erf(z / std::f64::consts::SQRT_2))
}

/// Jensen-Shannon divergence (log base 2, hence in `[0, 1]`) between two
/// non-negative mass vectors; each is renormalized to sum 1.
pub fn jensen_shannon_bits(p: &[f64], q: &[f64]) -> f64 {
    assert_eq!(p.len(), q.len(), "mass vectors must have equal length");
    let sp: f64 = p.iter().sum();
    let sq: f64 = q.iter().sum();
    let mut js = 0.0;
    for (&pi, &qi) in p.iter().zip(q) {
        let pi = pi / sp;
        let qi = qi / sq;
        let mi = 0.5 * (pi + qi);
        if pi > 0.0 {
            js += 0.5 * pi * (pi.log2() - mi.log2());
        }
        if qi > 0.0 {
            js += 0.5 * qi * (qi.log2() - mi.log2());
        }
    }
    js.clamp(0.0, 1.0)
}

/// Mean JS divergence between per-window empirical histograms and the
/// Gaussian fitted to each window, over non-overlapping windows.
///
/// The histogram support is `[mean - 4*std, mean + 4*std]` with `n_bins`
/// equal bins; points outside are clamped into the edge bins. Windows with
/// std below 1e-8 are skipped and counted.
pub fn gaussian_js(
    series: &[f64],
    window_len: usize,
    n_bins: usize,
) -> Result<(f64, usize), CharacterizeError> {
    if window_len < 8 {
        return Err(CharacterizeError::WindowTooShort(window_len));
    }
    if n_bins < 4 {
        return Err(CharacterizeError::TooFewBins(n_bins));
    }
    let n = series.len();
    if n < window_len {
        return Err(CharacterizeError::WindowTooLong { window_len, n });
    }

    let mut total = 0.0;
    let mut used = 0usize;
    let mut skipped = 0usize;
    let mut start = 0;
    while start + window_len <= n {
        let window = &series[start..start + window_len];
        start += window_len;
        let mean = population_mean(window);
        let std = population_var(window).sqrt();
        if std < WINDOW_STD_FLOOR {
            skipped += 1;
            continue;
        }
        let lo = mean - 4.0 * std;
        let hi = mean + 4.0 * std;
        let bin_width = (hi - lo) / n_bins as f64;

        let mut hist = vec![0.0; n_bins];
        for &x in window {
            let idx = (((x - lo) / bin_width).floor() as isize).clamp(0, n_bins as isize - 1);
            hist[idx as usize] += 1.0;
        }
        let mut gauss = vec![0.0; n_bins];
        for (b, g) in gauss.iter_mut().enumerate() {
            let zl = (lo + b as f64 * bin_width - mean) / std;
            let zr = (lo + (b + 1) as f64 * bin_width - mean) / std;
            *g = normal_cdf(zr) - normal_cdf(zl);
        }
        total += jensen_shannon_bits(&hist, &gauss);
        used += 1;
    }
    let js = if used > 0 { total / used as f64 } else { 0.0 };
    Ok((js, skipped))
}

fn outlier_fraction(window: &[f64]) -> f64 {
    let mean = population_mean(window);
    let std = population_var(window).sqrt();
    if std < WINDOW_STD_FLOOR {
        return 0.0;
    }
    let count = window.iter().filter(|&&x| ((x - mean) / std).abs() > 3.0).count();
    count as f64 / window.len() as f64
}

/// Percentages of points more than 3 population standard deviations from the
/// mean: `global_pct` over the full series, `local_pct` averaged over
/// non-overlapping windows of `window_len`.
pub fn outlier_ratios(series: &[f64], window_len: usize) -> (f64, f64) {
    assert!(window_len >= 1, "window_len must be positive");
    let global_pct = 100.0 * outlier_fraction(series);
    let mut fractions = Vec::new();
    let mut start = 0;
    while start + window_len <= series.len() {
        fractions.push(outlier_fraction(&series[start..start + window_len]));
        start += window_len;
    }
    let local_pct = if fractions.is_empty() {
        0.0
    } else {
        100.0 * population_mean(&fractions)
    };
    (global_pct, local_pct)
}

/// Characterize every variate of a panel and average the scores.
pub fn characterize_dataset(
    ds: &Dataset,
    period: usize,
    window_len: usize,
    n_bins: usize,
    method: DecompositionMethod,
) -> Result<CharacterizationReport, CharacterizeError> {
    let k = ds.n_variates();
    let mut ft_sum = 0.0;
    let mut fs_sum = 0.0;
    let mut js_sum = 0.0;
    let mut global_sum = 0.0;
    let mut local_sum = 0.0;
    let mut skipped_total = 0usize;

    for (index, row) in ds.values.rows().into_iter().enumerate() {
        let series = row.to_vec();
        let attach = |source: CharacterizeError| CharacterizeError::Variate {
            index,
            source: Box::new(source),
        };
        let components = decompose(&series, period, method).map_err(attach)?;
        ft_sum += trend_strength(&components);
        fs_sum += seasonality_strength(&components);
        let (js, skipped) = gaussian_js(&series, window_len, n_bins).map_err(attach)?;
        js_sum += js;
        skipped_total += skipped;
        let (global, local) = outlier_ratios(&series, window_len);
        global_sum += global;
        local_sum += local;
    }

    let kf = k as f64;
    Ok(CharacterizationReport {
        trend_strength: ft_sum / kf,
        seasonality_strength: fs_sum / kf,
        js_divergence: js_sum / kf,
        outlier_global_pct: global_sum / kf,
        outlier_local_pct: local_sum / kf,
        window_len,
        period,
        skipped_windows: skipped_total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{synthetic_hourly_timestamps, Freq};
    use ndarray::Array2;
    use std::f64::consts::TAU;

    fn sinusoid(n: usize, period: usize, amplitude: f64) -> Vec<f64> {
        (0..n)
            .map(|t| amplitude * (TAU * t as f64 / period as f64).sin())
            .collect()
    }

    fn reconstruction_error(series: &[f64], c: &Components) -> f64 {
        series
            .iter()
            .enumerate()
            .map(|(t, y)| (y - (c.trend[t] + c.seasonal[t] + c.remainder[t])).abs())
            .fold(0.0, f64::max)
    }

    #[test]
    fn pure_sinusoid_has_tiny_remainder() {
        for method in [DecompositionMethod::Classical, DecompositionMethod::Stl] {
            let series = sinusoid(240, 24, 1.0);
            let c = decompose(&series, 24, method).unwrap();
            let interior = &c.remainder[24..216];
            let max_r = interior.iter().fold(0.0_f64, |a, r| a.max(r.abs()));
            assert!(max_r < 1e-6, "{method:?}: max interior remainder {max_r}");
            assert!(reconstruction_error(&series, &c) < 1e-9);
        }
    }

    #[test]
    fn constant_series_degenerates() {
        let series = vec![3.5; 100];
        let c = decompose(&series, 10, DecompositionMethod::Classical).unwrap();
        assert!(c.trend.iter().all(|t| (t - 3.5).abs() < 1e-12));
        assert!(c.seasonal.iter().all(|s| s.abs() < 1e-12));
        assert!(c.remainder.iter().all(|r| r.abs() < 1e-12));
    }

    #[test]
    fn ramp_interior_trend_is_exact() {
        let series: Vec<f64> = (0..200).map(|t| t as f64).collect();
        for period in [7usize, 24] {
            let c = decompose(&series, period, DecompositionMethod::Classical).unwrap();
            let half = period / 2;
            for t in half..200 - half {
                assert!(
                    (c.trend[t] - series[t]).abs() < 1e-9,
                    "period {period}, step {t}: {} vs {}",
                    c.trend[t],
                    series[t]
                );
            }
        }
    }

    #[test]
    fn seasonal_sums_to_zero_per_period() {
        let series: Vec<f64> = (0..240)
            .map(|t| 0.3 * t as f64 + (TAU * t as f64 / 24.0).sin() + ((t * 7919) % 13) as f64 * 0.01)
            .collect();
        let c = decompose(&series, 24, DecompositionMethod::Classical).unwrap();
        for start in (0..240 - 24).step_by(24) {
            let sum: f64 = c.seasonal[start..start + 24].iter().sum();
            assert!(sum.abs() < 1e-9, "period sum {sum}");
        }
    }

    #[test]
    fn strength_formula_values() {
        // Var(R) = 0.25, Var(T+R) = 1.0 -> F_T = 0.75 built directly
        assert_eq!(variance_ratio_strength(0.25, 1.0), 0.75);
        assert_eq!(variance_ratio_strength(0.5, 2.0), 0.75);
        // zero remainder, nonconstant component
        assert_eq!(variance_ratio_strength(0.0, 1.0), 1.0);
        // component constant: ratio 1
        assert_eq!(variance_ratio_strength(1.0, 1.0), 0.0);
        // degenerate: nothing left after removing the other components
        assert_eq!(variance_ratio_strength(0.0, 0.0), 0.0);
    }

    #[test]
    fn noiseless_seasonal_strengths() {
        let series = sinusoid(480, 24, 1.0);
        let c = decompose(&series, 24, DecompositionMethod::Classical).unwrap();
        assert!(trend_strength(&c) <= 0.05);
        assert!(seasonality_strength(&c) >= 0.99);
    }

    #[test]
    fn noiseless_ramp_strengths() {
        let series: Vec<f64> = (0..480).map(|t| 0.1 * t as f64).collect();
        let c = decompose(&series, 24, DecompositionMethod::Classical).unwrap();
        assert!(trend_strength(&c) >= 0.99);
        // edge replication leaks a little ramp into the seasonal estimate
        assert!(seasonality_strength(&c) <= 0.1);
    }

    #[test]
    fn decompose_errors() {
        assert!(matches!(
            decompose(&[1.0; 10], 1, DecompositionMethod::Classical),
            Err(CharacterizeError::BadPeriod(1))
        ));
        assert!(matches!(
            decompose(&[1.0; 10], 6, DecompositionMethod::Classical),
            Err(CharacterizeError::SeriesTooShortForPeriod { .. })
        ));
    }

    #[test]
    fn js_zero_for_matching_masses() {
        let p = vec![0.25, 0.25, 0.5];
        assert_eq!(jensen_shannon_bits(&p, &p), 0.0);
    }

    #[test]
    fn js_two_point_mass_far_from_gaussian() {
        // half -1s and half +1s: z = +/-1 for every point
        let window: Vec<f64> = (0..30).map(|i| if i % 2 == 0 { -1.0 } else { 1.0 }).collect();
        let (js, skipped) = gaussian_js(&window, 30, 20).unwrap();
        assert_eq!(skipped, 0);
        assert!(js > 0.3, "JS {js}");
    }

    #[test]
    fn js_constant_window_skipped() {
        let mut series = vec![0.0; 60];
        for (i, v) in series.iter_mut().enumerate().take(30) {
            *v = (i as f64 * 0.7).sin();
        }
        // second window constant
        for v in series.iter_mut().skip(30) {
            *v = 2.0;
        }
        let (_, skipped) = gaussian_js(&series, 30, 20).unwrap();
        assert_eq!(skipped, 1);
    }

    #[test]
    fn js_parameter_errors() {
        assert!(matches!(
            gaussian_js(&[0.0; 100], 4, 20),
            Err(CharacterizeError::WindowTooShort(4))
        ));
        assert!(matches!(
            gaussian_js(&[0.0; 100], 30, 2),
            Err(CharacterizeError::TooFewBins(2))
        ));
        assert!(matches!(
            gaussian_js(&[0.0; 10], 30, 20),
            Err(CharacterizeError::WindowTooLong { .. })
        ));
    }

    #[test]
    fn outliers_all_equal() {
        assert_eq!(outlier_ratios(&[4.0; 90], 30), (0.0, 0.0));
    }

    #[test]
    fn outliers_alternating_unit() {
        let series: Vec<f64> = (0..90).map(|i| if i % 2 == 0 { -1.0 } else { 1.0 }).collect();
        assert_eq!(outlier_ratios(&series, 30), (0.0, 0.0));
    }

    #[test]
    fn outliers_single_spike() {
        // z-scores recomputed by hand: spike dominates the variance
        let mut series = vec![0.0; 999];
        series.extend([100.0]);
        let mut with_noise: Vec<f64> = series
            .iter()
            .enumerate()
            .map(|(i, v)| v + ((i * 2654435761) % 1000) as f64 * 1e-4)
            .collect();
        with_noise[999] = 100.0;
        let (global, _) = outlier_ratios(&with_noise, 30);
        // brute-force oracle
        let mean = population_mean(&with_noise);
        let std = population_var(&with_noise).sqrt();
        let expected = 100.0
            * with_noise
                .iter()
                .filter(|&&x| ((x - mean) / std).abs() > 3.0)
                .count() as f64
            / with_noise.len() as f64;
        assert_eq!(global, expected);
        assert!((global - 0.1).abs() < 1e-9);
    }

    #[test]
    fn dataset_report_averages_variates() {
        // variate 0: strong ramp; variate 1: strong seasonality
        let n = 480;
        let ramp: Vec<f64> = (0..n).map(|t| 0.1 * t as f64).collect();
        let seasonal = sinusoid(n, 24, 1.0);
        let mut values = Array2::zeros((2, n));
        for t in 0..n {
            values[[0, t]] = ramp[t];
            values[[1, t]] = seasonal[t];
        }
        let ds = Dataset::new(
            "two",
            values,
            synthetic_hourly_timestamps(n),
            Freq::Hourly,
            None,
        )
        .unwrap();
        let report =
            characterize_dataset(&ds, 24, 30, 20, DecompositionMethod::Classical).unwrap();

        let ft0 = trend_strength(&decompose(&ramp, 24, DecompositionMethod::Classical).unwrap());
        let ft1 =
            trend_strength(&decompose(&seasonal, 24, DecompositionMethod::Classical).unwrap());
        assert!((report.trend_strength - 0.5 * (ft0 + ft1)).abs() < 1e-12);
        assert!(report.trend_strength > 0.4 && report.trend_strength < 0.6);
        assert!(report.seasonality_strength > 0.4 && report.seasonality_strength < 0.6);
    }

    #[test]
    fn report_errors_carry_variate_index() {
        let ds = Dataset::new(
            "short",
            Array2::zeros((2, 20)),
            synthetic_hourly_timestamps(20),
            Freq::Hourly,
            None,
        )
        .unwrap();
        match characterize_dataset(&ds, 24, 30, 20, DecompositionMethod::Classical) {
            Err(CharacterizeError::Variate { index: 0, .. }) => {}
            other => panic!("expected variate-tagged error, got {other:?}"),
        }
    }

    #[test]
    fn report_serializes_flat() {
        let report = CharacterizationReport {
            trend_strength: 0.9,
            seasonality_strength: 0.1,
            js_divergence: 0.05,
            outlier_global_pct: 0.2,
            outlier_local_pct: 0.3,
            window_len: 30,
            period: 24,
            skipped_windows: 0,
        };
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["trend_strength"], 0.9);
        assert_eq!(json["skipped_windows"], 0);
        assert_eq!(json.as_object().unwrap().len(), 8);
    }
}
