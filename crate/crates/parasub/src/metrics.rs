//! Recovery-quality metrics and the empirical convergence-rate fitter.

use ndarray::Array2;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("shapes differ: {0:?} vs {1:?}")]
    ShapeMismatch((usize, usize), (usize, usize)),
    #[error("mask selects no entries")]
    EmptyMask,
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("k must be at least 1")]
    BadNeighborCount,
    #[error("rate fit needs at least {needed} entries, got {got}")]
    TooShort { got: usize, needed: usize },
    #[error("rate fit needs positive entries")]
    NonPositive,
    #[error("feature dimensions differ: {0} vs {1}")]
    FeatureMismatch(usize, usize),
}

/// Masked root mean squared error
/// `sqrt( sum mask_ij (pred_ij - truth_ij)^2 / sum mask_ij )`.
pub fn rmse(pred: &Array2<f64>, truth: &Array2<f64>, mask: &Array2<f64>) -> Result<f64, MetricsError> {
    if pred.dim() != truth.dim() {
        return Err(MetricsError::ShapeMismatch(pred.dim(), truth.dim()));
    }
    if mask.dim() != pred.dim() {
        return Err(MetricsError::ShapeMismatch(mask.dim(), pred.dim()));
    }
    let mut num = 0.0;
    let mut count = 0.0;
    for ((i, j), &m) in mask.indexed_iter() {
        if m != 0.0 {
            let e = pred[[i, j]] - truth[[i, j]];
            num += e * e;
            count += 1.0;
        }
    }
    if count == 0.0 {
        return Err(MetricsError::EmptyMask);
    }
    Ok((num / count).sqrt())
}

/// Ceiling applied to PSNR/SNR when the error power underflows; keeps the
/// values finite and CSV-friendly.
pub const DB_CAP: f64 = 99.0;

/// Peak and plain signal-to-noise ratios in decibels:
/// `psnr = 10 log10(max_value^2 / MSE)` and
/// `snr = 10 log10(sum original^2 / sum (recon - original)^2)`,
/// both capped at 99 dB when the error power drops below 1e-12.
pub fn psnr_snr(
    recon: &Array2<f64>,
    original: &Array2<f64>,
    max_value: f64,
) -> Result<(f64, f64), MetricsError> {
    if recon.dim() != original.dim() {
        return Err(MetricsError::ShapeMismatch(recon.dim(), original.dim()));
    }
    let n = recon.len() as f64;
    let mut err_power = 0.0;
    let mut signal_power = 0.0;
    for (r, o) in recon.iter().zip(original.iter()) {
        let e = r - o;
        err_power += e * e;
        signal_power += o * o;
    }
    let mse = err_power / n;
    let psnr = if mse < 1e-12 {
        DB_CAP
    } else {
        (10.0 * (max_value * max_value / mse).log10()).min(DB_CAP)
    };
    let snr = if err_power < 1e-12 {
        DB_CAP
    } else {
        (10.0 * (signal_power / err_power).log10()).min(DB_CAP)
    };
    Ok((psnr, snr))
}

/// K-nearest-neighbor classification accuracy with Euclidean distances.
/// Distance ties prefer the lower training index; vote ties prefer the
/// smaller label.
pub fn knn_accuracy(
    train_features: &[Vec<f64>],
    train_labels: &[usize],
    test_features: &[Vec<f64>],
    test_labels: &[usize],
    k: usize,
) -> Result<f64, MetricsError> {
    if k == 0 {
        return Err(MetricsError::BadNeighborCount);
    }
    if train_features.is_empty() {
        return Err(MetricsError::EmptyTrainingSet);
    }
    if train_features.len() != train_labels.len() {
        return Err(MetricsError::FeatureMismatch(train_features.len(), train_labels.len()));
    }
    let dim = train_features[0].len();
    let mut correct = 0usize;
    for (features, expected) in test_features.iter().zip(test_labels) {
        if features.len() != dim {
            return Err(MetricsError::FeatureMismatch(features.len(), dim));
        }
        let mut scored: Vec<(f64, usize, usize)> = train_features
            .iter()
            .enumerate()
            .map(|(idx, t)| {
                let d2: f64 =
                    t.iter().zip(features).map(|(a, b)| (a - b) * (a - b)).sum();
                (d2, idx, train_labels[idx])
            })
            .collect();
        scored.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut votes = std::collections::BTreeMap::new();
        for &(_, _, label) in scored.iter().take(k.min(scored.len())) {
            *votes.entry(label).or_insert(0usize) += 1;
        }
        // BTreeMap iterates labels ascending, so ties go to the smaller one
        let predicted = votes
            .iter()
            .max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0)))
            .map(|(label, _)| *label)
            .expect("votes nonempty");
        if predicted == *expected {
            correct += 1;
        }
    }
    Ok(correct as f64 / test_features.len().max(1) as f64)
}

/// Classification of an observed residual sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateClass {
    /// The sequence hits (numerical) zero.
    Finite,
    /// `s_k ~ C rate^k` with `rate` in (0, 1).
    Geometric { rate: f64 },
    /// `s_k ~ C k^exponent` with a negative exponent.
    Sublinear { exponent: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RateFitResult {
    pub class: RateClass,
    /// 1 - R^2 of the winning log fit (0 for the finite class).
    pub fit_residual: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct RateFitOptions {
    /// Leading fraction of the sequence dropped as transient.
    pub transient_fraction: f64,
    /// R^2 above which a log fit counts as linear.
    pub r_squared_threshold: f64,
}

impl Default for RateFitOptions {
    fn default() -> Self {
        RateFitOptions { transient_fraction: 0.1, r_squared_threshold: 0.99 }
    }
}

/// Fits the decay class of a positive sequence with the default options.
pub fn rate_fit(sequence: &[f64]) -> Result<RateFitResult, MetricsError> {
    rate_fit_with(sequence, RateFitOptions::default())
}

/// Fits the decay class of a positive sequence: geometric when
/// `log s_k` is linear in `k`, sublinear when it is linear in `log k`,
/// finite when the sequence reaches zero (entries at or below 1e-15
/// truncate it). When neither fit is clean the better of the two is
/// reported with its residual.
pub fn rate_fit_with(
    sequence: &[f64],
    options: RateFitOptions,
) -> Result<RateFitResult, MetricsError> {
    if sequence.len() < 20 {
        return Err(MetricsError::TooShort { got: sequence.len(), needed: 20 });
    }
    if sequence.iter().any(|&s| s < 0.0 || !s.is_finite()) {
        return Err(MetricsError::NonPositive);
    }
    if let Some(_zero) = sequence.iter().position(|&s| s <= 1e-15) {
        return Ok(RateFitResult { class: RateClass::Finite, fit_residual: 0.0 });
    }

    let skip = ((sequence.len() as f64) * options.transient_fraction).floor() as usize;
    let tail = &sequence[skip..];
    let logs: Vec<f64> = tail.iter().map(|s| s.ln()).collect();
    let ks: Vec<f64> = (skip..sequence.len()).map(|k| k as f64).collect();
    let log_ks: Vec<f64> = ks.iter().map(|k| (k + 1.0).ln()).collect();

    let (slope_geo, r2_geo) = least_squares(&ks, &logs);
    let (slope_sub, r2_sub) = least_squares(&log_ks, &logs);
    let rate = slope_geo.exp();

    let geo_ok = r2_geo >= options.r_squared_threshold && rate > 0.0 && rate < 1.0;
    let sub_ok = r2_sub >= options.r_squared_threshold && slope_sub < 0.0;

    let pick_geo = match (geo_ok, sub_ok) {
        (true, true) => r2_geo >= r2_sub,
        (true, false) => true,
        (false, true) => false,
        // neither is clean: report the better fit, with preference for a
        // class whose parameter is at least in range
        (false, false) => {
            let geo_valid = rate > 0.0 && rate < 1.0;
            let sub_valid = slope_sub < 0.0;
            match (geo_valid, sub_valid) {
                (true, false) => true,
                (false, true) => false,
                _ => r2_geo >= r2_sub,
            }
        }
    };

    Ok(if pick_geo {
        RateFitResult { class: RateClass::Geometric { rate }, fit_residual: 1.0 - r2_geo }
    } else {
        RateFitResult {
            class: RateClass::Sublinear { exponent: slope_sub },
            fit_residual: 1.0 - r2_sub,
        }
    })
}

/// Ordinary least squares of `y` on `x`; returns `(slope, R^2)`.
fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean_x = x.iter().sum::<f64>() / n;
    let mean_y = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mean_x) * (v - mean_x)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mean_x) * (b - mean_y)).sum();
    let syy: f64 = y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return (0.0, if syy == 0.0 { 1.0 } else { 0.0 });
    }
    let slope = sxy / sxx;
    let r2 = (sxy * sxy) / (sxx * syy);
    (slope, r2)
}
