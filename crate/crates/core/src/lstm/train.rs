use std::ops::Range;

use serde::{Deserialize, Serialize};

use super::adam::{adam_update, AdamState};
use super::cell::{accumulate_gradients, forward_sequence};
use super::params::{init_params, LstmConfig, LstmParams};
use crate::error::{Error, Result};

/// Mean squared error between predictions and targets.
pub fn loss_mse(predictions: &[f64], targets: &[f64]) -> Result<f64> {
    crate::metrics::mse(targets, predictions)
}

/// Per-column min-max scaling to `[0, 1]`. Constant columns map to zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinMaxScaler {
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl MinMaxScaler {
    pub fn fit(rows: &[Vec<f64>]) -> Result<Self> {
        let first = rows.first().ok_or_else(|| Error::InvalidArgument("cannot fit scaler on no rows".into()))?;
        let mut min = first.clone();
        let mut max = first.clone();
        for row in rows {
            if row.len() != min.len() {
                return Err(Error::Dimension("ragged feature rows".into()));
            }
            for (k, &v) in row.iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::NonFinite("feature value".into()));
                }
                min[k] = min[k].min(v);
                max[k] = max[k].max(v);
            }
        }
        Ok(Self { min, max })
    }

    fn span(&self, k: usize) -> f64 {
        let s = self.max[k] - self.min[k];
        if s > 0.0 {
            s
        } else {
            1.0
        }
    }

    pub fn transform(&self, row: &[f64]) -> Vec<f64> {
        row.iter().enumerate().map(|(k, v)| (v - self.min[k]) / self.span(k)).collect()
    }

    pub fn inverse(&self, k: usize, v: f64) -> f64 {
        v * self.span(k) + self.min[k]
    }
}

/// Chronological train/test partition of supervised samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Split {
    pub train: Range<usize>,
    pub test: Range<usize>,
}

/// First `floor(fraction * n)` samples train, the rest test.
pub fn chronological_split(n_samples: usize, fraction: f64) -> Result<Split> {
    let n_train = (fraction * n_samples as f64).floor() as usize;
    if n_train == 0 || n_train >= n_samples {
        return Err(Error::InvalidArgument(format!(
            "{n_samples} samples cannot be split {fraction}/{} with both parts non-empty",
            1.0 - fraction
        )));
    }
    Ok(Split { train: 0..n_train, test: n_train..n_samples })
}

/// A trained network together with the scaling it was trained under.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LstmModel {
    pub config: LstmConfig,
    pub params: LstmParams,
    pub feature_scaler: MinMaxScaler,
    pub target_scaler: MinMaxScaler,
}

impl LstmModel {
    /// Predicts the next target, in original units, from a raw feature window.
    pub fn predict(&self, window: &[Vec<f64>]) -> Result<f64> {
        if window.len() != self.config.window_length {
            return Err(Error::Dimension(format!(
                "window has {} steps, model expects {}",
                window.len(),
                self.config.window_length
            )));
        }
        let scaled: Vec<Vec<f64>> = window.iter().map(|r| self.feature_scaler.transform(r)).collect();
        let y = forward_sequence(&self.params, &scaled)?.prediction;
        Ok(self.target_scaler.inverse(0, y))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EpochLoss {
    pub epoch: usize,
    /// Mean of the batch losses seen during the epoch (scaled units).
    pub train_loss: f64,
    /// Held-out loss after the epoch's updates (scaled units).
    pub val_loss: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainOutcome {
    pub model: LstmModel,
    pub loss_trace: Vec<EpochLoss>,
    pub split: Split,
    /// Row index (into the input series) of each test sample's target.
    pub test_rows: Vec<usize>,
    pub test_targets: Vec<f64>,
    pub test_predictions: Vec<f64>,
}

impl TrainOutcome {
    pub fn final_train_loss(&self) -> f64 {
        self.loss_trace.last().map_or(f64::NAN, |e| e.train_loss)
    }

    pub fn final_val_loss(&self) -> f64 {
        self.loss_trace.last().map_or(f64::NAN, |e| e.val_loss)
    }
}

/// Smallest series length `train` accepts for a window length.
pub fn minimum_series_length(window_length: usize) -> usize {
    window_length + 2
}

/// Trains on sliding windows of `features` predicting the next row's
/// `target`.
///
/// Sample `s` reads feature rows `s .. s + window` and predicts
/// `targets[s + window]`. Samples are split chronologically; scalers are
/// fitted on the rows touched by training samples only.
pub fn train(features: &[Vec<f64>], targets: &[f64], config: &LstmConfig) -> Result<TrainOutcome> {
    config.validate()?;
    let w = config.window_length;
    if features.len() != targets.len() {
        return Err(Error::Dimension(format!("{} feature rows, {} targets", features.len(), targets.len())));
    }
    let min_len = minimum_series_length(w);
    if features.len() < min_len {
        return Err(Error::InvalidArgument(format!(
            "series has {} rows, need at least {min_len} for window length {w}",
            features.len()
        )));
    }
    if let Some(r) = features.iter().find(|r| r.len() != config.input_size) {
        return Err(Error::Dimension(format!(
            "feature row has {} values, input_size is {}",
            r.len(),
            config.input_size
        )));
    }

    let n_samples = features.len() - w;
    let split = chronological_split(n_samples, config.train_fraction)?;
    let fit_rows = split.train.end + w;
    let feature_scaler = MinMaxScaler::fit(&features[..fit_rows])?;
    let target_rows: Vec<Vec<f64>> = targets[..fit_rows].iter().map(|&t| vec![t]).collect();
    let target_scaler = MinMaxScaler::fit(&target_rows)?;

    let scaled: Vec<Vec<f64>> = features.iter().map(|r| feature_scaler.transform(r)).collect();
    let scaled_targets: Vec<f64> = targets.iter().map(|&t| target_scaler.transform(&[t])[0]).collect();
    let windows: Vec<&[Vec<f64>]> = (0..n_samples).map(|s| &scaled[s..s + w]).collect();
    let sample_target = |s: usize| scaled_targets[s + w];

    let mut params: LstmParams = init_params(config)?;
    let mut adam = AdamState::new(params.values.len());
    let batch = config.batch_size.unwrap_or(split.train.len()).min(split.train.len());
    let mut loss_trace = Vec::with_capacity(config.epochs);

    for epoch in 1..=config.epochs {
        let mut loss_sum = 0.0;
        for chunk_start in split.train.clone().step_by(batch) {
            let chunk = chunk_start..(chunk_start + batch).min(split.train.end);
            let size = chunk.len();
            let mut grads = LstmParams::zeros(params.layout);
            let mut batch_loss = 0.0;
            for s in chunk {
                let cache = forward_sequence(&params, windows[s])?;
                let resid = cache.prediction - sample_target(s);
                batch_loss += resid * resid;
                accumulate_gradients(&params, &cache, 2.0 * resid / size as f64, &mut grads);
            }
            loss_sum += batch_loss;
            adam_update(&mut params, &grads, &mut adam, config)?;
        }
        let train_loss = loss_sum / split.train.len() as f64;
        let mut val_sum = 0.0;
        for s in split.test.clone() {
            let r = forward_sequence(&params, windows[s])?.prediction - sample_target(s);
            val_sum += r * r;
        }
        let val_loss = val_sum / split.test.len() as f64;
        if !train_loss.is_finite() || !val_loss.is_finite() || !params.is_finite() {
            return Err(Error::NonFinite(format!("training diverged at epoch {epoch}")));
        }
        loss_trace.push(EpochLoss { epoch, train_loss, val_loss });
    }

    let model = LstmModel { config: config.clone(), params, feature_scaler, target_scaler };
    let test_rows: Vec<usize> = split.test.clone().map(|s| s + w).collect();
    let test_targets: Vec<f64> = test_rows.iter().map(|&r| targets[r]).collect();
    let test_predictions =
        split.test.clone().map(|s| model.predict(&features[s..s + w])).collect::<Result<Vec<f64>>>()?;
    Ok(TrainOutcome { model, loss_trace, split, test_rows, test_targets, test_predictions })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn split_rule() {
        let s = chronological_split(28, 0.8).unwrap();
        assert_eq!(s.train, 0..22);
        assert_eq!(s.test, 22..28);
        assert!(chronological_split(1, 0.8).is_err());
        assert_eq!(chronological_split(2, 0.8).unwrap().test, 1..2);
    }

    #[test]
    fn loss_mse_cases() {
        assert_eq!(loss_mse(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(loss_mse(&[0.0, 0.0], &[1.0, 3.0]).unwrap(), 5.0);
        let base = loss_mse(&[0.5, -1.0], &[0.0, 0.0]).unwrap();
        let scaled = loss_mse(&[1.5, -3.0], &[0.0, 0.0]).unwrap();
        assert!((scaled - 9.0 * base).abs() < 1e-12);
        assert!(loss_mse(&[1.0], &[1.0, 2.0]).is_err());
    }

    #[test]
    fn scaler_round_trip() {
        let s = MinMaxScaler::fit(&[vec![1.0, 5.0], vec![3.0, 5.0]]).unwrap();
        assert_eq!(s.transform(&[2.0, 5.0]), vec![0.5, 0.0]);
        assert_eq!(s.inverse(0, 0.5), 2.0);
    }

    #[test]
    fn too_short_series() {
        let cfg = LstmConfig { window_length: 4, ..Default::default() };
        let f = vec![vec![0.0]; 5];
        match train(&f, &[0.0; 5], &cfg) {
            Err(Error::InvalidArgument(m)) => assert!(m.contains("at least 6"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_target_is_learned() {
        let cfg = LstmConfig { hidden_size: 4, epochs: 300, learning_rate: 0.01, seed: 1, ..Default::default() };
        let xs: Vec<Vec<f64>> = (0..20).map(|i| vec![(i % 5) as f64]).collect();
        let ys = vec![0.6; 20];
        let out = train(&xs, &ys, &cfg).unwrap();
        assert!(out.final_train_loss() < 1e-3, "{}", out.final_train_loss());
    }

    #[test]
    fn split_is_disjoint_and_chronological() {
        let cfg = LstmConfig { hidden_size: 2, epochs: 2, ..Default::default() };
        let xs: Vec<Vec<f64>> = (0..32).map(|i| vec![i as f64]).collect();
        let ys: Vec<f64> = (0..32).map(|i| i as f64).collect();
        let out = train(&xs, &ys, &cfg).unwrap();
        assert_eq!(out.split.train, 0..22);
        assert_eq!(out.split.test, 22..28);
        assert_eq!(out.test_rows, (26..32).collect::<Vec<_>>());
        assert_eq!(out.test_targets, (26..32).map(|i| i as f64).collect::<Vec<_>>());
        assert_eq!(out.loss_trace.len(), 2);
    }
}
