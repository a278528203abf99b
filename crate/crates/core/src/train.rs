//! Mini-batch training loop and forecast error metrics.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::data::SupervisedTensors;
use crate::error::{Error, Result};
use crate::nn::{
    adam_step, backward, forward, forward_with_masks, mse_loss, AdamConfig, AdamState, LstmConfig, LstmParams, Mode,
};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub epochs: usize,
    pub batch_size: usize,
    /// Fraction of samples, taken from the chronological tail, held out for validation.
    pub validation_fraction: f64,
    pub seed: u64,
    pub shuffle: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 0.0005,
            epochs: 50,
            batch_size: 25,
            validation_fraction: 0.10,
            seed: 0,
            shuffle: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.batch_size == 0 {
            return Err(Error::Config("batch_size must be at least 1".into()));
        }
        if !(0.0..=0.5).contains(&self.validation_fraction) {
            return Err(Error::Config(format!(
                "validation_fraction must lie in [0, 0.5], got {}",
                self.validation_fraction
            )));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::Config(format!("learning_rate must be positive, got {}", self.learning_rate)));
        }
        Ok(())
    }

    /// `(training, validation)` sample counts for `n` samples.
    pub fn partition(&self, n: usize) -> (usize, usize) {
        let val = (n as f64 * self.validation_fraction).floor() as usize;
        (n - val, val)
    }
}

/// Per-epoch losses. `val_loss` is NaN when there is no validation set.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrainHistory {
    pub train_loss: Vec<f64>,
    pub val_loss: Vec<f64>,
}

impl TrainHistory {
    pub fn epochs(&self) -> usize {
        self.train_loss.len()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("epoch,train_loss,val_loss\n");
        for (e, (t, v)) in self.train_loss.iter().zip(&self.val_loss).enumerate() {
            out.push_str(&format!("{},{t},{v}\n", e + 1));
        }
        out
    }
}

fn check_tensors(config: &LstmConfig, tensors: &SupervisedTensors) -> Result<()> {
    if tensors.features != config.input_dim || tensors.lookback != config.lookback {
        return Err(Error::Shape(format!(
            "tensors are [{}×{}] per sample but the model expects [{}×{}]",
            tensors.lookback, tensors.features, config.lookback, config.input_dim
        )));
    }
    Ok(())
}

/// Trains with Adam on chronological (or seeded shuffled) mini-batches. The validation
/// tail never contributes to a gradient.
pub fn train(
    params: &LstmParams,
    config: &LstmConfig,
    tensors: &SupervisedTensors,
    tcfg: &TrainConfig,
) -> Result<(LstmParams, TrainHistory)> {
    config.validate()?;
    tcfg.validate()?;
    check_tensors(config, tensors)?;
    if !params.matches(config) {
        return Err(Error::Shape("parameters do not match the configuration".into()));
    }
    let n = tensors.len();
    if n <= tcfg.batch_size {
        return Err(Error::InsufficientData {
            what: "train",
            message: format!("{n} samples is not more than the batch size {}", tcfg.batch_size),
        });
    }
    let (n_train, n_val) = tcfg.partition(n);
    let mut params = params.clone();
    let mut history = TrainHistory::default();
    if tcfg.epochs == 0 {
        return Ok((params, history));
    }

    let stride = tensors.sample_len();
    let adam = AdamConfig { learning_rate: tcfg.learning_rate, ..AdamConfig::default() };
    let mut state = AdamState::new(adam, &params);
    let mut dropout_rng = ChaCha8Rng::seed_from_u64(tcfg.seed);
    let mut order_rng = ChaCha8Rng::seed_from_u64(tcfg.seed.wrapping_add(0x5851_f42d_4c95_7f2d));
    let mut order: Vec<usize> = (0..n_train).collect();
    let val_inputs = tensors.input_range(n_train, n);
    let val_targets = &tensors.targets[n_train..];

    let mut batch_inputs = Vec::with_capacity(tcfg.batch_size * stride);
    let mut batch_targets = Vec::with_capacity(tcfg.batch_size);
    for epoch in 0..tcfg.epochs {
        if tcfg.shuffle {
            order.shuffle(&mut order_rng);
        }
        let mut weighted = 0.0;
        for (b, chunk) in order.chunks(tcfg.batch_size).enumerate() {
            batch_inputs.clear();
            batch_targets.clear();
            for &i in chunk {
                batch_inputs.extend_from_slice(tensors.sample(i));
                batch_targets.push(tensors.targets[i]);
            }
            let (pred, cache) = forward(&params, config, &batch_inputs, Mode::Train, &mut dropout_rng)?;
            let loss = mse_loss(&pred, &batch_targets)?;
            if !loss.is_finite() {
                return Err(Error::NanLoss { epoch: epoch + 1, batch: b + 1 });
            }
            let grads = backward(&params, config, &cache, &batch_targets)?;
            adam_step(&mut params, &grads, &mut state).map_err(|e| match e {
                Error::NonFiniteGradient(_) => Error::NanLoss { epoch: epoch + 1, batch: b + 1 },
                other => other,
            })?;
            weighted += loss * chunk.len() as f64;
        }
        history.train_loss.push(weighted / n_train as f64);
        let val = if n_val > 0 {
            let (pred, _) = forward_with_masks(&params, config, val_inputs, None)?;
            mse_loss(&pred, val_targets)?
        } else {
            f64::NAN
        };
        history.val_loss.push(val);
    }
    Ok((params, history))
}

/// Eval-mode forward pass over `[B × L × F]` inputs.
pub fn predict(params: &LstmParams, config: &LstmConfig, inputs: &[f64]) -> Result<Vec<f64>> {
    forward_with_masks(params, config, inputs, None).map(|(p, _)| p)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scale {
    /// Inverse-transformed prices.
    #[default]
    Original,
    /// Min-max scaled units.
    Normalized,
}

impl std::fmt::Display for Scale {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Scale::Original => "original",
            Scale::Normalized => "normalized",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub scale: Scale,
    pub mse: f64,
    pub rmse: f64,
    pub mae: f64,
    /// Percent.
    pub mape: f64,
}

impl MetricsReport {
    pub fn in_scale(mut self, scale: Scale) -> Self {
        self.scale = scale;
        self
    }

    pub fn values(&self) -> [f64; 4] {
        [self.mse, self.rmse, self.mae, self.mape]
    }

    pub fn to_csv(&self) -> String {
        format!("scale,mse,rmse,mae,mape\n{},{},{},{},{}\n", self.scale, self.mse, self.rmse, self.mae, self.mape)
    }
}

/// MSE, RMSE, MAE and per-point MAPE.
pub fn evaluate(true_values: &[f64], predictions: &[f64]) -> Result<MetricsReport> {
    if true_values.len() != predictions.len() {
        return Err(Error::LengthMismatch { left: true_values.len(), right: predictions.len() });
    }
    if true_values.is_empty() {
        return Err(Error::InsufficientData { what: "evaluate", message: "no values".into() });
    }
    if let Some(i) = true_values.iter().position(|t| *t == 0.0) {
        return Err(Error::ZeroTrueValue(i));
    }
    let n = true_values.len() as f64;
    let (mut se, mut ae, mut ape) = (0.0, 0.0, 0.0);
    for (t, p) in true_values.iter().zip(predictions) {
        let e = t - p;
        se += e * e;
        ae += e.abs();
        ape += (e / t).abs();
    }
    let mse = se / n;
    Ok(MetricsReport { scale: Scale::Original, mse, rmse: mse.sqrt(), mae: ae / n, mape: 100.0 * ape / n })
}
