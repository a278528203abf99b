//! Fixtures shared by the criterion benches in `benches/`.

use oilcast_core::nn::LstmConfig;
use oilcast_core::synthetic::{ar1, sine};

/// The full-size network on the six-feature input.
pub fn paper_config() -> LstmConfig {
    LstmConfig { input_dim: 6, ..LstmConfig::default() }
}

/// One mini-batch of `[batch × lookback × features]` inputs in [0, 1] and matching targets.
pub fn batch(config: &LstmConfig, batch: usize) -> (Vec<f64>, Vec<f64>) {
    let n = batch * config.lookback * config.input_dim;
    let inputs = sine(n, 37.0, 0.1).into_iter().map(|v| 0.5 + 0.5 * v).collect();
    let targets = sine(batch, 11.0, 0.7).into_iter().map(|v| 0.5 + 0.5 * v).collect();
    (inputs, targets)
}

/// A pair of correlated series for the correlation kernels.
pub fn correlated_pair(n: usize) -> (Vec<f64>, Vec<f64>) {
    let a = ar1(n, 0.95, 1);
    let noise = ar1(n, 0.5, 2);
    let b = a.iter().zip(&noise).map(|(x, e)| 0.7 * x + e).collect();
    (a, b)
}
