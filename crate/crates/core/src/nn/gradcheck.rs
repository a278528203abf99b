use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::network::{backward, forward_with_masks, mse_loss, sample_dropout_masks};
use super::params::{init_params, LstmConfig, LstmParams};
use crate::error::Result;

/// Denominator floor for relative errors; gradients smaller than this are compared absolutely.
pub const RELATIVE_ERROR_FLOOR: f64 = 1e-6;

/// Batch size used by [`gradient_check`].
pub const CHECK_BATCH: usize = 2;

pub fn relative_error(analytic: f64, numeric: f64) -> f64 {
    (analytic - numeric).abs() / analytic.abs().max(numeric.abs()).max(RELATIVE_ERROR_FLOOR)
}

/// Loss for a fixed batch, targets and dropout masks.
pub fn batch_loss(
    params: &LstmParams,
    config: &LstmConfig,
    inputs: &[f64],
    targets: &[f64],
    masks: Option<&[f64]>,
) -> Result<f64> {
    let (pred, _) = forward_with_masks(params, config, inputs, masks)?;
    mse_loss(&pred, targets)
}

/// Worst relative error between backpropagated and central-difference gradients over
/// every parameter. When dropout is configured, a single mask set is drawn and held
/// fixed for all evaluations.
pub fn gradient_check(config: &LstmConfig, seed: u64, epsilon: f64) -> Result<f64> {
    let mut params = init_params(config, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let unit = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
    let inputs: Vec<f64> =
        (0..CHECK_BATCH * config.lookback * config.input_dim).map(|_| unit.sample(&mut rng)).collect();
    let targets: Vec<f64> = (0..CHECK_BATCH).map(|_| 2.0 * unit.sample(&mut rng)).collect();
    // small nonzero biases exercise the bias paths away from the symmetric point
    for (name, block) in params.blocks_mut() {
        if name.starts_with("b_") || name.ends_with("_b") {
            block.iter_mut().for_each(|b| *b = 0.1 * unit.sample(&mut rng));
        }
    }
    let masks = (config.dropout_rate > 0.0)
        .then(|| sample_dropout_masks(config.dropout_rate, config.hidden_dim, CHECK_BATCH, &mut rng));

    let (_, cache) = forward_with_masks(&params, config, &inputs, masks.as_deref())?;
    let analytic = backward(&params, config, &cache, &targets)?.flatten();

    let mut worst = 0.0f64;
    for (idx, &a) in analytic.iter().enumerate() {
        let orig = *params.scalar_mut(idx);
        *params.scalar_mut(idx) = orig + epsilon;
        let plus = batch_loss(&params, config, &inputs, &targets, masks.as_deref())?;
        *params.scalar_mut(idx) = orig - epsilon;
        let minus = batch_loss(&params, config, &inputs, &targets, masks.as_deref())?;
        *params.scalar_mut(idx) = orig;
        let numeric = (plus - minus) / (2.0 * epsilon);
        worst = worst.max(relative_error(a, numeric));
    }
    Ok(worst)
}
