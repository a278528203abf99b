use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Shape of the network: LSTM(hidden) → Dropout → Dense(dense, sigmoid) → Dense(1, linear).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LstmConfig {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub lookback: usize,
    pub dense_dim: usize,
    pub dropout_rate: f64,
}

impl Default for LstmConfig {
    /// Six inputs, 50 hidden units, a 64-unit dense layer, 40-step lookback, dropout 0.2.
    fn default() -> Self {
        LstmConfig { input_dim: 6, hidden_dim: 50, lookback: 40, dense_dim: 64, dropout_rate: 0.2 }
    }
}

impl LstmConfig {
    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.hidden_dim == 0 || self.lookback == 0 || self.dense_dim == 0 {
            return Err(Error::Config(format!("all LSTM dimensions must be positive: {self:?}")));
        }
        if !(0.0..1.0).contains(&self.dropout_rate) {
            return Err(Error::Config(format!("dropout rate must lie in [0, 1), got {}", self.dropout_rate)));
        }
        Ok(())
    }

    /// Width of the concatenated `[h_prev, x_t]` gate input.
    pub fn gate_input_dim(&self) -> usize {
        self.hidden_dim + self.input_dim
    }
}

/// Scalars in the recurrent block alone: four gates, each with weights and bias.
pub fn lstm_block_param_count(config: &LstmConfig) -> usize {
    4 * (config.gate_input_dim() * config.hidden_dim + config.hidden_dim)
}

/// Total trainable scalars.
pub fn param_count(config: &LstmConfig) -> usize {
    let (h, d) = (config.hidden_dim, config.dense_dim);
    lstm_block_param_count(config) + (h * d + d) + (d + 1)
}

pub const BLOCK_NAMES: [&str; 12] =
    ["w_f", "w_i", "w_c", "w_o", "b_f", "b_i", "b_c", "b_o", "dense1_w", "dense1_b", "dense2_w", "dense2_b"];

/// All trainable tensors. Gate matrices are `hidden × (hidden + input)` row-major with
/// columns ordered `[h_prev, x_t]`; `dense1_w` is `dense × hidden`; `dense2_w` has `dense` entries.
///
/// Gradients use the same type.
#[derive(Debug, Clone, PartialEq)]
pub struct LstmParams {
    pub input_dim: usize,
    pub hidden_dim: usize,
    pub dense_dim: usize,
    pub w_f: Vec<f64>,
    pub w_i: Vec<f64>,
    pub w_c: Vec<f64>,
    pub w_o: Vec<f64>,
    pub b_f: Vec<f64>,
    pub b_i: Vec<f64>,
    pub b_c: Vec<f64>,
    pub b_o: Vec<f64>,
    pub dense1_w: Vec<f64>,
    pub dense1_b: Vec<f64>,
    pub dense2_w: Vec<f64>,
    pub dense2_b: Vec<f64>,
}

impl LstmParams {
    pub fn zeros(config: &LstmConfig) -> Self {
        let (h, z, d) = (config.hidden_dim, config.gate_input_dim(), config.dense_dim);
        LstmParams {
            input_dim: config.input_dim,
            hidden_dim: h,
            dense_dim: d,
            w_f: vec![0.0; h * z],
            w_i: vec![0.0; h * z],
            w_c: vec![0.0; h * z],
            w_o: vec![0.0; h * z],
            b_f: vec![0.0; h],
            b_i: vec![0.0; h],
            b_c: vec![0.0; h],
            b_o: vec![0.0; h],
            dense1_w: vec![0.0; d * h],
            dense1_b: vec![0.0; d],
            dense2_w: vec![0.0; d],
            dense2_b: vec![0.0; 1],
        }
    }

    pub fn zeros_like(&self) -> Self {
        LstmParams::zeros(&LstmConfig {
            input_dim: self.input_dim,
            hidden_dim: self.hidden_dim,
            lookback: 1,
            dense_dim: self.dense_dim,
            dropout_rate: 0.0,
        })
    }

    /// `(rows, cols)` of each block in [`BLOCK_NAMES`] order.
    pub fn shapes(&self) -> [(usize, usize); 12] {
        let (h, z, d) = (self.hidden_dim, self.hidden_dim + self.input_dim, self.dense_dim);
        [(h, z), (h, z), (h, z), (h, z), (h, 1), (h, 1), (h, 1), (h, 1), (d, h), (d, 1), (1, d), (1, 1)]
    }

    pub fn blocks(&self) -> [(&'static str, &[f64]); 12] {
        [
            ("w_f", &self.w_f),
            ("w_i", &self.w_i),
            ("w_c", &self.w_c),
            ("w_o", &self.w_o),
            ("b_f", &self.b_f),
            ("b_i", &self.b_i),
            ("b_c", &self.b_c),
            ("b_o", &self.b_o),
            ("dense1_w", &self.dense1_w),
            ("dense1_b", &self.dense1_b),
            ("dense2_w", &self.dense2_w),
            ("dense2_b", &self.dense2_b),
        ]
    }

    pub fn blocks_mut(&mut self) -> [(&'static str, &mut Vec<f64>); 12] {
        [
            ("w_f", &mut self.w_f),
            ("w_i", &mut self.w_i),
            ("w_c", &mut self.w_c),
            ("w_o", &mut self.w_o),
            ("b_f", &mut self.b_f),
            ("b_i", &mut self.b_i),
            ("b_c", &mut self.b_c),
            ("b_o", &mut self.b_o),
            ("dense1_w", &mut self.dense1_w),
            ("dense1_b", &mut self.dense1_b),
            ("dense2_w", &mut self.dense2_w),
            ("dense2_b", &mut self.dense2_b),
        ]
    }

    /// Number of scalars actually allocated.
    pub fn scalar_count(&self) -> usize {
        self.blocks().iter().map(|(_, b)| b.len()).sum()
    }

    /// Mutable access to the `index`-th scalar in block order.
    pub fn scalar_mut(&mut self, mut index: usize) -> &mut f64 {
        for (_, block) in self.blocks_mut() {
            if index < block.len() {
                return &mut block[index];
            }
            index -= block.len();
        }
        panic!("parameter index out of range");
    }

    pub fn flatten(&self) -> Vec<f64> {
        self.blocks().iter().flat_map(|(_, b)| b.iter().copied()).collect()
    }

    pub fn matches(&self, config: &LstmConfig) -> bool {
        self.input_dim == config.input_dim && self.hidden_dim == config.hidden_dim && self.dense_dim == config.dense_dim
    }
}

/// Half-width of the Glorot uniform range.
pub fn glorot_limit(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

/// Glorot-uniform weights, zero biases. Deterministic in `seed`.
pub fn init_params(config: &LstmConfig, seed: u64) -> Result<LstmParams> {
    config.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = LstmParams::zeros(config);
    let (h, z, d) = (config.hidden_dim, config.gate_input_dim(), config.dense_dim);
    let mut fill = |block: &mut [f64], fan_in: usize, fan_out: usize| {
        let limit = glorot_limit(fan_in, fan_out);
        let dist = Uniform::new_inclusive(-limit, limit).expect("finite limit");
        block.iter_mut().for_each(|w| *w = dist.sample(&mut rng));
    };
    fill(&mut p.w_f, z, h);
    fill(&mut p.w_i, z, h);
    fill(&mut p.w_c, z, h);
    fill(&mut p.w_o, z, h);
    fill(&mut p.dense1_w, h, d);
    fill(&mut p.dense2_w, d, 1);
    Ok(p)
}
