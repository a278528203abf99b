use serde::{Deserialize, Serialize};

use super::params::LstmParams;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        AdamConfig { learning_rate: 0.0005, beta1: 0.9, beta2: 0.999, epsilon: 1e-8 }
    }
}

/// First/second moment accumulators, one vector per parameter block.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState {
    pub config: AdamConfig,
    pub t: u64,
    m: Vec<Vec<f64>>,
    v: Vec<Vec<f64>>,
}

impl AdamState {
    pub fn new(config: AdamConfig, params: &LstmParams) -> Self {
        let sizes: Vec<usize> = params.blocks().iter().map(|(_, b)| b.len()).collect();
        AdamState::with_block_sizes(config, &sizes)
    }

    pub fn with_block_sizes(config: AdamConfig, sizes: &[usize]) -> Self {
        AdamState {
            config,
            t: 0,
            m: sizes.iter().map(|&n| vec![0.0; n]).collect(),
            v: sizes.iter().map(|&n| vec![0.0; n]).collect(),
        }
    }

    pub fn first_moment(&self) -> &[Vec<f64>] {
        &self.m
    }

    pub fn second_moment(&self) -> &[Vec<f64>] {
        &self.v
    }

    /// One bias-corrected update over named blocks. Gradients are checked for
    /// finiteness before anything is modified.
    pub fn step_blocks(
        &mut self,
        params: &mut [(&'static str, &mut Vec<f64>)],
        grads: &[(&'static str, &[f64])],
    ) -> Result<()> {
        if params.len() != self.m.len() || grads.len() != self.m.len() {
            return Err(Error::Shape(format!("Adam state has {} blocks, got {}", self.m.len(), params.len())));
        }
        for ((name, p), ((_, g), m)) in params.iter().zip(grads.iter().zip(&self.m)) {
            if p.len() != g.len() || g.len() != m.len() {
                return Err(Error::Shape(format!("block `{name}` has mismatched lengths")));
            }
            if g.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFiniteGradient(name));
            }
        }
        self.t += 1;
        let AdamConfig { learning_rate, beta1, beta2, epsilon } = self.config;
        let bc1 = 1.0 - beta1.powi(self.t as i32);
        let bc2 = 1.0 - beta2.powi(self.t as i32);
        for (((_, p), (_, g)), (m, v)) in params.iter_mut().zip(grads).zip(self.m.iter_mut().zip(self.v.iter_mut())) {
            for k in 0..g.len() {
                m[k] = beta1 * m[k] + (1.0 - beta1) * g[k];
                v[k] = beta2 * v[k] + (1.0 - beta2) * g[k] * g[k];
                let m_hat = m[k] / bc1;
                let v_hat = v[k] / bc2;
                p[k] -= learning_rate * m_hat / (v_hat.sqrt() + epsilon);
            }
        }
        Ok(())
    }
}

pub fn adam_step(params: &mut LstmParams, grads: &LstmParams, state: &mut AdamState) -> Result<()> {
    state.step_blocks(&mut params.blocks_mut(), &grads.blocks())
}
