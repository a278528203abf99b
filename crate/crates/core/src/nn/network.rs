use rand::Rng;

use super::params::{LstmConfig, LstmParams};
use crate::error::{Error, Result};

#[inline]
pub fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Train,
    Eval,
}

/// Activations of one LSTM step.
#[derive(Debug, Clone, PartialEq)]
pub struct GateCache {
    /// Gate input `[h_prev, x_t]`.
    pub z: Vec<f64>,
    pub forget: Vec<f64>,
    pub input: Vec<f64>,
    pub candidate: Vec<f64>,
    pub output: Vec<f64>,
    pub c_prev: Vec<f64>,
    pub c: Vec<f64>,
    pub tanh_c: Vec<f64>,
}

/// Everything backpropagation needs for one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleCache {
    pub steps: Vec<GateCache>,
    /// Inverted-dropout multipliers applied to the final hidden state (all ones in eval).
    pub mask: Vec<f64>,
    pub dropped: Vec<f64>,
    /// Sigmoid outputs of the first dense layer.
    pub dense_act: Vec<f64>,
    pub prediction: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardCache {
    pub samples: Vec<SampleCache>,
    pub lookback: usize,
}

fn gate_preactivation(w: &[f64], b: &[f64], z: &[f64], out: &mut [f64]) {
    let zl = z.len();
    for (r, o) in out.iter_mut().enumerate() {
        let row = &w[r * zl..(r + 1) * zl];
        *o = b[r] + row.iter().zip(z).map(|(a, x)| a * x).sum::<f64>();
    }
}

fn step(params: &LstmParams, x: &[f64], h_prev: &[f64], c_prev: &[f64]) -> GateCache {
    let h = params.hidden_dim;
    let mut z = Vec::with_capacity(h + x.len());
    z.extend_from_slice(h_prev);
    z.extend_from_slice(x);
    let mut forget = vec![0.0; h];
    let mut input = vec![0.0; h];
    let mut candidate = vec![0.0; h];
    let mut output = vec![0.0; h];
    gate_preactivation(&params.w_f, &params.b_f, &z, &mut forget);
    gate_preactivation(&params.w_i, &params.b_i, &z, &mut input);
    gate_preactivation(&params.w_c, &params.b_c, &z, &mut candidate);
    gate_preactivation(&params.w_o, &params.b_o, &z, &mut output);
    let mut c = vec![0.0; h];
    let mut tanh_c = vec![0.0; h];
    for k in 0..h {
        forget[k] = sigmoid(forget[k]);
        input[k] = sigmoid(input[k]);
        candidate[k] = candidate[k].tanh();
        output[k] = sigmoid(output[k]);
        c[k] = forget[k] * c_prev[k] + input[k] * candidate[k];
        tanh_c[k] = c[k].tanh();
    }
    GateCache { z, forget, input, candidate, output, c_prev: c_prev.to_vec(), c, tanh_c }
}

impl GateCache {
    pub fn hidden(&self) -> Vec<f64> {
        self.output.iter().zip(&self.tanh_c).map(|(o, t)| o * t).collect()
    }
}

/// One LSTM step. Returns `(h_t, c_t, cache)`.
pub fn lstm_cell_forward(
    x: &[f64],
    h_prev: &[f64],
    c_prev: &[f64],
    params: &LstmParams,
) -> Result<(Vec<f64>, Vec<f64>, GateCache)> {
    if x.len() != params.input_dim || h_prev.len() != params.hidden_dim || c_prev.len() != params.hidden_dim {
        return Err(Error::Shape(format!(
            "cell expects x[{}], h[{}], c[{}]; got x[{}], h[{}], c[{}]",
            params.input_dim,
            params.hidden_dim,
            params.hidden_dim,
            x.len(),
            h_prev.len(),
            c_prev.len()
        )));
    }
    let cache = step(params, x, h_prev, c_prev);
    Ok((cache.hidden(), cache.c.clone(), cache))
}

fn check_batch(params: &LstmParams, config: &LstmConfig, inputs: &[f64]) -> Result<usize> {
    if !params.matches(config) {
        return Err(Error::Shape("parameters do not match the configuration".into()));
    }
    let stride = config.lookback * config.input_dim;
    if inputs.is_empty() || !inputs.len().is_multiple_of(stride) {
        return Err(Error::Shape(format!(
            "input length {} is not a positive multiple of lookback×features = {stride}",
            inputs.len()
        )));
    }
    Ok(inputs.len() / stride)
}

/// Forward pass with explicit dropout masks (`hidden_dim` multipliers per sample).
/// `None` disables dropout.
pub fn forward_with_masks(
    params: &LstmParams,
    config: &LstmConfig,
    inputs: &[f64],
    masks: Option<&[f64]>,
) -> Result<(Vec<f64>, ForwardCache)> {
    let batch = check_batch(params, config, inputs)?;
    let (h, f, l, d) = (config.hidden_dim, config.input_dim, config.lookback, config.dense_dim);
    if let Some(m) = masks {
        if m.len() != batch * h {
            return Err(Error::Shape(format!("expected {} mask entries, got {}", batch * h, m.len())));
        }
    }
    let mut preds = Vec::with_capacity(batch);
    let mut samples = Vec::with_capacity(batch);
    for b in 0..batch {
        let sample = &inputs[b * l * f..(b + 1) * l * f];
        let mut h_t = vec![0.0; h];
        let mut c_t = vec![0.0; h];
        let mut steps = Vec::with_capacity(l);
        for t in 0..l {
            let cache = step(params, &sample[t * f..(t + 1) * f], &h_t, &c_t);
            h_t = cache.hidden();
            c_t.clone_from(&cache.c);
            steps.push(cache);
        }
        let mask = match masks {
            Some(m) => m[b * h..(b + 1) * h].to_vec(),
            None => vec![1.0; h],
        };
        let dropped: Vec<f64> = h_t.iter().zip(&mask).map(|(a, m)| a * m).collect();
        let mut dense_act = vec![0.0; d];
        gate_preactivation(&params.dense1_w, &params.dense1_b, &dropped, &mut dense_act);
        dense_act.iter_mut().for_each(|a| *a = sigmoid(*a));
        let prediction = params.dense2_b[0] + params.dense2_w.iter().zip(&dense_act).map(|(w, a)| w * a).sum::<f64>();
        preds.push(prediction);
        samples.push(SampleCache { steps, mask, dropped, dense_act, prediction });
    }
    Ok((preds, ForwardCache { samples, lookback: l }))
}

/// Inverted-dropout masks for `batch` samples: each entry is 0 with probability `rate`,
/// otherwise `1 / (1 - rate)`.
pub fn sample_dropout_masks<R: Rng + ?Sized>(rate: f64, hidden: usize, batch: usize, rng: &mut R) -> Vec<f64> {
    let keep = 1.0 / (1.0 - rate);
    (0..batch * hidden).map(|_| if rng.random::<f64>() < rate { 0.0 } else { keep }).collect()
}

/// Unrolls from zero states over the full lookback and returns one prediction per sample.
/// Dropout is sampled from `rng` in train mode only.
pub fn forward<R: Rng + ?Sized>(
    params: &LstmParams,
    config: &LstmConfig,
    inputs: &[f64],
    mode: Mode,
    rng: &mut R,
) -> Result<(Vec<f64>, ForwardCache)> {
    let batch = check_batch(params, config, inputs)?;
    match mode {
        Mode::Train if config.dropout_rate > 0.0 => {
            let masks = sample_dropout_masks(config.dropout_rate, config.hidden_dim, batch, rng);
            forward_with_masks(params, config, inputs, Some(&masks))
        }
        _ => forward_with_masks(params, config, inputs, None),
    }
}

pub fn mse_loss(pred: &[f64], target: &[f64]) -> Result<f64> {
    if pred.len() != target.len() {
        return Err(Error::LengthMismatch { left: pred.len(), right: target.len() });
    }
    if pred.is_empty() {
        return Err(Error::InsufficientData { what: "mse_loss", message: "empty input".into() });
    }
    Ok(pred.iter().zip(target).map(|(p, t)| (t - p).powi(2)).sum::<f64>() / pred.len() as f64)
}

/// Gradient of the batch-mean squared error with respect to every parameter.
#[allow(clippy::needless_range_loop)]
pub fn backward(params: &LstmParams, config: &LstmConfig, cache: &ForwardCache, targets: &[f64]) -> Result<LstmParams> {
    if !params.matches(config) || cache.lookback != config.lookback {
        return Err(Error::Shape("cache or parameters do not match the configuration".into()));
    }
    if cache.samples.len() != targets.len() || targets.is_empty() {
        return Err(Error::Shape(format!("{} cached samples but {} targets", cache.samples.len(), targets.len())));
    }
    let (h, d) = (config.hidden_dim, config.dense_dim);
    let zl = config.gate_input_dim();
    let n = targets.len() as f64;
    let mut g = params.zeros_like();

    let mut da = [vec![0.0; h], vec![0.0; h], vec![0.0; h], vec![0.0; h]];
    let mut dz = vec![0.0; zl];
    for (s, &target) in cache.samples.iter().zip(targets) {
        if s.steps.len() != config.lookback {
            return Err(Error::Shape("cache length differs from lookback".into()));
        }
        let dy = 2.0 * (s.prediction - target) / n;
        g.dense2_b[0] += dy;
        let mut d_dense = vec![0.0; d];
        for k in 0..d {
            g.dense2_w[k] += dy * s.dense_act[k];
            let a = s.dense_act[k];
            d_dense[k] = dy * params.dense2_w[k] * a * (1.0 - a);
        }
        let mut dh = vec![0.0; h];
        for k in 0..d {
            let dk = d_dense[k];
            if dk == 0.0 {
                continue;
            }
            g.dense1_b[k] += dk;
            let row = &params.dense1_w[k * h..(k + 1) * h];
            let grow = &mut g.dense1_w[k * h..(k + 1) * h];
            for j in 0..h {
                grow[j] += dk * s.dropped[j];
                dh[j] += dk * row[j];
            }
        }
        for j in 0..h {
            dh[j] *= s.mask[j];
        }

        let mut dc = vec![0.0; h];
        for st in s.steps.iter().rev() {
            let [da_f, da_i, da_c, da_o] = &mut da;
            for k in 0..h {
                let (f, i, cand, o, tc) = (st.forget[k], st.input[k], st.candidate[k], st.output[k], st.tanh_c[k]);
                let d_o = dh[k] * tc;
                let dck = dc[k] + dh[k] * o * (1.0 - tc * tc);
                da_f[k] = dck * st.c_prev[k] * f * (1.0 - f);
                da_i[k] = dck * cand * i * (1.0 - i);
                da_c[k] = dck * i * (1.0 - cand * cand);
                da_o[k] = d_o * o * (1.0 - o);
                dc[k] = dck * f;
            }
            dz.iter_mut().for_each(|v| *v = 0.0);
            let grads = [
                (&params.w_f, &mut g.w_f, &mut g.b_f, &da[0]),
                (&params.w_i, &mut g.w_i, &mut g.b_i, &da[1]),
                (&params.w_c, &mut g.w_c, &mut g.b_c, &da[2]),
                (&params.w_o, &mut g.w_o, &mut g.b_o, &da[3]),
            ];
            for (w, gw, gb, dpre) in grads {
                for k in 0..h {
                    let dk = dpre[k];
                    gb[k] += dk;
                    let row = &w[k * zl..(k + 1) * zl];
                    let grow = &mut gw[k * zl..(k + 1) * zl];
                    for m in 0..zl {
                        grow[m] += dk * st.z[m];
                        dz[m] += dk * row[m];
                    }
                }
            }
            dh.copy_from_slice(&dz[..h]);
        }
    }
    Ok(g)
}
