//! Brute-force reference implementations shared by the integration tests. They follow
//! the textbook definitions directly and share no code with the library.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Mean of the product of z-scores.
pub fn pearson_oracle(x: &[f64], y: &[f64]) -> Option<f64> {
    let (mx, my) = (mean(x), mean(y));
    let sx = (x.iter().map(|v| (v - mx) * (v - mx)).sum::<f64>() / x.len() as f64).sqrt();
    let sy = (y.iter().map(|v| (v - my) * (v - my)).sum::<f64>() / y.len() as f64).sqrt();
    if sx == 0.0 || sy == 0.0 {
        return None;
    }
    let z: f64 = x.iter().zip(y).map(|(a, b)| ((a - mx) / sx) * ((b - my) / sy)).sum();
    Some(z / x.len() as f64)
}

/// Slices both series into `w`-point blocks starting at 0, w, 2w, ... and correlates
/// each block pair. `None` marks a block with a constant side.
pub fn windowed_oracle(a: &[f64], b: &[f64], w: usize) -> Vec<Option<f64>> {
    let mut out = Vec::new();
    let mut start = 0;
    while start + w <= a.len() {
        out.push(pearson_oracle(&a[start..start + w], &b[start..start + w]));
        start += w;
    }
    out
}

pub fn acf_oracle(x: &[f64], max_lag: usize) -> Vec<f64> {
    (0..=max_lag).map(|k| pearson_oracle(&x[..x.len() - k], &x[k..]).unwrap()).collect()
}

/// Largest L with acf[1..=L] all at or above the threshold, floored at 1.
pub fn lookback_oracle(acf: &[f64], threshold: f64) -> usize {
    let mut best = 0;
    for l in 1..acf.len() {
        if (1..=l).all(|k| acf[k] >= threshold) {
            best = l;
        }
    }
    best.max(1)
}

pub fn uniform(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// `x[t] = phi * x[t-1] + e[t]`, e ~ U(-1, 1), after a burn-in.
pub fn ar1_oracle(n: usize, phi: f64, seed: u64) -> Vec<f64> {
    let noise = uniform(n + 500, seed);
    let mut x = 0.0;
    let mut out = Vec::with_capacity(n);
    for (t, e) in noise.into_iter().enumerate() {
        x = phi * x + e;
        if t >= 500 {
            out.push(x);
        }
    }
    out
}
