//! Seeded synthetic series for tests, benchmarks and the bundled demo dataset.

use chrono::{Datelike, NaiveDate, Weekday};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::data::{OhlcvBar, OhlcvSeries};
use crate::error::Result;

/// `n` consecutive weekdays starting at (or after) `start`.
pub fn business_days(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d.succ_opt().expect("date in range");
    }
    out
}

pub fn sine(n: usize, period: f64, phase: f64) -> Vec<f64> {
    (0..n).map(|i| (std::f64::consts::TAU * i as f64 / period + phase).sin()).collect()
}

pub fn white_noise(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

/// `x_t = phi·x_{t-1} + e_t` with standard normal innovations, started from the
/// stationary distribution.
pub fn ar1(n: usize, phi: f64, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut x: f64 = StandardNormal.sample(&mut rng);
    x /= (1.0 - phi * phi).max(1e-12).sqrt();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        out.push(x);
        let e: f64 = StandardNormal.sample(&mut rng);
        x = phi * x + e;
    }
    out
}

/// Wraps a close-price path in plausible bars: open at the previous close, high/low
/// a small random distance outside the open/close envelope.
pub fn bars_from_closes(symbol: &str, dates: &[NaiveDate], closes: &[f64], seed: u64) -> Result<OhlcvSeries> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut bars = Vec::with_capacity(closes.len());
    for (i, (&date, &close)) in dates.iter().zip(closes).enumerate() {
        let open = if i == 0 { close } else { closes[i - 1] };
        let spread = 0.004 * close;
        let high = open.max(close) + spread * rng.random::<f64>();
        let low = open.min(close) - spread * rng.random::<f64>();
        let volume = (1.0e6 * (1.0 + rng.random::<f64>())).round();
        bars.push(OhlcvBar { date, open, high, low, close, volume: Some(volume) });
    }
    OhlcvSeries::new(symbol, bars)
}

/// Mean-reverting price around `level` with daily innovation `sigma`.
pub fn mean_reverting_price(n: usize, level: f64, phi: f64, sigma: f64, seed: u64) -> Vec<f64> {
    ar1(n, phi, seed).into_iter().map(|x| level + sigma * x).collect()
}

/// Seven instruments shaped like the oil/macro universe: three macro series
/// (USD, WTI, GOLD) and four equities loading on them with different signs.
pub fn demo_universe(n: usize, seed: u64) -> Result<Vec<OhlcvSeries>> {
    let dates = business_days(NaiveDate::from_ymd_opt(2013, 6, 24).expect("valid"), n);
    let usd = ar1(n, 0.995, seed);
    let wti = ar1(n, 0.99, seed + 1);
    let gold = ar1(n, 0.995, seed + 2);
    let mix = |w_usd: f64, w_wti: f64, w_gold: f64, own_seed: u64| -> Vec<f64> {
        let own = ar1(n, 0.98, own_seed);
        (0..n).map(|i| w_usd * usd[i] + w_wti * wti[i] + w_gold * gold[i] + own[i]).collect()
    };
    let raw = [
        ("USD", usd.clone(), 95.0, 0.4),
        ("WTI", wti.clone(), 60.0, 1.5),
        ("GOLD", gold.clone(), 1500.0, 12.0),
        ("BP", mix(-0.3, 0.6, -0.5, seed + 3), 400.0, 6.0),
        ("TOTAL", mix(-0.1, 0.5, -0.6, seed + 4), 45.0, 0.8),
        ("SLB", mix(0.3, 0.6, -0.6, seed + 5), 35.0, 0.7),
        ("CNE", mix(0.1, 0.8, -0.2, seed + 6), 200.0, 4.0),
    ];
    raw.iter()
        .enumerate()
        .map(|(k, (symbol, path, level, scale))| {
            let closes: Vec<f64> = path.iter().map(|x| level + scale * x).collect();
            bars_from_closes(symbol, &dates, &closes, seed + 100 + k as u64)
        })
        .collect()
}
