use serde::{Deserialize, Serialize};

use super::pearson::pearson;
use crate::error::{Error, Result};

/// Histogram bin edges: `[-1,-0.5)`, `[-0.5,0)`, `[0,0.5)`, `[0.5,1]`.
pub const BIN_LABELS: [&str; 4] = ["[-1,-0.5)", "[-0.5,0)", "[0,0.5)", "[0.5,1]"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub counts: [usize; 4],
    pub percents: [f64; 4],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VarianceForm {
    /// Divide by n.
    #[default]
    Population,
    /// Divide by n - 1.
    Sample,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub median: f64,
    pub mean: f64,
    pub variance: f64,
    pub std_dev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindowedCorrelationReport {
    pub pair: (String, String),
    pub window_len: usize,
    pub total_windows: usize,
    /// Index (into the chunk sequence) of each retained window.
    pub window_indices: Vec<usize>,
    pub window_correlations: Vec<f64>,
    /// Windows where either chunk was constant.
    pub skipped_windows: usize,
    pub histogram: Histogram,
    pub stats: SummaryStats,
}

/// Consecutive non-overlapping chunks; a short trailing remainder is dropped.
pub fn discretize_windows(values: &[f64], window_len: usize) -> Result<Vec<&[f64]>> {
    if window_len < 2 {
        return Err(Error::Config(format!("window length must be at least 2, got {window_len}")));
    }
    Ok(values.chunks_exact(window_len).collect())
}

pub fn windowed_correlations(
    pair: (&str, &str),
    a: &[f64],
    b: &[f64],
    window_len: usize,
    variance: VarianceForm,
) -> Result<WindowedCorrelationReport> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch { left: a.len(), right: b.len() });
    }
    let wa = discretize_windows(a, window_len)?;
    let wb = discretize_windows(b, window_len)?;
    if wa.is_empty() {
        return Err(Error::InsufficientData {
            what: "windowed_correlations",
            message: format!("{} points is shorter than one {window_len}-point window", a.len()),
        });
    }
    let mut window_indices = Vec::new();
    let mut window_correlations = Vec::new();
    let mut skipped = 0;
    for (idx, (ca, cb)) in wa.iter().zip(&wb).enumerate() {
        match pearson(ca, cb) {
            Ok(r) => {
                window_indices.push(idx);
                window_correlations.push(r);
            }
            Err(Error::ZeroVariance) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    if window_correlations.is_empty() {
        return Err(Error::InsufficientData {
            what: "windowed_correlations",
            message: "every window has a constant chunk".into(),
        });
    }
    let histogram = bucket_histogram(&window_correlations)?;
    let stats = summary_stats(&window_correlations, variance)?;
    Ok(WindowedCorrelationReport {
        pair: (pair.0.to_string(), pair.1.to_string()),
        window_len,
        total_windows: wa.len(),
        window_indices,
        window_correlations,
        skipped_windows: skipped,
        histogram,
        stats,
    })
}

fn bin_of(r: f64) -> usize {
    if r < -0.5 {
        0
    } else if r < 0.0 {
        1
    } else if r < 0.5 {
        2
    } else {
        3
    }
}

pub fn bucket_histogram(rs: &[f64]) -> Result<Histogram> {
    let mut counts = [0usize; 4];
    for (index, &r) in rs.iter().enumerate() {
        if !(-1.0..=1.0).contains(&r) {
            return Err(Error::OutOfRange { index, value: r });
        }
        counts[bin_of(r)] += 1;
    }
    let total = rs.len().max(1) as f64;
    let percents = counts.map(|c| 100.0 * c as f64 / total);
    Ok(Histogram { counts, percents })
}

pub fn summary_stats(rs: &[f64], form: VarianceForm) -> Result<SummaryStats> {
    if rs.is_empty() {
        return Err(Error::InsufficientData { what: "summary_stats", message: "empty input".into() });
    }
    let n = rs.len();
    let mut sorted = rs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let median = if n % 2 == 1 { sorted[n / 2] } else { 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]) };
    let mean = rs.iter().sum::<f64>() / n as f64;
    let ss: f64 = rs.iter().map(|r| (r - mean).powi(2)).sum();
    let variance = match form {
        VarianceForm::Population => ss / n as f64,
        VarianceForm::Sample if n > 1 => ss / (n - 1) as f64,
        VarianceForm::Sample => 0.0,
    };
    Ok(SummaryStats { median, mean, variance, std_dev: variance.sqrt() })
}

/// Long-form CSV: `pair,window_index,correlation`.
pub fn windows_csv(reports: &[WindowedCorrelationReport]) -> String {
    let mut out = String::from("pair,window_index,correlation\n");
    for r in reports {
        let label = format!("{}-{}", r.pair.0, r.pair.1);
        for (idx, c) in r.window_indices.iter().zip(&r.window_correlations) {
            out.push_str(&format!("{label},{idx},{c}\n"));
        }
    }
    out
}

/// One row per pair: median, mean, variance, standard deviation.
pub fn summary_csv(reports: &[WindowedCorrelationReport]) -> String {
    let mut out = String::from("pair,median,mean,variance,std_dev\n");
    for r in reports {
        let s = &r.stats;
        out.push_str(&format!(
            "{}-{},{:.6},{:.6},{:.6},{:.6}\n",
            r.pair.0, r.pair.1, s.median, s.mean, s.variance, s.std_dev
        ));
    }
    out
}

/// Counts and percents per bin, plus retained/skipped window totals.
pub fn histogram_csv(reports: &[WindowedCorrelationReport]) -> String {
    let mut out = String::from("pair,row");
    for l in BIN_LABELS {
        out.push_str(&format!(",\"{l}\""));
    }
    out.push_str(",retained,skipped\n");
    for r in reports {
        let label = format!("{}-{}", r.pair.0, r.pair.1);
        let h = &r.histogram;
        let retained = r.window_correlations.len();
        out.push_str(&format!(
            "{label},count,{},{},{},{},{retained},{}\n",
            h.counts[0], h.counts[1], h.counts[2], h.counts[3], r.skipped_windows
        ));
        out.push_str(&format!(
            "{label},percent,{:.1},{:.1},{:.1},{:.1},{retained},{}\n",
            h.percents[0], h.percents[1], h.percents[2], h.percents[3], r.skipped_windows
        ));
    }
    out
}
