use serde::{Deserialize, Serialize};

use crate::data::AlignedFrame;
use crate::error::{Error, Result};

/// Sample Pearson correlation. Constant inputs yield [`Error::ZeroVariance`] rather than 0.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 2 {
        return Err(Error::InsufficientData { what: "pearson", message: "need at least two points".into() });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

/// Square symmetric matrix of pairwise correlations.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub labels: Vec<String>,
    /// Row-major, `labels.len()²` entries.
    pub values: Vec<f64>,
}

impl CorrelationMatrix {
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size() + j]
    }

    /// CSV with a leading label column, values in shortest round-trip form.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("column");
        for l in &self.labels {
            out.push(',');
            out.push_str(l);
        }
        out.push('\n');
        for (i, l) in self.labels.iter().enumerate() {
            out.push_str(l);
            for j in 0..self.size() {
                out.push_str(&format!(",{}", self.get(i, j)));
            }
            out.push('\n');
        }
        out
    }
}

pub fn correlation_matrix(frame: &AlignedFrame, columns: &[String]) -> Result<CorrelationMatrix> {
    if columns.len() < 2 {
        return Err(Error::Config("correlation matrix needs at least two columns".into()));
    }
    let data: Vec<&[f64]> = columns.iter().map(|c| frame.column(c)).collect::<Result<_>>()?;
    let k = columns.len();
    let mut values = vec![0.0; k * k];
    for i in 0..k {
        values[i * k + i] = 1.0;
        for j in (i + 1)..k {
            let r = pearson(data[i], data[j]).map_err(|e| match e {
                Error::ZeroVariance => {
                    let bad: Vec<String> = [i, j]
                        .iter()
                        .filter(|&&c| data[c].iter().all(|v| *v == data[c][0]))
                        .map(|&c| columns[c].clone())
                        .collect();
                    Error::DegenerateColumns(bad)
                }
                other => other,
            })?;
            values[i * k + j] = r;
            values[j * k + i] = r;
        }
    }
    Ok(CorrelationMatrix { labels: columns.to_vec(), values })
}
