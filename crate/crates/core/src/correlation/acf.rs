use serde::{Deserialize, Serialize};

use super::pearson::pearson;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AcfReport {
    pub series: String,
    /// `acf[k]` correlates the series with its own k-step shift; `acf[0] == 1`.
    pub acf: Vec<f64>,
}

impl AcfReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("lag,acf\n");
        for (k, r) in self.acf.iter().enumerate() {
            out.push_str(&format!("{k},{r}\n"));
        }
        out
    }
}

/// Suggested lookback together with the evidence it was derived from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LookbackSuggestion {
    pub lookback: usize,
    pub threshold: f64,
    pub report: AcfReport,
}

pub fn autocorrelation(series: &str, values: &[f64], max_lag: usize) -> Result<AcfReport> {
    if max_lag == 0 {
        return Err(Error::Config("max_lag must be positive".into()));
    }
    if values.len() <= max_lag + 1 {
        return Err(Error::InsufficientData {
            what: "autocorrelation",
            message: format!("max_lag {max_lag} needs more than {} points", max_lag + 1),
        });
    }
    let n = values.len();
    let mut acf = Vec::with_capacity(max_lag + 1);
    pearson(values, values)?;
    acf.push(1.0);
    for k in 1..=max_lag {
        acf.push(pearson(&values[..n - k], &values[k..])?);
    }
    Ok(AcfReport { series: series.to_string(), acf })
}

/// Longest run of lags `1..=L` whose ACF stays at or above `threshold`; at least 1.
pub fn select_lookback(report: &AcfReport, threshold: f64) -> Result<LookbackSuggestion> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(Error::Config(format!("threshold must lie in (0, 1), got {threshold}")));
    }
    let run = report.acf.iter().skip(1).take_while(|&&r| r >= threshold).count();
    Ok(LookbackSuggestion { lookback: run.max(1), threshold, report: report.clone() })
}
