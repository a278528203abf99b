use serde::{Deserialize, Serialize};

use super::frame::AlignedFrame;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ColumnRange {
    pub name: String,
    pub min: f64,
    pub max: f64,
}

/// Per-column min-max ranges, fitted on training rows only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScalerParams {
    pub columns: Vec<ColumnRange>,
}

impl ScalerParams {
    pub fn range(&self, column: &str) -> Result<&ColumnRange> {
        self.columns.iter().find(|c| c.name == column).ok_or_else(|| Error::MissingColumn(column.to_string()))
    }
}

/// Fits a min-max range for every column. Constant columns are rejected.
pub fn fit_scaler(frame: &AlignedFrame) -> Result<ScalerParams> {
    if frame.is_empty() {
        return Err(Error::InsufficientData { what: "fit_scaler", message: "frame has no rows".into() });
    }
    let mut columns = Vec::new();
    let mut degenerate = Vec::new();
    for (name, values) in frame.columns() {
        let min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if min == max {
            degenerate.push(name.to_string());
        }
        columns.push(ColumnRange { name: name.to_string(), min, max });
    }
    if !degenerate.is_empty() {
        return Err(Error::DegenerateColumns(degenerate));
    }
    Ok(ScalerParams { columns })
}

/// Maps every column with `(x - min) / (max - min)`. Values outside the fitted range are not clipped.
pub fn apply_scaler(frame: &AlignedFrame, params: &ScalerParams) -> Result<AlignedFrame> {
    let mut cols = Vec::new();
    for (name, values) in frame.columns() {
        let r = params.range(name)?;
        let span = r.max - r.min;
        cols.push((name.to_string(), values.iter().map(|x| (x - r.min) / span).collect()));
    }
    AlignedFrame::new(frame.dates().to_vec(), cols)
}

pub fn invert_scaler(values: &[f64], column: &str, params: &ScalerParams) -> Result<Vec<f64>> {
    let r = params.range(column)?;
    let span = r.max - r.min;
    Ok(values.iter().map(|v| v * span + r.min).collect())
}
