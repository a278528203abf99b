use chrono::NaiveDate;

use super::frame::AlignedFrame;
use crate::error::{Error, Result};

/// Sliding lookback windows with a one-step-ahead target.
///
/// `inputs` is row-major `[samples × lookback × features]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SupervisedTensors {
    pub inputs: Vec<f64>,
    pub targets: Vec<f64>,
    pub sample_dates: Vec<NaiveDate>,
    pub lookback: usize,
    pub features: usize,
    pub feature_names: Vec<String>,
    pub target_name: String,
}

impl SupervisedTensors {
    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    /// Stride of one sample in `inputs`.
    pub fn sample_len(&self) -> usize {
        self.lookback * self.features
    }

    pub fn sample(&self, i: usize) -> &[f64] {
        let n = self.sample_len();
        &self.inputs[i * n..(i + 1) * n]
    }

    /// Inputs for samples `[start, end)`.
    pub fn input_range(&self, start: usize, end: usize) -> &[f64] {
        let n = self.sample_len();
        &self.inputs[start * n..end * n]
    }

    /// Samples `[start, end)` as a new tensor set.
    pub fn slice(&self, start: usize, end: usize) -> SupervisedTensors {
        SupervisedTensors {
            inputs: self.input_range(start, end).to_vec(),
            targets: self.targets[start..end].to_vec(),
            sample_dates: self.sample_dates[start..end].to_vec(),
            lookback: self.lookback,
            features: self.features,
            feature_names: self.feature_names.clone(),
            target_name: self.target_name.clone(),
        }
    }
}

/// Sample `i` holds feature rows `i..i+lookback` and targets row `i+lookback`.
pub fn make_supervised_windows(
    frame: &AlignedFrame,
    feature_columns: &[String],
    target_column: &str,
    lookback: usize,
) -> Result<SupervisedTensors> {
    if lookback == 0 {
        return Err(Error::Config("lookback must be positive".into()));
    }
    if feature_columns.is_empty() {
        return Err(Error::Config("at least one feature column is required".into()));
    }
    if lookback >= frame.len() {
        return Err(Error::InsufficientData {
            what: "make_supervised_windows",
            message: format!("lookback {lookback} needs more than {} dates", frame.len()),
        });
    }
    let features: Vec<&[f64]> = feature_columns.iter().map(|c| frame.column(c)).collect::<Result<_>>()?;
    let target = frame.column(target_column)?;
    let n = frame.len() - lookback;
    let f = features.len();
    let mut inputs = Vec::with_capacity(n * lookback * f);
    for i in 0..n {
        for j in 0..lookback {
            inputs.extend(features.iter().map(|col| col[i + j]));
        }
    }
    Ok(SupervisedTensors {
        inputs,
        targets: target[lookback..].to_vec(),
        sample_dates: frame.dates()[lookback..].to_vec(),
        lookback,
        features: f,
        feature_names: feature_columns.to_vec(),
        target_name: target_column.to_string(),
    })
}
