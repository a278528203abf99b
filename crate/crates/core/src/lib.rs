//! Correlation analysis, autocorrelation-driven lookback selection, a from-scratch
//! LSTM regressor trained with Adam, and a feature-ablation harness for daily
//! market series.

pub mod correlation;
pub mod data;
pub mod error;
pub mod experiment;
pub mod io;
pub mod market;
pub mod nn;
pub mod svg;
pub mod synthetic;
pub mod train;

pub use error::{Error, Result};
