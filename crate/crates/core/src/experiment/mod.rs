//! Feature-ablation experiments: the same topology trained on the target's own bars
//! and on those bars plus one correlated instrument.

mod ablation;
mod runner;
mod spec;

use std::path::Path;

pub use ablation::{mark_minima, run_ablation, AblationRow, AblationTable, METRIC_NAMES};
pub use runner::{
    median, predictions_csv, prepare, run_experiment, run_replicates, ExperimentResult, PreparedExperiment,
    ReplicateSummary,
};
pub use spec::{compose_features, ExperimentSpec, ModelSpec, Variant, OHLC_FIELDS};

use crate::error::{Error, Result};

/// Real vs predicted prices over the test dates.
pub fn prediction_svg(result: &ExperimentResult) -> Result<String> {
    if result.predicted.is_empty() {
        return Err(Error::InsufficientData { what: "render_prediction_plot", message: "no predictions".into() });
    }
    let title = format!("{} real vs predicted prices ({})", result.spec.target, result.spec.variant);
    Ok(crate::svg::line_chart(
        &title,
        &result.dates,
        &[("Real", &result.actual, "#1f77b4"), ("Predicted", &result.predicted, "#d62728")],
    ))
}

pub fn render_prediction_plot(result: &ExperimentResult, path: &Path) -> Result<()> {
    crate::io::write_atomic(path, prediction_svg(result)?.as_bytes())
}
