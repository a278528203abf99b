//! Full-period and windowed Pearson correlation, histograms, summary statistics
//! and autocorrelation-based lookback selection.

mod acf;
mod pearson;
mod windowed;

use std::path::Path;

pub use acf::{autocorrelation, select_lookback, AcfReport, LookbackSuggestion};
pub use pearson::{correlation_matrix, pearson, CorrelationMatrix};
pub use windowed::{
    bucket_histogram, discretize_windows, histogram_csv, summary_csv, summary_stats, windowed_correlations,
    windows_csv, Histogram, SummaryStats, VarianceForm, WindowedCorrelationReport, BIN_LABELS,
};

use crate::error::Result;

/// Writes the matrix as an annotated SVG heatmap. Output bytes depend only on the matrix.
pub fn export_heatmap(matrix: &CorrelationMatrix, path: &Path) -> Result<()> {
    crate::io::write_atomic(path, crate::svg::heatmap(matrix).as_bytes())
}
