use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::runner::{run_experiment, ExperimentResult};
use super::spec::ExperimentSpec;
use crate::data::AlignedFrame;
use crate::error::{Error, Result};
use crate::train::{MetricsReport, Scale};

pub const METRIC_NAMES: [&str; 4] = ["MSE", "RMSE", "MAE", "MAPE"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub variant: String,
    pub run_id: String,
    pub metrics: Option<MetricsReport>,
    pub error: Option<String>,
}

/// One row per variant; `best[k]` is the row holding the minimum of metric `k`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationTable {
    pub target: String,
    pub scale: Scale,
    pub rows: Vec<AblationRow>,
    pub best: [Option<usize>; 4],
}

impl AblationTable {
    pub fn from_rows(target: &str, scale: Scale, rows: Vec<AblationRow>) -> Self {
        let best = mark_minima(&rows);
        AblationTable { target: target.to_string(), scale, rows, best }
    }

    pub fn has_failures(&self) -> bool {
        self.rows.iter().any(|r| r.error.is_some())
    }

    fn is_best(&self, row: usize, metric: usize) -> bool {
        self.best[metric] == Some(row)
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("variant,mse,rmse,mae,mape,best,status\n");
        for (i, r) in self.rows.iter().enumerate() {
            let best: Vec<&str> = (0..4).filter(|&k| self.is_best(i, k)).map(|k| METRIC_NAMES[k]).collect();
            match (&r.metrics, &r.error) {
                (Some(m), _) => out.push_str(&format!(
                    "{},{},{},{},{},{},ok\n",
                    r.variant,
                    m.mse,
                    m.rmse,
                    m.mae,
                    m.mape,
                    best.join(";")
                )),
                (None, err) => out.push_str(&format!(
                    "{},,,,,,\"failed: {}\"\n",
                    r.variant,
                    err.as_deref().unwrap_or("unknown").replace('"', "'")
                )),
            }
        }
        out
    }

    /// Aligned text table in MSE, RMSE, MAE, MAPE order; `*` marks each column minimum.
    pub fn to_text(&self) -> String {
        let mut out = format!("Experiment result for {} (scale: {})\n", self.target, self.scale);
        let header = ["", "MSE ", "RMSE ", "MAE ", "MAPE "];
        let mut cells: Vec<[String; 5]> = vec![header.map(str::to_string)];
        for (i, r) in self.rows.iter().enumerate() {
            let mut row: [String; 5] = Default::default();
            row[0] = r.variant.clone();
            match &r.metrics {
                Some(m) => {
                    for (k, v) in m.values().iter().enumerate() {
                        row[k + 1] = format!("{v:.6}{}", if self.is_best(i, k) { "*" } else { " " });
                    }
                }
                None => row[1] = "FAILED".into(),
            }
            cells.push(row);
        }
        let widths: Vec<usize> = (0..5).map(|c| cells.iter().map(|r| r[c].len()).max().unwrap_or(0)).collect();
        for row in &cells {
            let line: Vec<String> = row
                .iter()
                .enumerate()
                .map(
                    |(c, s)| if c == 0 { format!("{s:<w$}", w = widths[c]) } else { format!("{s:>w$}", w = widths[c]) },
                )
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// Index of the row with the smallest value for each metric; ties go to the earliest row.
pub fn mark_minima(rows: &[AblationRow]) -> [Option<usize>; 4] {
    let mut best = [None; 4];
    for (k, slot) in best.iter_mut().enumerate() {
        let mut current: Option<(usize, f64)> = None;
        for (i, r) in rows.iter().enumerate() {
            if let Some(m) = &r.metrics {
                let v = m.values()[k];
                if current.is_none_or(|(_, b)| v < b) {
                    current = Some((i, v));
                }
            }
        }
        *slot = current.map(|(i, _)| i);
    }
    best
}

fn check_comparable(specs: &[ExperimentSpec]) -> Result<()> {
    let first = specs.first().ok_or_else(|| Error::Config("ablation needs at least one spec".into()))?;
    for s in &specs[1..] {
        if s.target != first.target
            || s.train_last != first.train_last
            || s.test_first != first.test_first
            || s.test_last != first.test_last
            || s.training != first.training
            || s.model != first.model
        {
            return Err(Error::Config(format!(
                "variant `{}` differs from `{}` in more than its feature set",
                s.variant, first.variant
            )));
        }
    }
    Ok(())
}

/// Runs every variant (in parallel) and assembles the comparison table. Failed
/// variants become marked rows; the successful results are returned alongside.
pub fn run_ablation(
    specs: &[ExperimentSpec],
    data: &AlignedFrame,
    runs_root: Option<&Path>,
) -> Result<(AblationTable, Vec<ExperimentResult>)> {
    check_comparable(specs)?;
    let outcomes: Vec<Result<ExperimentResult>> =
        specs.par_iter().map(|s| run_experiment(s, data, runs_root)).collect();
    let mut rows = Vec::with_capacity(specs.len());
    let mut results = Vec::new();
    for (spec, outcome) in specs.iter().zip(outcomes) {
        match outcome {
            Ok(r) => {
                rows.push(AblationRow {
                    variant: spec.variant.label(),
                    run_id: r.run_id.clone(),
                    metrics: Some(r.metrics),
                    error: None,
                });
                results.push(r);
            }
            Err(e) => rows.push(AblationRow {
                variant: spec.variant.label(),
                run_id: spec.run_id(),
                metrics: None,
                error: Some(e.to_string()),
            }),
        }
    }
    Ok((AblationTable::from_rows(&specs[0].target, Scale::Original, rows), results))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(name: &str, v: [f64; 4]) -> AblationRow {
        AblationRow {
            variant: name.into(),
            run_id: String::new(),
            metrics: Some(MetricsReport { scale: Scale::Original, mse: v[0], rmse: v[1], mae: v[2], mape: v[3] }),
            error: None,
        }
    }

    #[test]
    fn minima_match_scan() {
        let rows = vec![
            row("+WTI", [0.02634, 0.16232, 0.01026, 0.08321]),
            row("Main", [0.00372, 0.06105, 0.00386, 0.08335]),
            row("+USD", [0.13510, 0.36756, 0.02324, 0.08096]),
            row("+GOLD", [0.02252, 0.15008, 0.00949, 0.08311]),
        ];
        let best = mark_minima(&rows);
        for (k, found) in best.iter().enumerate() {
            let scan = (0..rows.len())
                .min_by(|&a, &b| rows[a].metrics.unwrap().values()[k].total_cmp(&rows[b].metrics.unwrap().values()[k]))
                .unwrap();
            assert_eq!(*found, Some(scan));
        }
        assert_eq!(best, [Some(1), Some(1), Some(1), Some(2)]);
    }

    #[test]
    fn failed_rows_are_marked() {
        let mut rows = vec![row("Main", [1.0, 1.0, 1.0, 1.0])];
        rows.push(AblationRow {
            variant: "+X".into(),
            run_id: String::new(),
            metrics: None,
            error: Some("boom".into()),
        });
        let t = AblationTable::from_rows("BP", Scale::Original, rows);
        assert!(t.has_failures());
        assert!(t.to_csv().contains("failed: boom"));
        assert!(t.to_text().contains("FAILED"));
        assert_eq!(t.best, [Some(0); 4]);
    }

    #[test]
    fn text_table_column_order() {
        let t = AblationTable::from_rows("BP", Scale::Original, vec![row("Main", [1.0, 2.0, 3.0, 4.0])]);
        let text = t.to_text();
        let header = text.lines().nth(1).unwrap();
        let pos: Vec<usize> = ["MSE", "RMSE", "MAE", "MAPE"].iter().map(|h| header.find(h).unwrap()).collect();
        assert!(pos.windows(2).all(|w| w[0] < w[1]));
    }
}
