use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use serde::Serialize;

use super::spec::{compose_features, ExperimentSpec};
use crate::data::{
    apply_scaler, fit_scaler, invert_scaler, make_supervised_windows, split_by_date, AlignedFrame, ScalerParams,
    SupervisedTensors,
};
use crate::error::{Error, Result, StageExt};
use crate::io::{write_atomic, write_json};
use crate::nn::{init_params, LstmConfig, LstmModel};
use crate::train::{evaluate, predict, train, MetricsReport, TrainHistory};

/// Everything needed to train and score one experiment, before any training happens.
#[derive(Debug, Clone)]
pub struct PreparedExperiment {
    pub feature_columns: Vec<String>,
    pub target_column: String,
    pub config: LstmConfig,
    pub scaler: ScalerParams,
    pub train: SupervisedTensors,
    /// One sample per test date; the first windows reach back into pre-test history.
    pub test: SupervisedTensors,
    /// Unscaled target values on the test dates.
    pub test_actual: Vec<f64>,
}

/// Splits, scales (fitting on training rows only) and windows the data for `spec`.
pub fn prepare(spec: &ExperimentSpec, data: &AlignedFrame) -> Result<PreparedExperiment> {
    let (features, target) = compose_features(data, spec).stage("compose features")?;
    let mut needed = features.clone();
    if !needed.contains(&target) {
        needed.push(target.clone());
    }
    let columns = needed
        .iter()
        .map(|c| data.column(c).map(|v| (c.clone(), v.to_vec())))
        .collect::<Result<Vec<_>>>()
        .stage("compose features")?;
    let frame = AlignedFrame::new(data.dates().to_vec(), columns)?;

    let (train_frame, test_frame) =
        split_by_date(&frame, spec.train_last, spec.test_first, spec.test_last).stage("split")?;
    let scaler = fit_scaler(&train_frame).stage("fit scaler")?;
    let scaled_train = apply_scaler(&train_frame, &scaler).stage("scale")?;

    let lookback = spec.model.lookback;
    let first_test = frame.dates().iter().position(|d| *d == test_frame.dates()[0]).expect("test date in frame");
    if first_test < lookback {
        return Err(Error::InsufficientData {
            what: "prepare",
            message: format!("{first_test} dates precede the test period, lookback needs {lookback}"),
        }
        .at_stage("window"));
    }
    let history = frame.slice_rows(first_test - lookback, first_test + test_frame.len());
    let scaled_history = apply_scaler(&history, &scaler).stage("scale")?;

    let train = make_supervised_windows(&scaled_train, &features, &target, lookback).stage("window")?;
    let test = make_supervised_windows(&scaled_history, &features, &target, lookback).stage("window")?;
    let config = spec.model.config(features.len());
    config.validate().stage("configure model")?;
    Ok(PreparedExperiment {
        test_actual: test_frame.column(&target)?.to_vec(),
        feature_columns: features,
        target_column: target,
        config,
        scaler,
        train,
        test,
    })
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub spec: ExperimentSpec,
    pub run_id: String,
    pub job_seed: u64,
    pub feature_columns: Vec<String>,
    pub target_column: String,
    /// On inverse-scaled prices.
    pub metrics: MetricsReport,
    /// Test MSE in min-max units.
    pub normalized_mse: f64,
    pub dates: Vec<NaiveDate>,
    pub actual: Vec<f64>,
    pub predicted: Vec<f64>,
    pub history: TrainHistory,
    pub scaler: ScalerParams,
    pub model: LstmModel,
    pub duration: Duration,
    pub run_dir: Option<PathBuf>,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    run_id: &'a str,
    spec: &'a ExperimentSpec,
    job_seed: u64,
    input_dim: usize,
    feature_columns: &'a [String],
    target_column: &'a str,
    train_samples: usize,
    test_samples: usize,
}

#[derive(Serialize)]
struct MetricsFile<'a> {
    #[serde(flatten)]
    metrics: &'a MetricsReport,
    normalized_mse: f64,
}

/// Split → scale → window → train → predict → invert → evaluate. When `runs_root` is
/// given, artifacts are written to `runs_root/<run_id>/`.
pub fn run_experiment(
    spec: &ExperimentSpec,
    data: &AlignedFrame,
    runs_root: Option<&Path>,
) -> Result<ExperimentResult> {
    let started = Instant::now();
    let prep = prepare(spec, data)?;
    let job_seed = spec.job_seed();
    let init = init_params(&prep.config, job_seed).stage("initialize")?;
    let mut tcfg = spec.training.clone();
    tcfg.seed = job_seed;
    let (params, history) = train(&init, &prep.config, &prep.train, &tcfg).stage("train")?;
    let scaled_pred = predict(&params, &prep.config, &prep.test.inputs).stage("predict")?;
    let normalized_mse = crate::nn::mse_loss(&scaled_pred, &prep.test.targets).stage("evaluate")?;
    let predicted = invert_scaler(&scaled_pred, &prep.target_column, &prep.scaler).stage("invert scale")?;
    let metrics = evaluate(&prep.test_actual, &predicted).stage("evaluate")?;

    let result = ExperimentResult {
        spec: spec.clone(),
        run_id: spec.run_id(),
        job_seed,
        feature_columns: prep.feature_columns,
        target_column: prep.target_column,
        metrics,
        normalized_mse,
        dates: prep.test.sample_dates.clone(),
        actual: prep.test_actual,
        predicted,
        history,
        scaler: prep.scaler,
        model: LstmModel { config: prep.config, params, seed: job_seed },
        duration: started.elapsed(),
        run_dir: None,
    };
    match runs_root {
        Some(root) => {
            let dir = root.join(&result.run_id);
            persist(&result, &dir, prep.train.len()).stage("persist")?;
            Ok(ExperimentResult { run_dir: Some(dir), ..result })
        }
        None => Ok(result),
    }
}

fn persist(result: &ExperimentResult, dir: &Path, train_samples: usize) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_json(
        &dir.join("spec.json"),
        &RunManifest {
            run_id: &result.run_id,
            spec: &result.spec,
            job_seed: result.job_seed,
            input_dim: result.model.config.input_dim,
            feature_columns: &result.feature_columns,
            target_column: &result.target_column,
            train_samples,
            test_samples: result.predicted.len(),
        },
    )?;
    write_json(&dir.join("scaler.json"), &result.scaler)?;
    result.model.save(&dir.join("checkpoint.bin"))?;
    write_atomic(&dir.join("predictions.csv"), predictions_csv(result).as_bytes())?;
    write_json(
        &dir.join("metrics.json"),
        &MetricsFile { metrics: &result.metrics, normalized_mse: result.normalized_mse },
    )?;
    write_atomic(&dir.join("history.csv"), result.history.to_csv().as_bytes())?;
    super::render_prediction_plot(result, &dir.join("plot.svg"))?;
    Ok(())
}

pub fn predictions_csv(result: &ExperimentResult) -> String {
    let mut out = String::from("date,actual,predicted\n");
    for ((d, a), p) in result.dates.iter().zip(&result.actual).zip(&result.predicted) {
        out.push_str(&format!("{d},{a},{p}\n"));
    }
    out
}

/// Metrics of one spec replicated over several seeds, with per-metric medians.
#[derive(Debug, Clone)]
pub struct ReplicateSummary {
    pub seeds: Vec<u64>,
    pub runs: Vec<ExperimentResult>,
    pub median: MetricsReport,
    pub median_normalized_mse: f64,
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

pub fn run_replicates(
    spec: &ExperimentSpec,
    data: &AlignedFrame,
    seeds: &[u64],
    runs_root: Option<&Path>,
) -> Result<ReplicateSummary> {
    use rayon::prelude::*;
    if seeds.is_empty() {
        return Err(Error::Config("at least one seed is required".into()));
    }
    let runs =
        seeds.par_iter().map(|&s| run_experiment(&spec.with_seed(s), data, runs_root)).collect::<Result<Vec<_>>>()?;
    let col = |f: fn(&MetricsReport) -> f64| median(&runs.iter().map(|r| f(&r.metrics)).collect::<Vec<_>>());
    let median_metrics = MetricsReport {
        scale: runs[0].metrics.scale,
        mse: col(|m| m.mse),
        rmse: col(|m| m.rmse),
        mae: col(|m| m.mae),
        mape: col(|m| m.mape),
    };
    let median_normalized_mse = median(&runs.iter().map(|r| r.normalized_mse).collect::<Vec<_>>());
    Ok(ReplicateSummary { seeds: seeds.to_vec(), runs, median: median_metrics, median_normalized_mse })
}
