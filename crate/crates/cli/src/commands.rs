use std::path::{Path, PathBuf};
use std::time::Duration;

use chrono::NaiveDate;
use serde::Deserialize;

use oilcast_core::correlation::{
    autocorrelation, correlation_matrix, export_heatmap, histogram_csv, select_lookback, summary_csv,
    windowed_correlations, windows_csv, VarianceForm,
};
use oilcast_core::data::{serialize_csv, AlignedFrame};
use oilcast_core::experiment::{
    run_ablation, run_experiment, run_replicates, ExperimentResult, ExperimentSpec, ModelSpec, Variant,
};
use oilcast_core::io::{read_to_string, write_atomic, write_json};
use oilcast_core::market::{ApiKey, MarketClient, ProviderConfig, API_KEY_ENV};
use oilcast_core::nn::LstmModel;
use oilcast_core::synthetic::demo_universe;
use oilcast_core::train::{MetricsReport, TrainConfig};
use oilcast_core::Error;

use crate::config::{symbol_set, FileConfig};
use crate::load::load_frame;
use crate::{AcfArgs, Cli, Command, CorrArgs, Failure, FetchArgs, ReportArgs, SynthArgs, TrainArgs};

struct Context {
    file: FileConfig,
    seed: Option<u64>,
    out_dir: PathBuf,
}

impl Context {
    fn ensure_out_dir(&self) -> Result<&Path, Failure> {
        std::fs::create_dir_all(&self.out_dir)
            .map_err(|e| Failure::Pipeline(format!("cannot create {}: {e}", self.out_dir.display())))?;
        Ok(&self.out_dir)
    }

    fn write(&self, name: &str, contents: &str) -> Result<PathBuf, Failure> {
        let path = self.ensure_out_dir()?.join(name);
        write_atomic(&path, contents.as_bytes())?;
        Ok(path)
    }
}

pub fn dispatch(cli: Cli) -> Result<(), Failure> {
    let file = match &cli.global.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let seed = cli.global.seed.or(file.seed);
    let out_dir = cli.global.out_dir.clone().or_else(|| file.out_dir.clone()).unwrap_or_else(|| "out".into());
    let ctx = Context { file, seed, out_dir };
    match cli.command {
        Command::Fetch(args) => fetch(&ctx, args),
        Command::Corr(args) => corr(&ctx, args),
        Command::Acf(args) => acf(&ctx, args),
        Command::Train(args) => train(&ctx, args),
        Command::Ablate(args) => ablate(&ctx, args),
        Command::Report(args) => report(args),
        Command::Synth(args) => synth(&ctx, args),
    }
}

fn fetch(ctx: &Context, args: FetchArgs) -> Result<(), Failure> {
    let f = &ctx.file;
    let symbols = if args.symbols.is_empty() {
        let set = args.symbol_set.or_else(|| f.symbol_set.clone()).unwrap_or_else(|| "oil".into());
        symbol_set(&set).ok_or_else(|| Failure::Usage(format!("unknown symbol set `{set}`")))?
    } else {
        args.symbols
    };
    let key = args
        .api_key
        .or_else(|| f.api_key.clone())
        .or_else(|| std::env::var(API_KEY_ENV).ok().filter(|k| !k.is_empty()))
        .ok_or_else(|| {
            Failure::Usage(format!("no API key: set {API_KEY_ENV}, `api-key` in the config file, or --api-key"))
        })?;
    let cache_dir = args.cache_dir.or_else(|| f.cache_dir.clone()).unwrap_or_else(|| ctx.out_dir.join("cache"));
    let mut cfg = ProviderConfig::new(ApiKey::new(key), cache_dir);
    if let Some(url) = args.base_url.or_else(|| f.base_url.clone()) {
        cfg.base_url = url;
    }
    if let Some(ms) = args.request_interval_ms.or(f.request_interval_ms) {
        cfg.request_interval = Duration::from_millis(ms);
    }
    if let Some(size) = args.output_size.or_else(|| f.output_size.clone()) {
        cfg.output_size = size;
    }
    if let Some(function) = args.function.or_else(|| f.function.clone()) {
        cfg.function = function;
    }
    cfg.refresh = args.refresh || f.refresh.unwrap_or(false);
    std::fs::create_dir_all(&cfg.cache_dir)
        .map_err(|e| Failure::Pipeline(format!("cannot create {}: {e}", cfg.cache_dir.display())))?;

    let client = MarketClient::new(cfg);
    let mut failed = Vec::new();
    for symbol in &symbols {
        match client.fetch_daily(symbol) {
            Ok(series) => {
                let first = series.bars().first().map(|b| b.date.to_string()).unwrap_or_default();
                let last = series.bars().last().map(|b| b.date.to_string()).unwrap_or_default();
                println!("{symbol}: {} bars {first}..{last}", series.len());
            }
            Err(e) => {
                eprintln!("{symbol}: {e}");
                failed.push(symbol.as_str());
            }
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Pipeline(format!("fetch failed for {}", failed.join(", "))))
    }
}

fn default_columns(frame: &AlignedFrame) -> Vec<String> {
    let closes: Vec<String> = frame.column_names().iter().filter(|c| c.ends_with(".close")).cloned().collect();
    if closes.is_empty() {
        frame.column_names().to_vec()
    } else {
        closes
    }
}

fn corr(ctx: &Context, args: CorrArgs) -> Result<(), Failure> {
    let frame = load_frame(&args.paths)?;
    let columns = args.columns.or_else(|| ctx.file.columns.clone()).unwrap_or_else(|| default_columns(&frame));
    let matrix = correlation_matrix(&frame, &columns)?;
    let csv_path = ctx.write("corr_matrix.csv", &matrix.to_csv())?;
    let svg_path = ctx.ensure_out_dir()?.join("heatmap.svg");
    export_heatmap(&matrix, &svg_path)?;
    println!("{} columns x {} rows", columns.len(), frame.len());
    println!("wrote {}", csv_path.display());
    println!("wrote {}", svg_path.display());

    if args.windowed {
        let window_len = args.window_len.or(ctx.file.window_len).unwrap_or(40);
        let form = if args.sample_variance || ctx.file.sample_variance.unwrap_or(false) {
            VarianceForm::Sample
        } else {
            VarianceForm::Population
        };
        let mut reports = Vec::new();
        for (i, a) in columns.iter().enumerate() {
            for b in &columns[i + 1..] {
                let report = windowed_correlations((a, b), frame.column(a)?, frame.column(b)?, window_len, form)?;
                println!(
                    "{a} ~ {b}: {} windows ({} skipped), median {:.3}",
                    report.total_windows, report.skipped_windows, report.stats.median
                );
                reports.push(report);
            }
        }
        for (name, body) in [
            ("windows.csv", windows_csv(&reports)),
            ("summary.csv", summary_csv(&reports)),
            ("histogram.csv", histogram_csv(&reports)),
        ] {
            println!("wrote {}", ctx.write(name, &body)?.display());
        }
    }
    Ok(())
}

fn acf(ctx: &Context, args: AcfArgs) -> Result<(), Failure> {
    let frame = load_frame(&args.data)?;
    let values = frame.column(&args.column)?;
    let max_lag = args.max_lag.or(ctx.file.max_lag).unwrap_or(60);
    let report = autocorrelation(&args.column, values, max_lag)?;
    println!("wrote {}", ctx.write("acf.csv", &report.to_csv())?.display());
    if args.suggest {
        let threshold = args.threshold.or(ctx.file.threshold).unwrap_or(0.5);
        let suggestion = select_lookback(&report, threshold)?;
        let path = ctx.ensure_out_dir()?.join("lookback.json");
        write_json(&path, &suggestion)?;
        println!("suggested lookback for {}: {} (threshold {threshold})", args.column, suggestion.lookback);
        println!("wrote {}", path.display());
    }
    Ok(())
}

/// Experiment description read by `train` and `ablate`. Data paths are relative to the file.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunFile {
    data: Vec<PathBuf>,
    target: String,
    #[serde(default)]
    variant: Option<Variant>,
    /// Ablation variants; defaults to Main plus every other instrument in the data.
    #[serde(default)]
    variants: Vec<Variant>,
    #[serde(default)]
    augment_ohlc: bool,
    train_last: NaiveDate,
    test_first: NaiveDate,
    test_last: NaiveDate,
    #[serde(default)]
    model: ModelSpec,
    #[serde(default)]
    training: TrainConfig,
    /// Replicate seeds for `train`; the median of each metric is reported.
    #[serde(default)]
    seeds: Vec<u64>,
}

struct Loaded {
    run: RunFile,
    base: ExperimentSpec,
    frame: AlignedFrame,
}

fn load_run_file(ctx: &Context, path: &Path) -> Result<Loaded, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::Usage(format!("cannot read spec {}: {e}", path.display())))?;
    let run: RunFile =
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid spec {}: {e}", path.display())))?;
    let root = path.parent().unwrap_or(Path::new("."));
    let data: Vec<PathBuf> = run.data.iter().map(|p| root.join(p)).collect();
    let frame = load_frame(&data)?;
    let mut training = run.training.clone();
    if let Some(seed) = ctx.seed {
        training.seed = seed;
    }
    let base = ExperimentSpec {
        target: run.target.clone(),
        variant: run.variant.clone().unwrap_or(Variant::Main),
        augment_ohlc: run.augment_ohlc,
        train_last: run.train_last,
        test_first: run.test_first,
        test_last: run.test_last,
        model: run.model,
        training,
    };
    Ok(Loaded { run, base, frame })
}

fn metrics_line(m: &MetricsReport) -> String {
    format!("MSE {:.6}  RMSE {:.6}  MAE {:.6}  MAPE {:.4}%", m.mse, m.rmse, m.mae, m.mape)
}

fn announce(result: &ExperimentResult) {
    println!("{} [{}] {}", result.spec.variant, result.run_id, metrics_line(&result.metrics));
    if let Some(dir) = &result.run_dir {
        println!("  artifacts: {}", dir.display());
    }
}

fn train(ctx: &Context, args: TrainArgs) -> Result<(), Failure> {
    let Loaded { run, base, frame } = load_run_file(ctx, &args.spec)?;
    let runs = ctx.ensure_out_dir()?.join("runs");
    if run.seeds.is_empty() {
        announce(&run_experiment(&base, &frame, Some(&runs))?);
    } else {
        let summary = run_replicates(&base, &frame, &run.seeds, Some(&runs))?;
        for r in &summary.runs {
            print!("seed {}: ", r.spec.training.seed);
            announce(r);
        }
        println!("median over {} seeds: {}", summary.seeds.len(), metrics_line(&summary.median));
    }
    Ok(())
}

fn default_variants(frame: &AlignedFrame, target: &str) -> Vec<Variant> {
    let mut variants = vec![Variant::Main];
    for name in frame.column_names() {
        if let Some(symbol) = name.strip_suffix(".close") {
            if symbol != target {
                variants.push(Variant::With(symbol.to_string()));
            }
        }
    }
    variants
}

fn ablate(ctx: &Context, args: TrainArgs) -> Result<(), Failure> {
    let Loaded { run, base, frame } = load_run_file(ctx, &args.spec)?;
    let variants = if run.variants.is_empty() { default_variants(&frame, &base.target) } else { run.variants };
    let specs: Vec<ExperimentSpec> = variants.into_iter().map(|v| base.with_variant(v)).collect();
    let out = ctx.ensure_out_dir()?.to_path_buf();
    let (table, results) = run_ablation(&specs, &frame, Some(&out.join("runs")))?;
    for r in &results {
        announce(r);
    }
    let text = table.to_text();
    print!("{text}");
    println!("wrote {}", ctx.write("ablation.csv", &table.to_csv())?.display());
    println!("wrote {}", ctx.write("ablation.txt", &text)?.display());
    if table.has_failures() {
        let failed = table.rows.iter().filter(|r| r.error.is_some()).count();
        return Err(Failure::Pipeline(format!("{failed} of {} variants failed", table.rows.len())));
    }
    Ok(())
}

fn report(args: ReportArgs) -> Result<(), Failure> {
    let dir = &args.run;
    let json = |name: &str| -> Result<serde_json::Value, Failure> {
        let text = read_to_string(&dir.join(name))?;
        serde_json::from_str(&text).map_err(|e| Failure::Pipeline(Error::from(e).to_string()))
    };
    let manifest = json("spec.json")?;
    let metrics = json("metrics.json")?;
    let model = LstmModel::load(&dir.join("checkpoint.bin"))?;
    let history = read_to_string(&dir.join("history.csv"))?;
    let spec = &manifest["spec"];
    println!("run {}", manifest["run_id"].as_str().unwrap_or("?"));
    println!(
        "target   {} ({})",
        spec["target"].as_str().unwrap_or("?"),
        manifest["target_column"].as_str().unwrap_or("?")
    );
    println!("variant  {}", spec["variant"]);
    println!("features {}", manifest["feature_columns"]);
    println!(
        "test     {} .. {} ({} samples)",
        spec["test_first"].as_str().unwrap_or("?"),
        spec["test_last"].as_str().unwrap_or("?"),
        manifest["test_samples"]
    );
    println!(
        "model    F={} H={} L={} D={} dropout={} ({} parameters)",
        model.config.input_dim,
        model.config.hidden_dim,
        model.config.lookback,
        model.config.dense_dim,
        model.config.dropout_rate,
        model.params.scalar_count()
    );
    let epochs = history.lines().count().saturating_sub(1);
    if let Some(last) = history.lines().last().filter(|_| epochs > 0) {
        println!("history  {epochs} epochs, last `{last}` (epoch,train_loss,val_loss)");
    }
    for key in ["mse", "rmse", "mae", "mape", "normalized_mse"] {
        println!("{key:<15}{}", metrics[key]);
    }
    Ok(())
}

fn synth(ctx: &Context, args: SynthArgs) -> Result<(), Failure> {
    let universe = demo_universe(args.rows, ctx.seed.unwrap_or(0))?;
    for series in &universe {
        let path = ctx.write(&format!("{}.csv", series.symbol), &serialize_csv(series))?;
        println!("wrote {}", path.display());
    }
    Ok(())
}
