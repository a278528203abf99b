//! `oilcast` command-line front end.

mod commands;
mod config;
mod load;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use config::FileConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_PIPELINE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "oilcast", version, about = "Correlate, forecast and ablate daily market series")]
#[command(arg_required_else_help = true)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON file whose keys match the long flag names.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Where results are written [default: out]
    #[arg(long, global = true, value_name = "DIR")]
    pub out_dir: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Download daily bars into the local cache.
    Fetch(FetchArgs),
    /// Full-period correlation matrix and heatmap, optionally windowed.
    Corr(CorrArgs),
    /// Autocorrelation of one column, optionally suggesting a lookback.
    Acf(AcfArgs),
    /// Train and evaluate one experiment spec.
    Train(TrainArgs),
    /// Run every variant of a spec and print the comparison table.
    Ablate(TrainArgs),
    /// Summarize a finished run directory.
    Report(ReportArgs),
    /// Write a seeded synthetic seven-instrument universe as bar files.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct FetchArgs {
    /// Symbols to fetch; defaults to the configured symbol set.
    pub symbols: Vec<String>,
    /// Named symbol set used when no symbols are given [default: oil]
    #[arg(long)]
    pub symbol_set: Option<String>,
    /// Overrides the environment variable and config file.
    #[arg(long)]
    pub api_key: Option<String>,
    #[arg(long)]
    pub base_url: Option<String>,
    /// [default: <out-dir>/cache]
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Minimum spacing between requests [default: 12000]
    #[arg(long)]
    pub request_interval_ms: Option<u64>,
    /// `compact` or `full` [default: full]
    #[arg(long)]
    pub output_size: Option<String>,
    /// Provider function [default: TIME_SERIES_DAILY]
    #[arg(long)]
    pub function: Option<String>,
    /// Ignore cached series.
    #[arg(long)]
    pub refresh: bool,
}

#[derive(Debug, Args)]
pub struct CorrArgs {
    /// Bar files, frame files or directories of them.
    #[arg(required = true)]
    pub paths: Vec<PathBuf>,
    /// Columns to correlate [default: every `.close` column]
    #[arg(long, value_delimiter = ',')]
    pub columns: Option<Vec<String>>,
    /// Also correlate every pair over non-overlapping windows.
    #[arg(long)]
    pub windowed: bool,
    /// [default: 40]
    #[arg(long)]
    pub window_len: Option<usize>,
    /// Use the n-1 variance for window statistics.
    #[arg(long)]
    pub sample_variance: bool,
}

#[derive(Debug, Args)]
pub struct AcfArgs {
    pub column: String,
    #[arg(long, required = true, num_args = 1..)]
    pub data: Vec<PathBuf>,
    /// [default: 60]
    #[arg(long)]
    pub max_lag: Option<usize>,
    #[arg(long)]
    pub suggest: bool,
    /// [default: 0.5]
    #[arg(long)]
    pub threshold: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// Run file: data paths, target, variant(s), dates, model and training settings.
    pub spec: PathBuf,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// A run directory (`<out-dir>/runs/<id>`).
    pub run: PathBuf,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 1000)]
    pub rows: usize,
}

/// How a command failed, which decides the exit code.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Pipeline(String),
}

impl From<oilcast_core::Error> for Failure {
    fn from(e: oilcast_core::Error) -> Self {
        Failure::Pipeline(e.to_string())
    }
}

/// Parses `argv`, runs the command and returns the process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match commands::dispatch(cli) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Pipeline(msg)) => {
            eprintln!("error: {msg}");
            EXIT_PIPELINE
        }
    }
}
