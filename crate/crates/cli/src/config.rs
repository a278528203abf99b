use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::Failure;

/// JSON config file. Keys mirror the long flag names.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(rename_all = "kebab-case", deny_unknown_fields)]
pub struct FileConfig {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub api_key: Option<String>,
    pub base_url: Option<String>,
    pub cache_dir: Option<PathBuf>,
    pub request_interval_ms: Option<u64>,
    pub refresh: Option<bool>,
    pub symbol_set: Option<String>,
    pub output_size: Option<String>,
    pub function: Option<String>,
    pub window_len: Option<usize>,
    pub columns: Option<Vec<String>>,
    pub sample_variance: Option<bool>,
    pub max_lag: Option<usize>,
    pub threshold: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<FileConfig, Failure> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Failure::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| Failure::Usage(format!("invalid config {}: {e}", path.display())))
    }
}

/// Named symbol sets for `fetch`.
pub fn symbol_set(name: &str) -> Option<Vec<String>> {
    match name {
        "oil" => Some(oilcast_core::market::OIL_SYMBOL_SET.iter().map(|s| s.to_string()).collect()),
        _ => None,
    }
}
