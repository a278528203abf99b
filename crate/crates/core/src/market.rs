//! Daily-series client for an Alpha Vantage style REST endpoint, with an on-disk
//! CSV cache and a minimum spacing between requests.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use chrono::{DateTime, NaiveDate, Utc};
use serde::{Deserialize, Serialize};

use crate::data::{parse_csv, serialize_csv, OhlcvBar, OhlcvSeries};
use crate::error::{Error, Result};
use crate::io::{read_to_string, write_atomic, write_json};

pub const DEFAULT_BASE_URL: &str = "https://www.alphavantage.co/query";
pub const API_KEY_ENV: &str = "ALPHAVANTAGE_API_KEY";

/// Symbols of the oil/macro universe studied by default.
pub const OIL_SYMBOL_SET: [&str; 7] = ["FP.PA", "CNE.L", "BP.L", "SLB.PA", "WTI", "GOLD", "USD"];

/// Provider rate-limit notes carry no retry hint; the free tier resets per minute.
const DEFAULT_RETRY_AFTER_SECS: u64 = 60;

/// API key that never prints.
#[derive(Clone, Default, PartialEq, Eq)]
pub struct ApiKey(String);

impl ApiKey {
    pub fn new(key: impl Into<String>) -> Self {
        ApiKey(key.into())
    }

    pub fn expose(&self) -> &str {
        &self.0
    }

    fn redact(&self, text: &str) -> String {
        if self.0.is_empty() {
            text.to_string()
        } else {
            text.replace(&self.0, "***")
        }
    }
}

impl fmt::Debug for ApiKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ApiKey(***)")
    }
}

#[derive(Debug, Clone)]
pub struct ProviderConfig {
    pub base_url: String,
    pub api_key: ApiKey,
    pub request_interval: Duration,
    pub cache_dir: PathBuf,
    /// `TIME_SERIES_DAILY` (unadjusted) unless configured otherwise.
    pub function: String,
    /// `compact` or `full`.
    pub output_size: String,
    /// Ignore a warm cache and always hit the network.
    pub refresh: bool,
    pub timeout: Duration,
}

impl ProviderConfig {
    pub fn new(api_key: ApiKey, cache_dir: impl Into<PathBuf>) -> Self {
        ProviderConfig {
            base_url: DEFAULT_BASE_URL.to_string(),
            api_key,
            request_interval: Duration::from_millis(12_000),
            cache_dir: cache_dir.into(),
            function: "TIME_SERIES_DAILY".into(),
            output_size: "full".into(),
            refresh: false,
            timeout: Duration::from_secs(30),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheMeta {
    pub symbol: String,
    pub fetched_at: DateTime<Utc>,
}

/// A cached series: metadata plus its canonical CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct CacheEntry {
    pub meta: CacheMeta,
    pub csv: String,
}

fn cache_stem(symbol: &str) -> String {
    symbol.chars().map(|c| if c.is_ascii_alphanumeric() || matches!(c, '.' | '-' | '_') { c } else { '_' }).collect()
}

pub fn cache_paths(cache_dir: &Path, symbol: &str) -> (PathBuf, PathBuf) {
    let stem = cache_stem(symbol);
    (cache_dir.join(format!("{stem}.csv")), cache_dir.join(format!("{stem}.meta.json")))
}

pub fn read_cache(cache_dir: &Path, symbol: &str) -> Result<Option<CacheEntry>> {
    let (csv_path, meta_path) = cache_paths(cache_dir, symbol);
    if !csv_path.exists() || !meta_path.exists() {
        return Ok(None);
    }
    let meta: CacheMeta = serde_json::from_str(&read_to_string(&meta_path)?)?;
    Ok(Some(CacheEntry { meta, csv: read_to_string(&csv_path)? }))
}

pub fn write_cache(cache_dir: &Path, series: &OhlcvSeries) -> Result<CacheEntry> {
    let (csv_path, meta_path) = cache_paths(cache_dir, &series.symbol);
    let entry = CacheEntry {
        meta: CacheMeta { symbol: series.symbol.clone(), fetched_at: Utc::now() },
        csv: serialize_csv(series),
    };
    write_atomic(&csv_path, entry.csv.as_bytes())?;
    write_json(&meta_path, &entry.meta)?;
    Ok(entry)
}

#[derive(Deserialize)]
struct DailyBar {
    #[serde(rename = "1. open")]
    open: String,
    #[serde(rename = "2. high")]
    high: String,
    #[serde(rename = "3. low")]
    low: String,
    #[serde(rename = "4. close")]
    close: String,
    #[serde(flatten)]
    rest: BTreeMap<String, serde_json::Value>,
}

/// Parses the provider's JSON envelope. Error and rate-limit payloads map to typed errors.
pub fn parse_daily_payload(symbol: &str, body: &str) -> Result<OhlcvSeries> {
    let value: serde_json::Value =
        serde_json::from_str(body).map_err(|e| Error::MalformedPayload(format!("not JSON: {e}")))?;
    let obj = value.as_object().ok_or_else(|| Error::MalformedPayload("top level is not an object".into()))?;
    if let Some(msg) = obj.get("Error Message") {
        return Err(Error::Provider(msg.as_str().unwrap_or_default().to_string()));
    }
    for key in ["Note", "Information"] {
        if let Some(msg) = obj.get(key) {
            return Err(Error::RateLimited {
                retry_after_secs: DEFAULT_RETRY_AFTER_SECS,
                message: msg.as_str().unwrap_or_default().to_string(),
            });
        }
    }
    let series = obj
        .iter()
        .find(|(k, _)| k.starts_with("Time Series"))
        .map(|(_, v)| v)
        .ok_or_else(|| Error::MalformedPayload("missing `Time Series (Daily)`".into()))?;
    let days: BTreeMap<String, DailyBar> =
        serde_json::from_value(series.clone()).map_err(|e| Error::MalformedPayload(format!("bad daily bar: {e}")))?;
    let num = |date: &str, field: &str, s: &str| -> Result<f64> {
        s.trim().parse::<f64>().map_err(|_| Error::MalformedPayload(format!("{date}: bad {field} `{s}`")))
    };
    let mut bars = Vec::with_capacity(days.len());
    for (date, bar) in &days {
        let parsed = NaiveDate::parse_from_str(date, "%Y-%m-%d")
            .map_err(|_| Error::MalformedPayload(format!("bad date `{date}`")))?;
        let volume = bar
            .rest
            .iter()
            .find(|(k, _)| k.ends_with("volume"))
            .and_then(|(_, v)| v.as_str())
            .map(|v| num(date, "volume", v))
            .transpose()?;
        bars.push(OhlcvBar {
            date: parsed,
            open: num(date, "open", &bar.open)?,
            high: num(date, "high", &bar.high)?,
            low: num(date, "low", &bar.low)?,
            close: num(date, "close", &bar.close)?,
            volume,
        });
    }
    OhlcvSeries::new(symbol, bars)
}

/// Serializes outbound requests and spaces them at least `request_interval` apart.
pub struct MarketClient {
    config: ProviderConfig,
    agent: ureq::Agent,
    last_request: Mutex<Option<Instant>>,
}

impl MarketClient {
    pub fn new(config: ProviderConfig) -> Self {
        let agent: ureq::Agent = ureq::Agent::config_builder()
            .http_status_as_error(false)
            .timeout_global(Some(config.timeout))
            .build()
            .into();
        MarketClient { config, agent, last_request: Mutex::new(None) }
    }

    pub fn config(&self) -> &ProviderConfig {
        &self.config
    }

    /// Returns the cached series when present (unless `refresh`), otherwise fetches,
    /// parses and writes through to the cache.
    pub fn fetch_daily(&self, symbol: &str) -> Result<OhlcvSeries> {
        if !self.config.refresh {
            if let Some(entry) = read_cache(&self.config.cache_dir, symbol)? {
                return parse_csv(symbol, entry.csv.as_bytes());
            }
        }
        let body = self.request(symbol)?;
        let series = parse_daily_payload(symbol, &body)?;
        write_cache(&self.config.cache_dir, &series)?;
        Ok(series)
    }

    fn request(&self, symbol: &str) -> Result<String> {
        let mut last = self.last_request.lock().unwrap_or_else(|p| p.into_inner());
        if let Some(prev) = *last {
            let wait = self.config.request_interval.saturating_sub(prev.elapsed());
            if !wait.is_zero() {
                std::thread::sleep(wait);
            }
        }
        *last = Some(Instant::now());
        let key = &self.config.api_key;
        let response = self
            .agent
            .get(&self.config.base_url)
            .query("function", &self.config.function)
            .query("symbol", symbol)
            .query("outputsize", &self.config.output_size)
            .query("apikey", key.expose())
            .call();
        let mut response = response.map_err(|e| Error::Http(key.redact(&e.to_string())))?;
        let status = response.status().as_u16();
        if status == 429 {
            let retry_after_secs = response
                .headers()
                .get("retry-after")
                .and_then(|v| v.to_str().ok())
                .and_then(|v| v.trim().parse().ok())
                .unwrap_or(DEFAULT_RETRY_AFTER_SECS);
            return Err(Error::RateLimited { retry_after_secs, message: "HTTP 429".into() });
        }
        if !(200..300).contains(&status) {
            return Err(Error::Http(format!("HTTP status {status}")));
        }
        response.body_mut().read_to_string().map_err(|e| Error::Http(key.redact(&e.to_string())))
    }
}

/// One-off fetch with a fresh client.
pub fn fetch_daily(symbol: &str, config: &ProviderConfig) -> Result<OhlcvSeries> {
    MarketClient::new(config.clone()).fetch_daily(symbol)
}
