use std::io::{BufRead, BufReader, Write};
use std::net::{TcpListener, TcpStream};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};
use std::thread;
use std::time::{Duration, Instant};

use oilcast_core::market::{cache_paths, ApiKey, MarketClient, ProviderConfig};
use oilcast_core::Error;

const FIXTURE: &str = include_str!("fixtures/daily_3.json");
const KEY: &str = "stub-key-7f3a9c";

struct Stub {
    url: String,
    hits: Arc<AtomicUsize>,
    arrivals: Arc<Mutex<Vec<Instant>>>,
    paths: Arc<Mutex<Vec<String>>>,
}

/// Minimal HTTP/1.1 server answering every request with the same status and body.
fn serve(status: u16, extra_headers: &'static str, body: &'static str) -> Stub {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let url = format!("http://{}/query", listener.local_addr().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let arrivals = Arc::new(Mutex::new(Vec::new()));
    let paths = Arc::new(Mutex::new(Vec::new()));
    let (h, a, p) = (hits.clone(), arrivals.clone(), paths.clone());
    thread::spawn(move || {
        for stream in listener.incoming() {
            let Ok(stream) = stream else { continue };
            a.lock().unwrap().push(Instant::now());
            h.fetch_add(1, Ordering::SeqCst);
            if let Some(path) = answer(stream, status, extra_headers, body) {
                p.lock().unwrap().push(path);
            }
        }
    });
    Stub { url, hits, arrivals, paths }
}

fn answer(stream: TcpStream, status: u16, extra_headers: &str, body: &str) -> Option<String> {
    let mut reader = BufReader::new(stream.try_clone().ok()?);
    let mut request_line = String::new();
    reader.read_line(&mut request_line).ok()?;
    loop {
        let mut line = String::new();
        if reader.read_line(&mut line).ok()? == 0 || line == "\r\n" {
            break;
        }
    }
    let mut stream = stream;
    let reason = if status == 200 { "OK" } else { "Error" };
    let response = format!(
        "HTTP/1.1 {status} {reason}\r\nContent-Type: application/json\r\nContent-Length: {}\r\nConnection: close\r\n{extra_headers}\r\n{body}",
        body.len()
    );
    stream.write_all(response.as_bytes()).ok()?;
    request_line.split_whitespace().nth(1).map(str::to_string)
}

fn config(url: &str, cache: &std::path::Path) -> ProviderConfig {
    let mut cfg = ProviderConfig::new(ApiKey::new(KEY), cache);
    cfg.base_url = url.to_string();
    cfg.request_interval = Duration::ZERO;
    cfg.timeout = Duration::from_secs(5);
    cfg
}

fn unreachable_url() -> String {
    let listener = TcpListener::bind("127.0.0.1:0").unwrap();
    let addr = listener.local_addr().unwrap();
    drop(listener);
    format!("http://{addr}/query")
}

#[test]
fn stub_fixture_parses_into_three_ascending_bars() {
    let stub = serve(200, "", FIXTURE);
    let cache = tempfile::tempdir().unwrap();
    let series = MarketClient::new(config(&stub.url, cache.path())).fetch_daily("BP.L").unwrap();

    assert_eq!(series.len(), 3);
    let dates: Vec<String> = series.dates().map(|d| d.to_string()).collect();
    assert_eq!(dates, ["2019-01-02", "2019-01-03", "2019-01-04"]);
    assert_eq!(series.closes(), vec![501.7, 497.5, 510.3]);
    assert_eq!(series.bars()[2].volume, Some(41210822.0));

    let path = stub.paths.lock().unwrap()[0].clone();
    for part in ["function=TIME_SERIES_DAILY", "symbol=BP.L", "outputsize=full", &format!("apikey={KEY}")] {
        assert!(path.contains(part), "{path} lacks {part}");
    }
}

#[test]
fn warm_cache_serves_identical_series_without_network() {
    let stub = serve(200, "", FIXTURE);
    let cache = tempfile::tempdir().unwrap();
    let first = MarketClient::new(config(&stub.url, cache.path())).fetch_daily("BP.L").unwrap();
    assert_eq!(stub.hits.load(Ordering::SeqCst), 1);

    let second = MarketClient::new(config(&unreachable_url(), cache.path())).fetch_daily("BP.L").unwrap();
    assert_eq!(first, second);
    assert_eq!(oilcast_core::data::serialize_csv(&first), oilcast_core::data::serialize_csv(&second));
}

#[test]
fn refresh_bypasses_cache() {
    let stub = serve(200, "", FIXTURE);
    let cache = tempfile::tempdir().unwrap();
    let mut cfg = config(&stub.url, cache.path());
    cfg.refresh = true;
    let client = MarketClient::new(cfg);
    client.fetch_daily("BP.L").unwrap();
    client.fetch_daily("BP.L").unwrap();
    assert_eq!(stub.hits.load(Ordering::SeqCst), 2);
}

#[test]
fn rate_limit_payload_is_typed_and_leaves_cache_untouched() {
    let stub = serve(
        200,
        "",
        r#"{"Note": "Thank you for using Alpha Vantage! Our standard API call frequency is 5 calls per minute and 500 calls per day."}"#,
    );
    let cache = tempfile::tempdir().unwrap();
    let err = MarketClient::new(config(&stub.url, cache.path())).fetch_daily("BP.L").unwrap_err();
    assert!(matches!(err, Error::RateLimited { retry_after_secs: 60, .. }), "{err:?}");
    assert_eq!(std::fs::read_dir(cache.path()).unwrap().count(), 0);
}

#[test]
fn rate_limit_does_not_clobber_existing_cache() {
    let good = serve(200, "", FIXTURE);
    let cache = tempfile::tempdir().unwrap();
    MarketClient::new(config(&good.url, cache.path())).fetch_daily("BP.L").unwrap();
    let (csv_path, meta_path) = cache_paths(cache.path(), "BP.L");
    let before = (std::fs::read(&csv_path).unwrap(), std::fs::read(&meta_path).unwrap());

    let limited = serve(429, "Retry-After: 17\r\n", "{}");
    let mut cfg = config(&limited.url, cache.path());
    cfg.refresh = true;
    let err = MarketClient::new(cfg).fetch_daily("BP.L").unwrap_err();
    assert!(matches!(err, Error::RateLimited { retry_after_secs: 17, .. }), "{err:?}");
    assert_eq!(before, (std::fs::read(&csv_path).unwrap(), std::fs::read(&meta_path).unwrap()));
}

#[test]
fn provider_error_and_malformed_payloads() {
    let cache = tempfile::tempdir().unwrap();
    let stub = serve(200, "", r#"{"Error Message": "Invalid API call. Please retry or visit the documentation."}"#);
    let err = MarketClient::new(config(&stub.url, cache.path())).fetch_daily("NOPE").unwrap_err();
    assert!(matches!(err, Error::Provider(_)), "{err:?}");

    let stub = serve(200, "", r#"{"Time Series (Daily)": {"2019-01-02": {"1. open": "x"}}}"#);
    let err = MarketClient::new(config(&stub.url, cache.path())).fetch_daily("BAD").unwrap_err();
    assert!(matches!(err, Error::MalformedPayload(_)), "{err:?}");

    let stub = serve(500, "", "oops");
    let err = MarketClient::new(config(&stub.url, cache.path())).fetch_daily("BAD").unwrap_err();
    assert!(matches!(err, Error::Http(_)), "{err:?}");
}

#[test]
fn requests_are_spaced_by_the_interval() {
    let stub = serve(200, "", FIXTURE);
    let cache = tempfile::tempdir().unwrap();
    let mut cfg = config(&stub.url, cache.path());
    cfg.refresh = true;
    cfg.request_interval = Duration::from_millis(150);
    let client = Arc::new(MarketClient::new(cfg));

    let handles: Vec<_> = (0..4)
        .map(|_| {
            let c = client.clone();
            thread::spawn(move || c.fetch_daily("BP.L").unwrap())
        })
        .collect();
    for h in handles {
        h.join().unwrap();
    }

    let arrivals = stub.arrivals.lock().unwrap().clone();
    assert_eq!(arrivals.len(), 4);
    for pair in arrivals.windows(2) {
        let gap = pair[1].duration_since(pair[0]);
        assert!(gap >= Duration::from_millis(140), "gap {gap:?}");
    }
}

#[test]
fn api_key_never_reaches_the_cache_or_errors() {
    let stub = serve(200, "", FIXTURE);
    let cache = tempfile::tempdir().unwrap();
    MarketClient::new(config(&stub.url, cache.path())).fetch_daily("BP.L").unwrap();
    for entry in std::fs::read_dir(cache.path()).unwrap() {
        let text = std::fs::read_to_string(entry.unwrap().path()).unwrap();
        assert!(!text.contains(KEY));
    }
    let err = MarketClient::new(config(&unreachable_url(), cache.path())).fetch_daily("OTHER").unwrap_err();
    assert!(!err.to_string().contains(KEY), "{err}");
    assert!(!format!("{err:?}").contains(KEY));
}
