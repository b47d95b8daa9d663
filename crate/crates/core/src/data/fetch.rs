use std::path::Path;
use std::time::Duration;

use super::cache::{
    load_cached_series, store_cached_series, CacheMeta, EndpointConfig, FetchOptions,
};
use super::fred::{parse_fred_csv, RawSeries};
use crate::{Error, Result};

/// Fetches the full history for one ticker, consulting the local cache per
/// `options`. Network payloads are written to the cache (raw bytes plus a
/// metadata sidecar) before being parsed, so every run is reproducible from
/// its cache directory.
///
/// `known_tickers` guards against typos: a ticker outside the configured
/// set is a configuration error, not a network round trip.
pub fn fetch_series(
    ticker: &str,
    endpoint: &EndpointConfig,
    cache_dir: &Path,
    options: FetchOptions,
    known_tickers: &[String],
) -> Result<RawSeries> {
    if !known_tickers.iter().any(|t| t == ticker) {
        return Err(Error::Config(format!(
            "unknown ticker {ticker:?}; configured tickers: {}",
            known_tickers.join(", ")
        )));
    }

    if matches!(options, FetchOptions::PreferCache | FetchOptions::Offline) {
        if let Some(series) = load_cached_series(cache_dir, ticker)? {
            return Ok(series);
        }
        if options == FetchOptions::Offline {
            return Err(Error::Fetch {
                ticker: ticker.to_string(),
                message: format!(
                    "offline mode and no cached payload under {}",
                    cache_dir.join(ticker).display()
                ),
            });
        }
    }

    let (url, redacted_url) = endpoint.url_for(ticker);
    let response = ureq::AgentBuilder::new()
        .timeout(Duration::from_secs(60))
        .build()
        .get(&url)
        .call()
        .map_err(|e| Error::Fetch {
            ticker: ticker.to_string(),
            message: e.to_string(),
        })?;
    let mut payload = Vec::new();
    response
        .into_reader()
        .read_to_end(&mut payload)
        .map_err(|e| Error::Fetch {
            ticker: ticker.to_string(),
            message: e.to_string(),
        })?;

    let series = parse_fred_csv(&payload)?;
    if series.ticker() != ticker {
        return Err(Error::Fetch {
            ticker: ticker.to_string(),
            message: format!("endpoint returned series {:?}", series.ticker()),
        });
    }

    let now = chrono::Utc::now();
    let meta = CacheMeta {
        ticker: ticker.to_string(),
        url: redacted_url,
        fetched_at: now.to_rfc3339(),
        content_length: payload.len(),
        rows: series.len(),
    };
    store_cached_series(
        cache_dir,
        &meta,
        &now.format("%Y-%m-%d").to_string(),
        &payload,
    )?;
    Ok(series)
}
