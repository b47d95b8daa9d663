use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::fred::{parse_fred_csv, RawSeries};
use crate::{Error, Result};

/// Where and how to reach the data source.
///
/// `base_url` may contain a `{ticker}` placeholder; otherwise the ticker is
/// appended as `?id=<ticker>`. An `{api_key}` placeholder is substituted
/// from the configured environment variable when present (the public CSV
/// endpoint needs no key).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EndpointConfig {
    pub base_url: String,
    pub api_key_env: String,
}

impl Default for EndpointConfig {
    fn default() -> Self {
        Self {
            base_url: "https://fred.stlouisfed.org/graph/fredgraph.csv?id={ticker}".into(),
            api_key_env: "FRED_API_KEY".into(),
        }
    }
}

impl EndpointConfig {
    /// Resolves the URL for one ticker. The returned `redacted` variant is
    /// safe to persist (the API key placeholder is left unsubstituted).
    pub fn url_for(&self, ticker: &str) -> (String, String) {
        let with_ticker = if self.base_url.contains("{ticker}") {
            self.base_url.replace("{ticker}", ticker)
        } else {
            format!("{}?id={ticker}", self.base_url)
        };
        let redacted = with_ticker.clone();
        let resolved = if with_ticker.contains("{api_key}") {
            match std::env::var(&self.api_key_env) {
                Ok(key) => with_ticker.replace("{api_key}", &key),
                Err(_) => with_ticker,
            }
        } else {
            with_ticker
        };
        (resolved, redacted)
    }
}

/// Cache behavior for [`fetch_series`](super::fetch_series).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FetchOptions {
    /// Use the newest cached payload if present, otherwise download.
    PreferCache,
    /// Never touch the network; error when the cache is cold.
    Offline,
    /// Always download and store a fresh payload.
    Refresh,
}

/// Sidecar metadata stored next to each cached payload.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CacheMeta {
    pub ticker: String,
    pub url: String,
    pub fetched_at: String,
    pub content_length: usize,
    pub rows: usize,
}

/// `<cache_dir>/<ticker>/<fetch-date>.csv`
pub fn cache_series_path(cache_dir: &Path, ticker: &str, fetch_date: &str) -> PathBuf {
    cache_dir.join(ticker).join(format!("{fetch_date}.csv"))
}

/// Newest cached payload for a ticker, parsed. `Ok(None)` when the cache is
/// cold for this ticker.
pub fn load_cached_series(cache_dir: &Path, ticker: &str) -> Result<Option<RawSeries>> {
    let dir = cache_dir.join(ticker);
    if !dir.is_dir() {
        return Ok(None);
    }
    let mut snapshots: Vec<PathBuf> = fs::read_dir(&dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|ext| ext == "csv"))
        .collect();
    if snapshots.is_empty() {
        return Ok(None);
    }
    // Filenames are fetch dates, so lexicographic order is temporal order.
    snapshots.sort();
    let newest = snapshots.last().expect("nonempty");
    let payload = fs::read(newest)?;
    let series = parse_fred_csv(&payload)?;
    if series.ticker() != ticker {
        return Err(Error::Parse(format!(
            "cached payload {} is for {}, expected {ticker}",
            newest.display(),
            series.ticker()
        )));
    }
    Ok(Some(series))
}

/// Stores raw payload bytes plus the metadata sidecar, keyed by ticker and
/// fetch date. Writes go through a temp file and rename, so concurrent
/// fetches of the same ticker serialize on the final name.
pub fn store_cached_series(
    cache_dir: &Path,
    meta: &CacheMeta,
    fetch_date: &str,
    payload: &[u8],
) -> Result<PathBuf> {
    let dir = cache_dir.join(&meta.ticker);
    fs::create_dir_all(&dir)?;
    let final_path = cache_series_path(cache_dir, &meta.ticker, fetch_date);
    let tmp_path = dir.join(format!(".{fetch_date}.csv.tmp-{}", std::process::id()));
    fs::write(&tmp_path, payload)?;
    fs::rename(&tmp_path, &final_path)?;

    let meta_path = dir.join(format!("{fetch_date}.meta.json"));
    let tmp_meta = dir.join(format!(".{fetch_date}.meta.tmp-{}", std::process::id()));
    fs::write(
        &tmp_meta,
        serde_json::to_vec_pretty(meta).expect("meta serializes"),
    )?;
    fs::rename(&tmp_meta, &meta_path)?;
    Ok(final_path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::serialize_fred_csv;

    #[test]
    fn cache_round_trip_and_newest_wins() {
        let dir = tempfile::tempdir().unwrap();
        let old = parse_fred_csv(b"DATE,DGS10\n2020-01-02,1.5\n").unwrap();
        let new = parse_fred_csv(b"DATE,DGS10\n2020-01-02,1.5\n2020-01-03,1.6\n").unwrap();
        for (series, day) in [(&old, "2024-01-01"), (&new, "2024-02-01")] {
            let payload = serialize_fred_csv(series);
            let meta = CacheMeta {
                ticker: "DGS10".into(),
                url: "test://".into(),
                fetched_at: format!("{day}T00:00:00Z"),
                content_length: payload.len(),
                rows: series.len(),
            };
            store_cached_series(dir.path(), &meta, day, payload.as_bytes()).unwrap();
        }
        let loaded = load_cached_series(dir.path(), "DGS10").unwrap().unwrap();
        assert_eq!(loaded, new);
        assert!(dir.path().join("DGS10/2024-02-01.meta.json").is_file());
    }

    #[test]
    fn cold_cache_is_none() {
        let dir = tempfile::tempdir().unwrap();
        assert!(load_cached_series(dir.path(), "DGS1").unwrap().is_none());
    }

    #[test]
    fn url_substitution() {
        let endpoint = EndpointConfig::default();
        let (url, redacted) = endpoint.url_for("DGS10");
        assert_eq!(
            url,
            "https://fred.stlouisfed.org/graph/fredgraph.csv?id=DGS10"
        );
        assert_eq!(url, redacted);

        let keyed = EndpointConfig {
            base_url: "https://api.example/fred?series_id={ticker}&api_key={api_key}".into(),
            api_key_env: "CURVECAST_TEST_KEY".into(),
        };
        std::env::set_var("CURVECAST_TEST_KEY", "sekrit");
        let (url, redacted) = keyed.url_for("DGS1");
        assert!(url.contains("api_key=sekrit"));
        assert!(
            redacted.contains("{api_key}"),
            "redacted URL must not leak the key"
        );
        std::env::remove_var("CURVECAST_TEST_KEY");
    }
}
