//! Fetch, parse, cache, and align the FRED constant-maturity yield series
//! into a clean business-day panel.

mod cache;
#[cfg(feature = "fetch")]
mod fetch;
mod fred;
mod panel;

pub use cache::{
    cache_series_path, load_cached_series, store_cached_series, CacheMeta, EndpointConfig,
    FetchOptions,
};
#[cfg(feature = "fetch")]
pub use fetch::fetch_series;
pub use fred::{parse_fred_csv, serialize_fred_csv, RawSeries};
pub use panel::{
    align_panel, slice_window, AlignmentOptions, FillPolicy, SeriesProvenance, SeriesWindow,
    YieldPanel,
};

/// The six constant-maturity tickers of the benchmark panel.
pub const DEFAULT_TICKERS: [&str; 6] = ["DGS1", "DGS2", "DGS5", "DGS7", "DGS10", "DGS30"];
