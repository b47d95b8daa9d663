//! Walk-forward forecasting benchmark harness for the U.S. Treasury
//! constant-maturity yield panel.
//!
//! The crate is organized around the stages of one benchmark run:
//!
//! - [`data`] — fetch, parse, cache, and align the six FRED constant-maturity
//!   series (DGS1, DGS2, DGS5, DGS7, DGS10, DGS30) into a business-day panel.
//! - [`numerics`] — the dense linear algebra and optimization kernels the
//!   forecasters need: QR least squares, Nelder–Mead, and a generalized
//!   symmetric eigensolver.
//! - [`transforms`] — differencing/integration between level space and
//!   stationary space, plus a sample stationarity diagnostic.
//! - [`forecast`] — the forecasting models behind one uniform contract:
//!   naive benchmarks, ARIMA with AIC order search, DHR-ARIMA, VAR, VECM,
//!   and external adapter processes.
//! - [`cv`] — sliding/expanding walk-forward window plans, hyperparameter
//!   time blocks, and the experiment engine that orchestrates
//!   fit → forecast → score across models, tenors, and windows.
//! - [`report`] — RMSE/MAPE scoring, per-block and overall aggregation,
//!   leaderboard ranking, and CSV/JSON/markdown emission.

pub mod cv;
pub mod data;
mod error;
pub mod forecast;
pub mod numerics;
pub mod report;
pub mod transforms;

pub use error::{Error, Result};

/// Crate version embedded in emitted provenance.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
