//! Browser playground for the forecasting kernels: pick a model and a
//! window on a built-in sample series and watch the forecast path against
//! what actually happened. Everything returns JSON strings so the page
//! stays a plain `<script type="module">` with no framework.
//!
//! Build with `wasm-pack build crates/demo --target web --out-dir www/pkg`
//! and serve `crates/demo/www/`.

use std::sync::OnceLock;

use curvecast::cv::{generate_windows, Scheme};
use curvecast::forecast::{
    arima_fit, arima_forecast, dhr_arima_fit, dhr_arima_forecast, naive_last, naive_mean,
    seasonal_naive,
};
use curvecast::report::{mape, rmse};
use curvecast::transforms::{difference, integrate_forecast, stationarity_diagnostic};
use wasm_bindgen::prelude::*;

/// Demo sample length. The series is synthetic (a gently mean-reverting
/// random walk in yield-percent units) so the page works fully offline.
const DEMO_LEN: usize = 780;

fn demo_values() -> &'static Vec<f64> {
    static SERIES: OnceLock<Vec<f64>> = OnceLock::new();
    SERIES.get_or_init(|| {
        let mut state = 0x00c0ffee_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let mut level = 6.8_f64;
        (0..DEMO_LEN)
            .map(|_| {
                // Noise plus a mild pull toward 4% keeps the path in a
                // believable yield range.
                level += 0.09 * next() + 0.0004 * (4.0 - level);
                level = level.clamp(0.2, 16.0);
                level
            })
            .collect()
    })
}

fn err_json(message: impl std::fmt::Display) -> String {
    serde_json::json!({ "error": message.to_string() }).to_string()
}

/// The built-in sample series.
#[wasm_bindgen]
pub fn demo_series() -> String {
    serde_json::json!({
        "name": "synthetic yield-like sample (not market data)",
        "values": demo_values(),
    })
    .to_string()
}

/// Fits one forecaster on `values[origin-train_len .. origin)` and forecasts
/// `horizon` steps, scoring against the actual continuation when available.
///
/// `model`: naive | naive-mean | seasonal-naive | arima | dhr-arima.
/// `p,d,q` apply to the ARIMA family, `season` to seasonal-naive and the
/// DHR Fourier period; `stationary` differences the input once and
/// integrates the forecast back.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn run_forecast(
    model: &str,
    origin: usize,
    train_len: usize,
    horizon: usize,
    p: usize,
    d: usize,
    q: usize,
    season: usize,
    stationary: bool,
) -> String {
    let series = demo_values();
    if train_len == 0 || horizon == 0 {
        return err_json("train_len and horizon must be positive");
    }
    if origin < train_len || origin > series.len() {
        return err_json(format!(
            "origin must lie in [train_len, {}], got {origin}",
            series.len()
        ));
    }
    let train = &series[origin - train_len..origin];
    let actual: Vec<f64> = series[origin..series.len().min(origin + horizon)].to_vec();

    let result = (|| -> curvecast::Result<Vec<f64>> {
        let (input, state) = if stationary {
            let (w, s) = difference(train, 1)?;
            (w, Some(s))
        } else {
            (train.to_vec(), None)
        };
        let forecast = match model {
            "naive" => naive_last(&input, horizon)?,
            "naive-mean" => naive_mean(&input, horizon)?,
            "seasonal-naive" => seasonal_naive(&input, horizon, season.max(1))?,
            "arima" => arima_forecast(&arima_fit(&input, p, d, q)?, horizon),
            "dhr-arima" => {
                let fitted = dhr_arima_fit(&input, season.max(4), 2, (p, d, q))?;
                dhr_arima_forecast(&fitted, horizon)
            }
            other => return Err(curvecast::Error::Config(format!("unknown model {other:?}"))),
        };
        match state {
            Some(state) => integrate_forecast(&forecast, &state),
            None => Ok(forecast),
        }
    })();

    match result {
        Ok(forecast) => {
            let scored = actual.len() == horizon;
            let (score_rmse, score_mape) = if scored {
                match (rmse(&actual, &forecast), mape(&actual, &forecast)) {
                    (Ok(r), Ok(m)) => (Some(r), Some(m)),
                    _ => (None, None),
                }
            } else {
                (None, None)
            };
            serde_json::json!({
                "model": model,
                "origin": origin,
                "train_tail": train[train.len().saturating_sub(60)..],
                "forecast": forecast,
                "actual": actual,
                "rmse": score_rmse,
                "mape": score_mape,
            })
            .to_string()
        }
        Err(e) => err_json(e),
    }
}

/// Walk-forward plan spans over the sample, for the scheme visualization.
#[wasm_bindgen]
pub fn window_plan(scheme: &str, window: usize, step: usize, horizon: usize) -> String {
    let scheme = match scheme {
        "sliding" => Scheme::Sliding,
        "expanding" => Scheme::Expanding,
        other => return err_json(format!("unknown scheme {other:?}")),
    };
    match generate_windows(DEMO_LEN, scheme, window, step, horizon) {
        Ok(plan) => {
            let spans: Vec<serde_json::Value> = plan
                .windows
                .iter()
                .map(|w| {
                    serde_json::json!({
                        "train_start": w.train_start,
                        "train_end": w.train_end,
                        "test_end": w.test_end,
                    })
                })
                .collect();
            serde_json::json!({ "n": DEMO_LEN, "windows": spans }).to_string()
        }
        Err(e) => err_json(e),
    }
}

/// Differences the sample `d` times and reports the stationarity screen.
#[wasm_bindgen]
pub fn stationarity(d: usize) -> String {
    let series = demo_values();
    let result = (|| -> curvecast::Result<serde_json::Value> {
        let (diffed, _) = difference(series, d)?;
        let report = stationarity_diagnostic(&diffed, 4)?;
        Ok(serde_json::json!({
            "d": d,
            "values": diffed,
            "segment_means": report.segment_means,
            "segment_variances": report.segment_variances,
            "mean_spread": report.mean_spread,
            "variance_ratio": if report.variance_ratio.is_finite() { Some(report.variance_ratio) } else { None },
            "verdict": format!("{:?}", report.verdict),
        }))
    })();
    match result {
        Ok(v) => v.to_string(),
        Err(e) => err_json(e),
    }
}
