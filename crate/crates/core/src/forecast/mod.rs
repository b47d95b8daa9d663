//! Forecasting models behind one uniform contract: fit on a training
//! window, emit a level-space forecast path of length `h`.

#[cfg(feature = "adapter")]
mod adapter;
mod arima;
mod dhr;
mod naive;
mod var;
mod vecm;

#[cfg(feature = "adapter")]
pub use adapter::{external_forecast, AdapterConfig, AdapterRequest};
pub use arima::{arima_fit, arima_forecast, auto_arima, ArimaModel, ArimaSearch, DifferencePolicy};
pub use dhr::{dhr_arima_fit, dhr_arima_forecast, fourier_residuals, DhrModel};
pub use naive::{naive_last, naive_mean, seasonal_naive};
pub use var::{var_fit, var_forecast, var_order_select, OrderCriterion, VarModel};
pub use vecm::{vecm_fit, vecm_forecast, RankPolicy, VecmModel};

use serde::{Deserialize, Serialize};

/// Horizon-length predicted values for one tenor, in level (undifferenced)
/// yield-percent units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForecastPath {
    pub tenor: String,
    pub horizon: usize,
    pub values: Vec<f64>,
    pub model_id: String,
    pub hyperparams: HyperParams,
}

impl ForecastPath {
    pub fn new(
        tenor: impl Into<String>,
        model_id: impl Into<String>,
        hyperparams: HyperParams,
        values: Vec<f64>,
    ) -> Self {
        Self {
            tenor: tenor.into(),
            horizon: values.len(),
            values,
            model_id: model_id.into(),
            hyperparams,
        }
    }
}

/// Frozen per-block hyperparameters for one model configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "kebab-case")]
pub enum HyperParams {
    None,
    SeasonalNaive {
        season: usize,
    },
    Arima {
        p: usize,
        d: usize,
        q: usize,
    },
    DhrArima {
        p: usize,
        d: usize,
        q: usize,
        period: usize,
        harmonics: usize,
    },
    Var {
        lag: usize,
    },
    Vecm {
        lag: usize,
        rank_policy: RankPolicy,
    },
    External {
        command: String,
        config: serde_json::Value,
    },
}

impl HyperParams {
    /// Compact human-readable form used in log lines and summaries.
    pub fn summary(&self) -> String {
        match self {
            HyperParams::None => "-".into(),
            HyperParams::SeasonalNaive { season } => format!("m={season}"),
            HyperParams::Arima { p, d, q } => format!("({p},{d},{q})"),
            HyperParams::DhrArima {
                p,
                d,
                q,
                period,
                harmonics,
            } => {
                format!("({p},{d},{q}) m={period} K={harmonics}")
            }
            HyperParams::Var { lag } => format!("p={lag}"),
            HyperParams::Vecm { lag, rank_policy } => match rank_policy {
                RankPolicy::Fixed(r) => format!("p={lag} r={r}"),
                RankPolicy::Trace => format!("p={lag} r=trace"),
            },
            HyperParams::External { command, .. } => format!("cmd={command}"),
        }
    }
}
