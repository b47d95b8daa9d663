use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::aggregate::AggregateReport;
use crate::cv::Scheme;
use crate::{Error, Result};

/// One tenor's cell in a leaderboard row, with best-in-family and
/// best-overall flags per metric.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardCell {
    pub tenor: String,
    pub rmse: f64,
    pub mape: f64,
    pub rmse_family_best: bool,
    pub mape_family_best: bool,
    pub rmse_overall_best: bool,
    pub mape_overall_best: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LeaderboardRow {
    /// Display label, e.g. `arima (sliding)` or `rnn (sliding, stationary)`.
    pub label: String,
    /// Family identifier: the model id shared by its configurations.
    pub family: String,
    pub cells: Vec<Option<LeaderboardCell>>,
    pub avg_rmse: f64,
    pub avg_mape: f64,
}

/// Ranked comparison table: one row per model configuration, columns per
/// tenor, ranked by mean MAPE averaged across tenors (ties by mean RMSE).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Leaderboard {
    pub tenors: Vec<String>,
    pub horizon: usize,
    pub rows: Vec<LeaderboardRow>,
}

pub(crate) fn row_label(model_id: &str, scheme: Scheme, stationary: bool) -> String {
    if stationary {
        format!("{model_id} ({scheme}, stationary)")
    } else {
        format!("{model_id} ({scheme})")
    }
}

/// Builds the ranked table from an aggregate report.
pub fn leaderboard(report: &AggregateReport) -> Result<Leaderboard> {
    if report.groups.is_empty() {
        return Err(Error::Input("cannot rank an empty report".into()));
    }
    // Columns follow the configured tenor order (maturity order for the
    // default panel); tenors unknown to the provenance sort after it.
    let present: std::collections::BTreeSet<&str> =
        report.groups.iter().map(|g| g.key.tenor.as_str()).collect();
    let mut tenors: Vec<String> = report
        .provenance
        .tenors
        .iter()
        .filter(|t| present.contains(t.as_str()))
        .cloned()
        .collect();
    for tenor in &present {
        if !report.provenance.tenors.iter().any(|t| t == tenor) {
            tenors.push((*tenor).to_string());
        }
    }
    let horizon = report.groups[0].key.horizon;

    // Configuration = (model id, scheme, stationary); collect per-tenor stats.
    type ConfigKey = (String, Scheme, bool);
    let mut configs: BTreeMap<ConfigKey, BTreeMap<String, (f64, f64)>> = BTreeMap::new();
    for g in &report.groups {
        if g.overall.windows == 0 {
            continue;
        }
        configs
            .entry((g.key.model_id.clone(), g.key.scheme, g.key.stationary_input))
            .or_default()
            .insert(
                g.key.tenor.clone(),
                (g.overall.mean_rmse, g.overall.mean_mape),
            );
    }

    // Per (tenor, metric): overall minimum and per-family minimum.
    let mut overall_best: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    let mut family_best: BTreeMap<(&str, &str), (f64, f64)> = BTreeMap::new();
    for ((model_id, _, _), cells) in &configs {
        for (tenor, (rmse, mape)) in cells {
            let o = overall_best
                .entry(tenor.as_str())
                .or_insert((f64::INFINITY, f64::INFINITY));
            o.0 = o.0.min(*rmse);
            o.1 = o.1.min(*mape);
            let f = family_best
                .entry((model_id.as_str(), tenor.as_str()))
                .or_insert((f64::INFINITY, f64::INFINITY));
            f.0 = f.0.min(*rmse);
            f.1 = f.1.min(*mape);
        }
    }

    let mut rows: Vec<LeaderboardRow> = configs
        .iter()
        .map(|((model_id, scheme, stationary), cells)| {
            let mut sum_rmse = 0.0;
            let mut sum_mape = 0.0;
            let mut n = 0usize;
            let cell_vec: Vec<Option<LeaderboardCell>> = tenors
                .iter()
                .map(|tenor| {
                    cells.get(tenor).map(|(rmse, mape)| {
                        sum_rmse += rmse;
                        sum_mape += mape;
                        n += 1;
                        let o = overall_best[tenor.as_str()];
                        let f = family_best[&(model_id.as_str(), tenor.as_str())];
                        LeaderboardCell {
                            tenor: tenor.clone(),
                            rmse: *rmse,
                            mape: *mape,
                            rmse_family_best: *rmse <= f.0,
                            mape_family_best: *mape <= f.1,
                            rmse_overall_best: *rmse <= o.0,
                            mape_overall_best: *mape <= o.1,
                        }
                    })
                })
                .collect();
            let nf = n.max(1) as f64;
            LeaderboardRow {
                label: row_label(model_id, *scheme, *stationary),
                family: model_id.clone(),
                cells: cell_vec,
                avg_rmse: sum_rmse / nf,
                avg_mape: sum_mape / nf,
            }
        })
        .collect();

    rows.sort_by(|a, b| {
        (a.avg_mape, a.avg_rmse)
            .partial_cmp(&(b.avg_mape, b.avg_rmse))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then_with(|| a.label.cmp(&b.label))
    });

    Ok(Leaderboard {
        tenors,
        horizon,
        rows,
    })
}
