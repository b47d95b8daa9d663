use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::cv::{ResultStatus, RunProvenance, Scheme, WindowResult};
use crate::{Error, Result};

/// One aggregation cell: a model configuration on one tenor at one horizon.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupKey {
    pub model_id: String,
    pub scheme: Scheme,
    pub stationary_input: bool,
    pub tenor: String,
    pub horizon: usize,
}

/// Mean/std of the per-window metrics in one cell. The std is the
/// population standard deviation (the window set is the whole evaluation
/// population). Fallback windows are included in the statistics but
/// counted; skipped windows are excluded and counted.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricStats {
    pub windows: usize,
    pub mean_rmse: f64,
    pub mean_mape: f64,
    pub std_rmse: f64,
    pub std_mape: f64,
    pub fallback_windows: usize,
    pub skipped_windows: usize,
}

/// Per-block statistics for one cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockStats {
    pub block: usize,
    pub stats: MetricStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupAggregate {
    #[serde(flatten)]
    pub key: GroupKey,
    pub overall: MetricStats,
    pub per_block: Vec<BlockStats>,
}

/// Per-window scores rolled up per cell and per block.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub provenance: RunProvenance,
    pub groups: Vec<GroupAggregate>,
}

fn stats_of(values: &[(f64, f64)], fallback: usize, skipped: usize) -> MetricStats {
    let n = values.len();
    if n == 0 {
        return MetricStats {
            windows: 0,
            mean_rmse: f64::NAN,
            mean_mape: f64::NAN,
            std_rmse: f64::NAN,
            std_mape: f64::NAN,
            fallback_windows: fallback,
            skipped_windows: skipped,
        };
    }
    let nf = n as f64;
    let mean_rmse = values.iter().map(|(r, _)| r).sum::<f64>() / nf;
    let mean_mape = values.iter().map(|(_, m)| m).sum::<f64>() / nf;
    let std_rmse = (values
        .iter()
        .map(|(r, _)| (r - mean_rmse).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    let std_mape = (values
        .iter()
        .map(|(_, m)| (m - mean_mape).powi(2))
        .sum::<f64>()
        / nf)
        .sqrt();
    MetricStats {
        windows: n,
        mean_rmse,
        mean_mape,
        std_rmse,
        std_mape,
        fallback_windows: fallback,
        skipped_windows: skipped,
    }
}

/// Groups window results by (model, scheme, stationary, tenor, horizon),
/// computing overall and per-block means and population standard
/// deviations. The overall mean is the mean of per-window values, never a
/// mean of block means.
pub fn aggregate(results: &[WindowResult], provenance: RunProvenance) -> Result<AggregateReport> {
    // One horizon per (model, scheme, stationary, tenor) cell.
    let mut horizon_check: BTreeMap<(String, Scheme, bool, String), usize> = BTreeMap::new();
    for r in results {
        let key = (
            r.model_id.clone(),
            r.scheme,
            r.stationary_input,
            r.tenor.clone(),
        );
        if let Some(h) = horizon_check.insert(key, r.horizon) {
            if h != r.horizon {
                return Err(Error::Grouping(format!(
                    "mixed horizons ({h} and {}) for model {} tenor {}",
                    r.horizon, r.model_id, r.tenor
                )));
            }
        }
    }

    let mut cells: BTreeMap<GroupKey, Vec<&WindowResult>> = BTreeMap::new();
    for r in results {
        cells
            .entry(GroupKey {
                model_id: r.model_id.clone(),
                scheme: r.scheme,
                stationary_input: r.stationary_input,
                tenor: r.tenor.clone(),
                horizon: r.horizon,
            })
            .or_default()
            .push(r);
    }

    let mut groups = Vec::with_capacity(cells.len());
    for (key, rows) in cells {
        let scored: Vec<(f64, f64)> = rows
            .iter()
            .filter(|r| r.status != ResultStatus::Skipped)
            .map(|r| (r.rmse, r.mape))
            .collect();
        let fallback = rows
            .iter()
            .filter(|r| r.status == ResultStatus::Fallback)
            .count();
        let skipped = rows
            .iter()
            .filter(|r| r.status == ResultStatus::Skipped)
            .count();
        let overall = stats_of(&scored, fallback, skipped);

        let mut by_block: BTreeMap<usize, Vec<&WindowResult>> = BTreeMap::new();
        for r in rows {
            by_block.entry(r.block).or_default().push(r);
        }
        let per_block = by_block
            .into_iter()
            .map(|(block, rows)| {
                let scored: Vec<(f64, f64)> = rows
                    .iter()
                    .filter(|r| r.status != ResultStatus::Skipped)
                    .map(|r| (r.rmse, r.mape))
                    .collect();
                let fb = rows
                    .iter()
                    .filter(|r| r.status == ResultStatus::Fallback)
                    .count();
                let sk = rows
                    .iter()
                    .filter(|r| r.status == ResultStatus::Skipped)
                    .count();
                BlockStats {
                    block,
                    stats: stats_of(&scored, fb, sk),
                }
            })
            .collect();

        groups.push(GroupAggregate {
            key,
            overall,
            per_block,
        });
    }
    Ok(AggregateReport { provenance, groups })
}
