//! Differencing and integration between level space and stationary space,
//! plus a coarse sample diagnostic for weak stationarity.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// What `difference` needs to remember so its output can be integrated back
/// to levels exactly: the differencing order and the last `d` level values
/// of the training series, oldest first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegrationState {
    order: usize,
    anchors: Vec<f64>,
}

impl IntegrationState {
    pub fn new(order: usize, anchors: Vec<f64>) -> Result<Self> {
        if anchors.len() != order {
            return Err(Error::State(format!(
                "integration state of order {order} needs {order} anchors, got {}",
                anchors.len()
            )));
        }
        Ok(Self { order, anchors })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn anchors(&self) -> &[f64] {
        &self.anchors
    }
}

/// Applies the first-difference operator `d` times (d ∈ {0, 1, 2}).
///
/// Returns the differenced series (length `len − d`) together with the
/// [`IntegrationState`] capturing the trailing levels needed for exact
/// inversion. `d = 0` is the identity with an empty state.
pub fn difference(series: &[f64], d: usize) -> Result<(Vec<f64>, IntegrationState)> {
    if d > 2 {
        return Err(Error::Input(format!(
            "differencing order {d} not supported (d ≤ 2)"
        )));
    }
    if series.len() <= d {
        return Err(Error::Input(format!(
            "series of length {} is too short to difference {d} times",
            series.len()
        )));
    }
    let mut out = series.to_vec();
    for _ in 0..d {
        out = out.windows(2).map(|w| w[1] - w[0]).collect();
    }
    let anchors = series[series.len() - d..].to_vec();
    Ok((out, IntegrationState { order: d, anchors }))
}

/// Exact inverse of [`difference`] applied to a forecast continuation.
///
/// For `d = 1` this is a cumulative sum anchored at the last training level;
/// higher orders integrate one difference level at a time.
pub fn integrate_forecast(diff_forecast: &[f64], state: &IntegrationState) -> Result<Vec<f64>> {
    if state.anchors.len() != state.order {
        return Err(Error::State(format!(
            "anchors length {} does not match order {}",
            state.anchors.len(),
            state.order
        )));
    }
    if state.order == 0 {
        return Ok(diff_forecast.to_vec());
    }
    // Trailing value of each difference level, from levels (order 0) up to
    // order d−1; anchors hold the last d levels oldest-first.
    let mut tails = Vec::with_capacity(state.order);
    let mut level = state.anchors.clone();
    for _ in 0..state.order {
        tails.push(*level.last().expect("anchors nonempty"));
        level = level.windows(2).map(|w| w[1] - w[0]).collect();
    }

    let mut values = diff_forecast.to_vec();
    for tail in tails.iter().rev() {
        let mut acc = *tail;
        for v in values.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    Ok(values)
}

/// Verdict of the coarse stationarity screen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StationarityVerdict {
    PlausiblyStationary,
    NonstationaryMean,
    NonstationaryVariance,
}

/// Segment means/variances of a series and the verdict derived from them.
///
/// This checks mean stability and variance stability only; it is advisory
/// and never gates the pipeline.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StationarityReport {
    pub segment_means: Vec<f64>,
    pub segment_variances: Vec<f64>,
    pub mean_spread: f64,
    pub variance_ratio: f64,
    pub verdict: StationarityVerdict,
}

// Coarse screen thresholds: mean drift beyond half a pooled standard
// deviation, or a 4x spread in segment variances.
const MEAN_SPREAD_FACTOR: f64 = 0.5;
const VARIANCE_RATIO_LIMIT: f64 = 4.0;

/// Splits the series into `k_segments` equal parts (the last absorbs the
/// remainder) and compares per-segment means and variances.
pub fn stationarity_diagnostic(series: &[f64], k_segments: usize) -> Result<StationarityReport> {
    if k_segments < 2 {
        return Err(Error::Input("need at least 2 segments".into()));
    }
    if series.len() < 10 * k_segments {
        return Err(Error::Input(format!(
            "series of length {} is too short for {k_segments} segments (need {})",
            series.len(),
            10 * k_segments
        )));
    }

    let seg_len = series.len() / k_segments;
    let mut segment_means = Vec::with_capacity(k_segments);
    let mut segment_variances = Vec::with_capacity(k_segments);
    for s in 0..k_segments {
        let start = s * seg_len;
        let end = if s + 1 == k_segments {
            series.len()
        } else {
            start + seg_len
        };
        let seg = &series[start..end];
        let mean = seg.iter().sum::<f64>() / seg.len() as f64;
        let var = seg.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / seg.len() as f64;
        segment_means.push(mean);
        segment_variances.push(var);
    }

    let mean_max = segment_means
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let mean_min = segment_means.iter().cloned().fold(f64::INFINITY, f64::min);
    let mean_spread = mean_max - mean_min;

    let var_max = segment_variances
        .iter()
        .cloned()
        .fold(f64::NEG_INFINITY, f64::max);
    let var_min = segment_variances
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let variance_ratio = if var_max == 0.0 {
        1.0 // all segments constant: treat zero variances as equal
    } else if var_min == 0.0 {
        f64::INFINITY
    } else {
        var_max / var_min
    };

    let pooled_mean = series.iter().sum::<f64>() / series.len() as f64;
    let pooled_std = (series
        .iter()
        .map(|v| (v - pooled_mean).powi(2))
        .sum::<f64>()
        / series.len() as f64)
        .sqrt();

    let verdict = if mean_spread > MEAN_SPREAD_FACTOR * pooled_std && pooled_std > 0.0 {
        StationarityVerdict::NonstationaryMean
    } else if variance_ratio > VARIANCE_RATIO_LIMIT {
        StationarityVerdict::NonstationaryVariance
    } else {
        StationarityVerdict::PlausiblyStationary
    };

    Ok(StationarityReport {
        segment_means,
        segment_variances,
        mean_spread,
        variance_ratio,
        verdict,
    })
}
