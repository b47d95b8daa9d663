use crate::{Error, Result};

/// Repeats the last training value `h` times (the random walk benchmark).
pub fn naive_last(window: &[f64], h: usize) -> Result<Vec<f64>> {
    let last = *window
        .last()
        .ok_or_else(|| Error::Input("naive forecast needs a nonempty window".into()))?;
    Ok(vec![last; h])
}

/// Repeats the training-window mean `h` times.
pub fn naive_mean(window: &[f64], h: usize) -> Result<Vec<f64>> {
    if window.is_empty() {
        return Err(Error::Input("mean forecast needs a nonempty window".into()));
    }
    let mean = window.iter().sum::<f64>() / window.len() as f64;
    Ok(vec![mean; h])
}

/// Repeats the last full season: step t (1-based) forecasts
/// `window[len − m + ((t−1) mod m)]`.
pub fn seasonal_naive(window: &[f64], h: usize, season: usize) -> Result<Vec<f64>> {
    if season == 0 {
        return Err(Error::Input("season length must be at least 1".into()));
    }
    if window.len() < season {
        return Err(Error::Input(format!(
            "window of length {} is shorter than season {season}",
            window.len()
        )));
    }
    let tail = &window[window.len() - season..];
    Ok((0..h).map(|t| tail[t % season]).collect())
}
