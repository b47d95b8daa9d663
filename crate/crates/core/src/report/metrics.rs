use crate::{Error, Result};

fn check_pair(actual: &[f64], forecast: &[f64]) -> Result<()> {
    if actual.is_empty() {
        return Err(Error::Input("cannot score an empty forecast".into()));
    }
    if actual.len() != forecast.len() {
        return Err(Error::Input(format!(
            "length mismatch: {} actuals vs {} forecasts",
            actual.len(),
            forecast.len()
        )));
    }
    if actual.iter().chain(forecast).any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite value in scoring input".into()));
    }
    Ok(())
}

/// Root mean-squared error.
pub fn rmse(actual: &[f64], forecast: &[f64]) -> Result<f64> {
    check_pair(actual, forecast)?;
    let mse = actual
        .iter()
        .zip(forecast)
        .map(|(a, f)| (a - f) * (a - f))
        .sum::<f64>()
        / actual.len() as f64;
    Ok(mse.sqrt())
}

/// Mean absolute percentage error, in percent (5.5 means 5.5%).
pub fn mape(actual: &[f64], forecast: &[f64]) -> Result<f64> {
    check_pair(actual, forecast)?;
    if actual.contains(&0.0) {
        return Err(Error::Domain(
            "MAPE undefined: an actual value is zero".into(),
        ));
    }
    let total = actual
        .iter()
        .zip(forecast)
        .map(|(a, f)| ((a - f) / a).abs())
        .sum::<f64>();
    Ok(100.0 * total / actual.len() as f64)
}
