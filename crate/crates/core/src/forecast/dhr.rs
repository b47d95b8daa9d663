use std::f64::consts::PI;

use super::arima::{arima_fit, arima_forecast, ArimaModel};
use crate::numerics::{ols_solve, Matrix};
use crate::{Error, Result};

/// Dynamic harmonic regression: an OLS Fourier stage for the seasonal shape
/// plus an ARIMA model on the regression residuals.
#[derive(Debug, Clone)]
pub struct DhrModel {
    pub period: usize,
    pub harmonics: usize,
    /// Intercept followed by (sin, cos) pairs for k = 1..K.
    pub fourier_coefficients: Vec<f64>,
    pub arima: ArimaModel,
    train_len: usize,
}

/// Two-stage fit: OLS of the series on intercept + sin/cos terms of the
/// given period, then [`arima_fit`] on the OLS residuals.
pub fn dhr_arima_fit(
    series: &[f64],
    period: usize,
    harmonics: usize,
    orders: (usize, usize, usize),
) -> Result<DhrModel> {
    let (p, d, q) = orders;
    if period < 2 {
        return Err(Error::Input("Fourier period must be at least 2".into()));
    }
    if 2 * harmonics > period {
        return Err(Error::Input(format!(
            "harmonics K={harmonics} exceeds period/2 = {}",
            period / 2
        )));
    }
    let min_len = 10 * (p + q + 2 * harmonics + 1);
    if series.len() < min_len {
        return Err(Error::Input(format!(
            "series of length {} is too short for DHR (need {min_len})",
            series.len()
        )));
    }

    let n = series.len();
    let design = fourier_design(n, 0, period, harmonics);
    let y = Matrix::column_vector(series);
    let fit = ols_solve(&design, &y)?;
    let fourier_coefficients = fit.coefficients.col(0);
    let residuals = fit.residuals.col(0);
    let arima = arima_fit(&residuals, p, d, q)?;

    Ok(DhrModel {
        period,
        harmonics,
        fourier_coefficients,
        arima,
        train_len: n,
    })
}

/// Extrapolates the Fourier regression and adds the ARIMA residual forecast.
pub fn dhr_arima_forecast(model: &DhrModel, h: usize) -> Vec<f64> {
    let seasonal = fourier_design(h, model.train_len, model.period, model.harmonics);
    let resid = arima_forecast(&model.arima, h);
    (0..h)
        .map(|t| {
            let base: f64 = seasonal
                .row(t)
                .iter()
                .zip(&model.fourier_coefficients)
                .map(|(x, b)| x * b)
                .sum();
            base + resid[t]
        })
        .collect()
}

/// Residuals of the stage-one Fourier regression, exposed for order
/// search on the residual series.
pub fn fourier_residuals(series: &[f64], period: usize, harmonics: usize) -> Result<Vec<f64>> {
    if period < 2 {
        return Err(Error::Input("Fourier period must be at least 2".into()));
    }
    if 2 * harmonics > period {
        return Err(Error::Input(format!(
            "harmonics K={harmonics} exceeds period/2 = {}",
            period / 2
        )));
    }
    let design = fourier_design(series.len(), 0, period, harmonics);
    let y = Matrix::column_vector(series);
    Ok(ols_solve(&design, &y)?.residuals.col(0))
}

/// Design matrix [1, sin(2πkt/m), cos(2πkt/m) for k=1..K] for time indexes
/// `offset..offset+n`.
fn fourier_design(n: usize, offset: usize, period: usize, harmonics: usize) -> Matrix {
    Matrix::from_fn(n, 1 + 2 * harmonics, |i, j| {
        if j == 0 {
            return 1.0;
        }
        let k = j.div_ceil(2);
        let angle = 2.0 * PI * k as f64 * (offset + i) as f64 / period as f64;
        if j % 2 == 1 {
            angle.sin()
        } else {
            angle.cos()
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pure_sinusoid_is_continued_exactly() {
        let m = 24;
        let series: Vec<f64> = (0..240)
            .map(|t| 5.0 + 2.0 * (2.0 * PI * t as f64 / m as f64).sin())
            .collect();
        let model = dhr_arima_fit(&series, m, 1, (0, 0, 0)).unwrap();
        let forecast = dhr_arima_forecast(&model, 48);
        for (k, v) in forecast.iter().enumerate() {
            let t = 240 + k;
            let expect = 5.0 + 2.0 * (2.0 * PI * t as f64 / m as f64).sin();
            assert!((v - expect).abs() < 1e-6, "step {k}: {v} vs {expect}");
        }
    }

    #[test]
    fn zero_harmonics_matches_plain_arima_with_intercept() {
        let series: Vec<f64> = (0..300)
            .map(|t| 2.0 + ((t * 17 + 3) % 23) as f64 / 23.0)
            .collect();
        let dhr = dhr_arima_fit(&series, 10, 0, (0, 0, 0)).unwrap();
        let plain = arima_fit(&series, 0, 0, 0).unwrap();
        let a = dhr_arima_forecast(&dhr, 3);
        let b = arima_forecast(&plain, 3);
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-3, "{x} vs {y}");
        }
    }

    #[test]
    fn sinusoid_plus_ar_noise_beats_plain_arima() {
        use rand::rngs::StdRng;
        use rand::SeedableRng;
        use rand_distr::{Distribution, Normal};

        let m = 20;
        let mut rng = StdRng::seed_from_u64(99);
        let normal = Normal::new(0.0, 0.3).unwrap();
        let mut noise = vec![0.0; 620];
        for t in 1..noise.len() {
            noise[t] = 0.5 * noise[t - 1] + normal.sample(&mut rng);
        }
        let series: Vec<f64> = (0..600)
            .map(|t| 4.0 + 1.5 * (2.0 * PI * t as f64 / m as f64).sin() + noise[t + 20])
            .collect();
        let train = &series[..560];
        let actual = &series[560..575];

        let dhr = dhr_arima_fit(train, m, 1, (1, 0, 0)).unwrap();
        let plain = arima_fit(train, 1, 0, 0).unwrap();
        let rmse = |f: &[f64]| {
            (f.iter()
                .zip(actual)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                / actual.len() as f64)
                .sqrt()
        };
        let dhr_rmse = rmse(&dhr_arima_forecast(&dhr, 15));
        let plain_rmse = rmse(&arima_forecast(&plain, 15));
        assert!(
            dhr_rmse < plain_rmse,
            "DHR rmse {dhr_rmse} not better than plain {plain_rmse}"
        );
    }

    #[test]
    fn degenerate_harmonics_give_singular_design() {
        // K = m/2 with even m makes the top sine column identically zero.
        let series: Vec<f64> = (0..400).map(|t| (t % 7) as f64).collect();
        let err = dhr_arima_fit(&series, 4, 2, (0, 0, 0));
        assert!(matches!(err, Err(Error::SingularDesign { .. })), "{err:?}");
    }

    #[test]
    fn harmonics_above_half_period_rejected() {
        let series = vec![1.0; 400];
        assert!(matches!(
            dhr_arima_fit(&series, 4, 3, (0, 0, 0)),
            Err(Error::Input(_))
        ));
    }
}
