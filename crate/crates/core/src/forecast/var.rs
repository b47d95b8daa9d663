use crate::numerics::{ln_det_spd, ols_solve, Matrix};
use crate::{Error, Result};

/// Fitted VAR(p) model over an m-variable panel.
#[derive(Debug, Clone)]
pub struct VarModel {
    pub lag: usize,
    pub intercept: Vec<f64>,
    /// A₁..A_p, each m×m; element (r, c) multiplies variable c at that lag
    /// in the equation for variable r.
    pub coefficients: Vec<Matrix>,
    pub residual_covariance: Matrix,
    pub n_obs: usize,
}

/// Fits a VAR(p) by OLS on lagged regressors plus an intercept.
///
/// The multivariate solve is numerically identical to running OLS equation
/// by equation.
pub fn var_fit(data: &Matrix, lag: usize) -> Result<VarModel> {
    let n = data.rows();
    let m = data.cols();
    if lag == 0 {
        return Err(Error::Input("VAR lag order must be at least 1".into()));
    }
    let min_rows = 10 * (m * lag + 1);
    if n < min_rows {
        return Err(Error::Input(format!(
            "panel of {n} rows is too short for VAR({lag}) over {m} variables (need {min_rows})"
        )));
    }

    let (x, y) = var_design(data, lag, lag);
    let fit = ols_solve(&x, &y)?;

    let intercept: Vec<f64> = (0..m).map(|r| fit.coefficients.get(0, r)).collect();
    let mut coefficients = Vec::with_capacity(lag);
    for l in 0..lag {
        coefficients.push(Matrix::from_fn(m, m, |r, c| {
            fit.coefficients.get(1 + l * m + c, r)
        }));
    }
    Ok(VarModel {
        lag,
        intercept,
        coefficients,
        residual_covariance: fit.residual_covariance,
        n_obs: y.rows(),
    })
}

/// Regressor/target matrices for a VAR(p): targets are rows
/// `offset..n`, regressors are `[1, y_{t−1}, …, y_{t−p}]`.
/// `offset ≥ lag` drops extra leading rows so candidate orders can share a
/// common estimation sample.
fn var_design(data: &Matrix, lag: usize, offset: usize) -> (Matrix, Matrix) {
    let n = data.rows();
    let m = data.cols();
    debug_assert!(offset >= lag);
    let rows = n - offset;
    let x = Matrix::from_fn(rows, 1 + lag * m, |i, j| {
        if j == 0 {
            1.0
        } else {
            let l = (j - 1) / m;
            let c = (j - 1) % m;
            data.get(offset + i - 1 - l, c)
        }
    });
    let y = Matrix::from_fn(rows, m, |i, j| data.get(offset + i, j));
    (x, y)
}

/// Order-selection criterion for [`var_order_select`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OrderCriterion {
    /// ln det Σ̂ + 2(m²p + m)/n
    Aic,
    /// ln det Σ̂ + ln(n)(m²p + m)/n
    Bic,
}

/// Selects the VAR order in 1..=max_lag minimizing the criterion, with all
/// candidates estimated on the common sample that the largest order allows.
/// Ties go to the smaller order.
pub fn var_order_select(data: &Matrix, max_lag: usize, criterion: OrderCriterion) -> Result<usize> {
    let n = data.rows();
    let m = data.cols();
    if max_lag == 0 {
        return Err(Error::Input("max_lag must be at least 1".into()));
    }
    if n < 10 * (m * max_lag + 1) {
        return Err(Error::Input(format!(
            "panel of {n} rows is too short to compare orders up to {max_lag}"
        )));
    }

    let n_common = (n - max_lag) as f64;
    let mut best: Option<(f64, usize)> = None;
    for p in 1..=max_lag {
        let (x, y) = var_design(data, p, max_lag);
        let fit = match ols_solve(&x, &y) {
            Ok(f) => f,
            Err(_) => continue,
        };
        let ln_det = match ln_det_spd(&fit.residual_covariance) {
            Ok(v) => v,
            Err(_) => continue,
        };
        let n_params = (m * m * p + m) as f64;
        let penalty = match criterion {
            OrderCriterion::Aic => 2.0 * n_params / n_common,
            OrderCriterion::Bic => n_common.ln() * n_params / n_common,
        };
        let score = ln_det + penalty;
        let beats = match best {
            None => true,
            Some((b, _)) => score < b - 1e-12,
        };
        if beats {
            best = Some((score, p));
        }
    }
    best.map(|(_, p)| p)
        .ok_or_else(|| Error::Selection("no VAR order could be estimated".into()))
}

/// Iterates the VAR recursion `h` steps, substituting forecasts for unknown
/// future values. `history` must hold at least `lag` rows in fit space
/// (levels or differences, matching the fit). Returns an h×m matrix.
pub fn var_forecast(model: &VarModel, history: &Matrix, h: usize) -> Result<Matrix> {
    let m = model.intercept.len();
    if history.cols() != m || history.rows() < model.lag {
        return Err(Error::Input(format!(
            "history must supply at least {} rows of {m} variables",
            model.lag
        )));
    }
    let mut buf: Vec<Vec<f64>> = (history.rows() - model.lag..history.rows())
        .map(|i| history.row(i).to_vec())
        .collect();
    let mut out = Matrix::zeros(h, m);
    for step in 0..h {
        let mut next = model.intercept.clone();
        for (l, a) in model.coefficients.iter().enumerate() {
            let lagged = &buf[buf.len() - 1 - l];
            for (r, slot) in next.iter_mut().enumerate() {
                *slot += a.row(r).iter().zip(lagged).map(|(x, y)| x * y).sum::<f64>();
            }
        }
        for (j, v) in next.iter().enumerate() {
            out.set(step, j, *v);
        }
        buf.push(next);
    }
    Ok(out)
}
