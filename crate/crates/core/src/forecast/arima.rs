use std::collections::BTreeMap;

use crate::numerics::nelder_mead;
use crate::transforms::{difference, integrate_forecast, IntegrationState};
use crate::{Error, Result};

/// Fitted ARIMA(p,d,q) model.
///
/// Estimation maximizes the Gaussian conditional-sum-of-squares likelihood
/// (the first `max(p, q+1)` differenced observations are conditioned on)
/// with σ² concentrated out. AR and MA coefficients are optimized through a
/// partial-autocorrelation reparameterization, so stationarity and
/// invertibility hold by construction. The intercept is fitted only for
/// d = 0; differenced models carry no drift term.
#[derive(Debug, Clone)]
pub struct ArimaModel {
    pub orders: (usize, usize, usize),
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub intercept: f64,
    pub sigma2: f64,
    pub log_likelihood: f64,
    pub aic: f64,
    state: IntegrationState,
    w_tail: Vec<f64>,
    resid_tail: Vec<f64>,
}

const NM_TOL: f64 = 1e-7;

/// Fits an ARIMA(p,d,q) model to a series given in level units.
pub fn arima_fit(series: &[f64], p: usize, d: usize, q: usize) -> Result<ArimaModel> {
    let min_len = 10 * (p + q + 1) + d;
    if series.len() < min_len {
        return Err(Error::Input(format!(
            "series of length {} is too short for ARIMA({p},{d},{q}) (need {min_len})",
            series.len()
        )));
    }
    if series.iter().any(|v| !v.is_finite()) {
        return Err(Error::Input("non-finite value in training series".into()));
    }

    let (w, state) = difference(series, d)?;
    let with_intercept = d == 0;
    let est = estimate_css(&w, p, q, with_intercept, 0)?;
    let (ar, ma, intercept) = (est.ar, est.ma, est.intercept);
    let (residuals, sigma2, log_likelihood) = css_residuals(&w, &ar, &ma, intercept, p.max(q + 1));
    let k = p + q + 1 + usize::from(with_intercept);
    let aic = 2.0 * k as f64 - 2.0 * log_likelihood;

    let w_tail = w[w.len() - p..].to_vec();
    let resid_tail = residuals[residuals.len() - q..].to_vec();
    Ok(ArimaModel {
        orders: (p, d, q),
        ar,
        ma,
        intercept,
        sigma2,
        log_likelihood,
        aic,
        state,
        w_tail,
        resid_tail,
    })
}

/// Iterates the ARMA recursion with future innovations set to zero, then
/// integrates `d` times back to level space.
pub fn arima_forecast(model: &ArimaModel, h: usize) -> Vec<f64> {
    let (p, _, q) = model.orders;
    let mut w_hist = model.w_tail.clone();
    let mut e_hist = model.resid_tail.clone();
    let mut diff_path = Vec::with_capacity(h);
    for _ in 0..h {
        let mut pred = model.intercept;
        for i in 0..p {
            pred += model.ar[i] * w_hist[w_hist.len() - 1 - i];
        }
        for j in 0..q {
            pred += model.ma[j] * e_hist[e_hist.len() - 1 - j];
        }
        diff_path.push(pred);
        w_hist.push(pred);
        e_hist.push(0.0);
    }
    integrate_forecast(&diff_path, &model.state)
        .expect("state produced by arima_fit is always consistent")
}

/// How `auto_arima` treats the differencing order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DifferencePolicy {
    /// d pinned by the pipeline (0 on pre-differenced input).
    Fixed(usize),
    /// Level input: d ∈ {0, 1} searched alongside the orders.
    SearchLevel,
}

/// Order-search configuration. Bounds mirror common autoarima defaults.
#[derive(Debug, Clone, Copy)]
pub struct ArimaSearch {
    pub max_p: usize,
    pub max_q: usize,
    pub d: DifferencePolicy,
}

impl Default for ArimaSearch {
    fn default() -> Self {
        Self {
            max_p: 5,
            max_q: 5,
            d: DifferencePolicy::SearchLevel,
        }
    }
}

/// Stepwise AIC order selection starting from (2,d,2) and moving to
/// unit-step neighbors while they improve. Ties (AIC within 1e-9) go to the
/// smaller p+q, then the smaller p, then the smaller d.
pub fn auto_arima(series: &[f64], search: &ArimaSearch) -> Result<(usize, usize, usize)> {
    let d_candidates: &[usize] = match search.d {
        DifferencePolicy::Fixed(d) => {
            if d > 2 {
                return Err(Error::Config(format!(
                    "differencing order {d} not supported"
                )));
            }
            match d {
                0 => &[0],
                1 => &[1],
                _ => &[2],
            }
        }
        DifferencePolicy::SearchLevel => &[0, 1],
    };

    let mut best: Option<(f64, usize, usize, usize)> = None; // (aic, p, q, d)
    for &d in d_candidates {
        if let Some((aic, p, q)) = stepwise_search(series, d, search.max_p, search.max_q) {
            let cand = (aic, p, q, d);
            best = Some(match best {
                None => cand,
                Some(b) => {
                    if better_candidate((cand.0, cand.1, cand.2, cand.3), (b.0, b.1, b.2, b.3)) {
                        cand
                    } else {
                        b
                    }
                }
            });
        }
    }
    match best {
        Some((_, p, q, d)) => Ok((p, d, q)),
        None => Err(Error::Selection(
            "every candidate order failed to fit".into(),
        )),
    }
}

/// True when candidate `a` (aic, p, q, d) beats `b` under the AIC-with-
/// deterministic-tie-break rule.
pub(crate) fn better_candidate(
    a: (f64, usize, usize, usize),
    b: (f64, usize, usize, usize),
) -> bool {
    let diff = a.0 - b.0;
    if diff.abs() < 1e-9 {
        (a.1 + a.2, a.1, a.3) < (b.1 + b.2, b.1, b.3)
    } else {
        diff < 0.0
    }
}

fn stepwise_search(
    series: &[f64],
    d: usize,
    max_p: usize,
    max_q: usize,
) -> Option<(f64, usize, usize)> {
    let (w, _) = difference(series, d).ok()?;
    // All candidates share one conditioning span so their AICs compare on
    // the same sample.
    let s0_common = max_p.max(max_q + 1);
    let with_intercept = d == 0;
    let mut cache: BTreeMap<(usize, usize), Option<f64>> = BTreeMap::new();
    let mut eval = |p: usize, q: usize| -> Option<f64> {
        *cache.entry((p, q)).or_insert_with(|| {
            if series.len() < 10 * (p + q + 1) + d {
                return None;
            }
            let est = estimate_css(&w, p, q, with_intercept, s0_common).ok()?;
            let (_, _, ll) = css_core(&est.ar, &est.ma, est.intercept, &w, s0_common, false);
            let k = p + q + 1 + usize::from(with_intercept);
            Some(2.0 * k as f64 - 2.0 * ll)
        })
    };

    let start_set = [
        (2.min(max_p), 2.min(max_q)),
        (0, 0),
        (1.min(max_p), 0),
        (0, 1.min(max_q)),
    ];
    let mut current: Option<(f64, usize, usize)> = None;
    for (p, q) in start_set {
        if let Some(aic) = eval(p, q) {
            let cand = (aic, p, q);
            current = Some(match current {
                None => cand,
                Some(c) => {
                    if better_candidate((cand.0, cand.1, cand.2, d), (c.0, c.1, c.2, d)) {
                        cand
                    } else {
                        c
                    }
                }
            });
        }
    }
    let mut current = current?;

    loop {
        let (_, p, q) = current;
        let mut neighbors = Vec::new();
        if p > 0 {
            neighbors.push((p - 1, q));
        }
        if p < max_p {
            neighbors.push((p + 1, q));
        }
        if q > 0 {
            neighbors.push((p, q - 1));
        }
        if q < max_q {
            neighbors.push((p, q + 1));
        }
        let mut moved = false;
        for (np, nq) in neighbors {
            if let Some(aic) = eval(np, nq) {
                if better_candidate((aic, np, nq, d), (current.0, current.1, current.2, d)) {
                    current = (aic, np, nq);
                    moved = true;
                }
            }
        }
        if !moved {
            break;
        }
    }
    Some(current)
}

struct CssEstimate {
    ar: Vec<f64>,
    ma: Vec<f64>,
    intercept: f64,
}

/// Maximizes the CSS likelihood on an already-differenced series, scoring
/// residuals from `max(p, q+1, s0_floor)` onward. The floor lets the order
/// search evaluate every candidate on a common sample, keeping AICs
/// comparable across orders.
fn estimate_css(
    w: &[f64],
    p: usize,
    q: usize,
    with_intercept: bool,
    s0_floor: usize,
) -> Result<CssEstimate> {
    let s0 = p.max(q + 1).max(s0_floor);
    if w.len() <= s0 + 1 {
        return Err(Error::Input(
            "not enough observations after CSS conditioning".into(),
        ));
    }
    let n_params = p + q + usize::from(with_intercept);
    let params = if n_params == 0 {
        Vec::new()
    } else {
        let mut init = vec![0.0; n_params];
        if with_intercept {
            init[n_params - 1] = w.iter().sum::<f64>() / w.len() as f64;
        }
        let objective = |u: &[f64]| {
            let (ar, ma, c) = unpack_params(u, p, q, with_intercept);
            let (_, _, ll) = css_core(&ar, &ma, c, w, s0, false);
            -ll
        };
        let max_iter = 2000 + 600 * n_params * n_params;
        let nm = nelder_mead(objective, &init, NM_TOL, max_iter)?;
        if !nm.converged {
            return Err(Error::FitFailure(format!(
                "CSS optimizer did not converge for ARMA({p},{q}) after {} iterations",
                nm.iterations
            )));
        }
        // Restart once from the found optimum; the fresh simplex shakes off
        // premature collapse and tightens the likelihood a little.
        let polish = nelder_mead(objective, &nm.x, NM_TOL, max_iter)?;
        if polish.fx < nm.fx {
            polish.x
        } else {
            nm.x
        }
    };
    let (ar, ma, intercept) = unpack_params(&params, p, q, with_intercept);
    Ok(CssEstimate { ar, ma, intercept })
}

/// Maps the unconstrained optimizer vector to (AR, MA, intercept).
fn unpack_params(u: &[f64], p: usize, q: usize, with_intercept: bool) -> (Vec<f64>, Vec<f64>, f64) {
    // The clamp keeps saturated tanh values strictly inside (−1, 1) so the
    // mapped polynomials stay stationary/invertible.
    let squash = |v: f64| v.tanh().clamp(-0.999_999_9, 0.999_999_9);
    let pacf_ar: Vec<f64> = u[..p].iter().map(|v| squash(*v)).collect();
    let ar = pacf_to_ar(&pacf_ar);
    let pacf_ma: Vec<f64> = u[p..p + q].iter().map(|v| squash(*v)).collect();
    // Invertibility of 1 + θ(B) is stationarity of 1 − (−θ)(B).
    let ma: Vec<f64> = pacf_to_ar(&pacf_ma).iter().map(|v| -v).collect();
    let c = if with_intercept { u[p + q] } else { 0.0 };
    (ar, ma, c)
}

/// Levinson–Durbin recursion from partial autocorrelations (each in (−1,1))
/// to stationary AR coefficients.
fn pacf_to_ar(pacf: &[f64]) -> Vec<f64> {
    let p = pacf.len();
    let mut phi = vec![0.0; p];
    let mut prev = vec![0.0; p];
    for k in 0..p {
        let r = pacf[k];
        phi[k] = r;
        for i in 0..k {
            phi[i] = prev[i] - r * prev[k - 1 - i];
        }
        prev[..=k].copy_from_slice(&phi[..=k]);
    }
    phi
}

fn css_residuals(w: &[f64], ar: &[f64], ma: &[f64], c: f64, s0: usize) -> (Vec<f64>, f64, f64) {
    css_core(ar, ma, c, w, s0, true)
}

/// One pass of the CSS recursion. Pre-sample residuals are zero and the
/// first `s0` observations are conditioned on (not scored).
fn css_core(
    ar: &[f64],
    ma: &[f64],
    c: f64,
    w: &[f64],
    s0: usize,
    keep: bool,
) -> (Vec<f64>, f64, f64) {
    let n = w.len();
    let mut e = vec![0.0; n];
    let mut sse = 0.0;
    for t in s0..n {
        let mut pred = c;
        for (i, &phi) in ar.iter().enumerate() {
            pred += phi * w[t - 1 - i];
        }
        for (j, &theta) in ma.iter().enumerate() {
            pred += theta * e[t - 1 - j];
        }
        let resid = w[t] - pred;
        e[t] = resid;
        sse += resid * resid;
    }
    let n_eff = (n - s0) as f64;
    let sigma2 = (sse / n_eff).max(1e-300);
    let ll = -0.5 * n_eff * ((2.0 * std::f64::consts::PI * sigma2).ln() + 1.0);
    (if keep { e } else { Vec::new() }, sigma2, ll)
}
