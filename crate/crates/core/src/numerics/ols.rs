use super::{cholesky, Matrix};
use crate::{Error, Result};

/// Result of a (possibly multivariate) least-squares fit.
#[derive(Debug, Clone)]
pub struct OlsFit {
    /// k×m coefficient matrix (one column per target).
    pub coefficients: Matrix,
    /// n×m residual matrix.
    pub residuals: Matrix,
    /// m×m residual covariance EᵀE/n.
    pub residual_covariance: Matrix,
    /// Gaussian concentrated log-likelihood. `+inf` for an exact fit.
    pub log_likelihood: f64,
    /// n − k.
    pub dof: usize,
}

impl OlsFit {
    /// Coefficients of target column `j` as a vector.
    pub fn coefficients_for(&self, j: usize) -> Vec<f64> {
        self.coefficients.col(j)
    }
}

/// Least squares via Householder QR (no normal equations).
///
/// Solves `min ‖Y − X·B‖²` column-wise for an n×k design `x` and n×m target
/// `y`. Rank deficiency is detected from the R diagonal and reported with the
/// offending column index.
pub fn ols_solve(x: &Matrix, y: &Matrix) -> Result<OlsFit> {
    let n = x.rows();
    let k = x.cols();
    let m = y.cols();
    if y.rows() != n {
        return Err(Error::Input(format!(
            "design has {n} rows but target has {}",
            y.rows()
        )));
    }
    if n < k {
        return Err(Error::Input(format!(
            "underdetermined system: {n} observations for {k} coefficients"
        )));
    }
    if k == 0 {
        return Err(Error::Input("empty design matrix".into()));
    }
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::Input(
            "non-finite entries in regression input".into(),
        ));
    }

    // Householder reduction of [X | Y'] where reflections are applied to a
    // working copy of Y as they are formed.
    let mut r = x.clone();
    let mut qty = y.clone();
    for j in 0..k {
        // Householder vector for column j below the diagonal.
        let mut norm = 0.0;
        for i in j..n {
            norm += r.get(i, j) * r.get(i, j);
        }
        let norm = norm.sqrt();
        if norm == 0.0 {
            continue; // diagonal stays 0; caught by the rank check below
        }
        let alpha = if r.get(j, j) > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (j..n).map(|i| r.get(i, j)).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|t| t * t).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // Apply H = I − 2vvᵀ/‖v‖² to the trailing columns of R and to QᵀY.
        for col in j..k {
            let dot: f64 = (j..n).map(|i| v[i - j] * r.get(i, col)).sum();
            let f = 2.0 * dot / vnorm2;
            for i in j..n {
                r.set(i, col, r.get(i, col) - f * v[i - j]);
            }
        }
        for col in 0..m {
            let dot: f64 = (j..n).map(|i| v[i - j] * qty.get(i, col)).sum();
            let f = 2.0 * dot / vnorm2;
            for i in j..n {
                qty.set(i, col, qty.get(i, col) - f * v[i - j]);
            }
        }
        r.set(j, j, alpha);
        for i in (j + 1)..n {
            r.set(i, j, 0.0);
        }
    }

    // Rank check: a vanishing R diagonal means a linearly dependent column.
    let scale = x.max_abs() * (n as f64).sqrt();
    let threshold = scale * 1e-10;
    for j in 0..k {
        if r.get(j, j).abs() <= threshold {
            return Err(Error::SingularDesign { column: j });
        }
    }

    // Back substitution per target column.
    let mut coefficients = Matrix::zeros(k, m);
    for col in 0..m {
        for i in (0..k).rev() {
            let mut v = qty.get(i, col);
            for l in (i + 1)..k {
                v -= r.get(i, l) * coefficients.get(l, col);
            }
            coefficients.set(i, col, v / r.get(i, i));
        }
    }

    let residuals = y.sub(&x.matmul(&coefficients));
    let mut cov = Matrix::zeros(m, m);
    for a in 0..m {
        for b in 0..=a {
            let mut s = 0.0;
            for i in 0..n {
                s += residuals.get(i, a) * residuals.get(i, b);
            }
            let v = s / n as f64;
            cov.set(a, b, v);
            cov.set(b, a, v);
        }
    }

    let log_likelihood = gaussian_concentrated_loglik(n, &cov);

    Ok(OlsFit {
        coefficients,
        residuals,
        residual_covariance: cov,
        log_likelihood,
        dof: n - k,
    })
}

/// −(n/2)·(m·ln 2π + ln det Σ̂ + m); +inf when Σ̂ is singular (exact fit).
fn gaussian_concentrated_loglik(n: usize, cov: &Matrix) -> f64 {
    let m = cov.rows();
    match cholesky(cov) {
        Ok(l) => {
            let ln_det = 2.0 * (0..m).map(|i| l.get(i, i).ln()).sum::<f64>();
            -(n as f64) / 2.0 * (m as f64 * (2.0 * std::f64::consts::PI).ln() + ln_det + m as f64)
        }
        Err(_) => f64::INFINITY,
    }
}
