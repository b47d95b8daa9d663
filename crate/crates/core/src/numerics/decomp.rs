use super::Matrix;
use crate::{Error, Result};

/// Cholesky factor L (lower triangular) of a symmetric positive-definite
/// matrix, so that L·Lᵀ = A.
pub fn cholesky(a: &Matrix) -> Result<Matrix> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Input("cholesky requires a square matrix".into()));
    }
    let mut l = Matrix::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a.get(i, j);
            for k in 0..j {
                sum -= l.get(i, k) * l.get(j, k);
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return Err(Error::Decomposition(format!(
                        "matrix not positive definite at pivot {i} (value {sum:e})"
                    )));
                }
                l.set(i, j, sum.sqrt());
            } else {
                l.set(i, j, sum / l.get(j, j));
            }
        }
    }
    Ok(l)
}

/// Solves L·X = B by forward substitution (L lower triangular).
pub(crate) fn solve_lower(l: &Matrix, b: &Matrix) -> Matrix {
    let n = l.rows();
    let m = b.cols();
    let mut x = b.clone();
    for col in 0..m {
        for i in 0..n {
            let mut v = x.get(i, col);
            for k in 0..i {
                v -= l.get(i, k) * x.get(k, col);
            }
            x.set(i, col, v / l.get(i, i));
        }
    }
    x
}

/// Solves Lᵀ·X = B by back substitution (L lower triangular).
pub(crate) fn solve_lower_transpose(l: &Matrix, b: &Matrix) -> Matrix {
    let n = l.rows();
    let m = b.cols();
    let mut x = b.clone();
    for col in 0..m {
        for i in (0..n).rev() {
            let mut v = x.get(i, col);
            for k in (i + 1)..n {
                v -= l.get(k, i) * x.get(k, col);
            }
            x.set(i, col, v / l.get(i, i));
        }
    }
    x
}

/// Inverse of a symmetric positive-definite matrix via its Cholesky factor.
pub fn spd_inverse(a: &Matrix) -> Result<Matrix> {
    let l = cholesky(a)?;
    let y = solve_lower(&l, &Matrix::identity(a.rows()));
    Ok(solve_lower_transpose(&l, &y).symmetrize())
}

/// ln det(A) for symmetric positive-definite A.
pub fn ln_det_spd(a: &Matrix) -> Result<f64> {
    let l = cholesky(a)?;
    Ok(2.0 * (0..a.rows()).map(|i| l.get(i, i).ln()).sum::<f64>())
}
