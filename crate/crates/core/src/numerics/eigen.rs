use super::decomp::{cholesky, solve_lower, solve_lower_transpose};
use super::Matrix;
use crate::{Error, Result};

/// Solution of A·v = λ·B·v with eigenvalues sorted descending and
/// eigenvectors (columns) normalized so that vᵀ·B·v = 1.
#[derive(Debug, Clone)]
pub struct GeneralizedEigen {
    pub values: Vec<f64>,
    pub vectors: Matrix,
}

/// Eigen decomposition of a symmetric matrix by cyclic Jacobi rotations.
///
/// Returns eigenvalues sorted descending with matching eigenvector columns
/// (orthonormal). Intended for the small (≤ ~20) matrices this crate needs.
pub fn symmetric_eigen(a: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    let n = a.rows();
    if a.cols() != n {
        return Err(Error::Input(
            "symmetric_eigen requires a square matrix".into(),
        ));
    }
    if a.asymmetry() > 1e-8 {
        return Err(Error::Input("matrix is not symmetric".into()));
    }
    let mut m = a.symmetrize();
    let mut v = Matrix::identity(n);

    let off = |m: &Matrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += m.get(i, j) * m.get(i, j);
            }
        }
        s.sqrt()
    };
    let scale = m.max_abs().max(1e-300);

    for _sweep in 0..100 {
        if off(&m) <= 1e-13 * scale * n as f64 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m.get(p, q);
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                // Rotate rows/columns p and q.
                for k in 0..n {
                    let mkp = m.get(k, p);
                    let mkq = m.get(k, q);
                    m.set(k, p, c * mkp - s * mkq);
                    m.set(k, q, s * mkp + c * mkq);
                }
                for k in 0..n {
                    let mpk = m.get(p, k);
                    let mqk = m.get(q, k);
                    m.set(p, k, c * mpk - s * mqk);
                    m.set(q, k, s * mpk + c * mqk);
                }
                for k in 0..n {
                    let vkp = v.get(k, p);
                    let vkq = v.get(k, q);
                    v.set(k, p, c * vkp - s * vkq);
                    v.set(k, q, s * vkp + c * vkq);
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m.get(j, j)
            .partial_cmp(&m.get(i, i))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values: Vec<f64> = order.iter().map(|&i| m.get(i, i)).collect();
    let vectors = Matrix::from_fn(n, n, |i, j| v.get(i, order[j]));
    Ok((values, vectors))
}

/// Generalized symmetric eigenproblem A·v = λ·B·v via Cholesky reduction.
///
/// B must be symmetric positive definite. The problem is reduced to the
/// standard symmetric problem C·w = λ·w with C = L⁻¹·A·L⁻ᵀ where B = L·Lᵀ,
/// then eigenvectors are mapped back as v = L⁻ᵀ·w and normalized to
/// vᵀ·B·v = 1. Eigenvalues come back sorted descending.
pub fn generalized_eigen(a: &Matrix, b: &Matrix) -> Result<GeneralizedEigen> {
    let n = a.rows();
    if a.cols() != n || b.rows() != n || b.cols() != n {
        return Err(Error::Input(
            "generalized_eigen requires square same-size matrices".into(),
        ));
    }
    if a.asymmetry() > 1e-8 {
        return Err(Error::Input("matrix A is not symmetric".into()));
    }
    let l = cholesky(&b.symmetrize())?;

    // C = L⁻¹ A L⁻ᵀ, computed with two triangular solves.
    let y = solve_lower(&l, &a.symmetrize()); // Y = L⁻¹ A
    let c = solve_lower(&l, &y.transpose()).transpose(); // C = (L⁻¹ Yᵀ)ᵀ
    let (values, w) = symmetric_eigen(&c.symmetrize())?;

    // v_j = L⁻ᵀ w_j, renormalized against B.
    let mut vectors = solve_lower_transpose(&l, &w);
    for j in 0..n {
        let col = vectors.col(j);
        let bv = b.matvec(&col);
        let norm = col.iter().zip(&bv).map(|(x, y)| x * y).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            for i in 0..n {
                vectors.set(i, j, vectors.get(i, j) / norm);
            }
        }
    }
    Ok(GeneralizedEigen { values, vectors })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn residual(a: &Matrix, b: &Matrix, lambda: f64, v: &[f64]) -> f64 {
        let av = a.matvec(v);
        let bv = b.matvec(v);
        av.iter()
            .zip(&bv)
            .map(|(x, y)| (x - lambda * y).abs())
            .fold(0.0_f64, f64::max)
    }

    #[test]
    fn identity_b_reduces_to_standard() {
        let a = Matrix::from_rows(&[vec![3.0, 0.0], vec![0.0, 1.0]]).unwrap();
        let b = Matrix::identity(2);
        let ge = generalized_eigen(&a, &b).unwrap();
        assert!((ge.values[0] - 3.0).abs() < 1e-10);
        assert!((ge.values[1] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn proportional_matrices() {
        let b = Matrix::from_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let a = b.scale(2.0);
        let ge = generalized_eigen(&a, &b).unwrap();
        for v in ge.values {
            assert!((v - 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn random_4x4_residuals() {
        // Deterministic pseudo-random symmetric A and SPD B = CᵀC + I.
        let mut state = 0x9e3779b97f4a7c15_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        let raw = Matrix::from_fn(4, 4, |_, _| next() * 4.0);
        let a = raw.symmetrize();
        let c = Matrix::from_fn(4, 4, |_, _| next() * 2.0);
        let b = c.transpose().matmul(&c).add(&Matrix::identity(4));

        let ge = generalized_eigen(&a, &b).unwrap();
        for j in 0..4 {
            let v = ge.vectors.col(j);
            assert!(
                residual(&a, &b, ge.values[j], &v) < 1e-9,
                "pair {j} residual too large"
            );
            // vᵀBv = 1 normalization.
            let bv = b.matvec(&v);
            let q: f64 = v.iter().zip(&bv).map(|(x, y)| x * y).sum();
            assert!((q - 1.0).abs() < 1e-9);
        }
        // Descending order.
        for j in 1..4 {
            assert!(ge.values[j - 1] >= ge.values[j] - 1e-12);
        }
    }

    #[test]
    fn non_pd_b_is_decomposition_error() {
        let a = Matrix::identity(2);
        let b = Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).unwrap();
        assert!(matches!(
            generalized_eigen(&a, &b),
            Err(Error::Decomposition(_))
        ));
    }
}
