use crate::{Error, Result};

/// Outcome of a Nelder–Mead run: best vertex, its value, and whether the
/// simplex collapsed below tolerance before the iteration budget ran out.
#[derive(Debug, Clone)]
pub struct NmResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

// Fixed reflection/expansion/contraction/shrink coefficients.
const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const BETA: f64 = 0.5;
const SIGMA: f64 = 0.5;

/// Nelder–Mead simplex minimization.
///
/// The initial simplex is `init` plus per-coordinate steps of
/// `max(0.05·|xᵢ|, 0.05)`. Non-finite objective values encountered mid-run
/// are treated as +∞ (the move is rejected); a non-finite value at `init`
/// is an error. Terminates when the simplex ∞-norm diameter drops below
/// `tol` or after `max_iter` iterations, returning the best vertex either
/// way. Deterministic for identical inputs.
pub fn nelder_mead(
    objective: impl Fn(&[f64]) -> f64,
    init: &[f64],
    tol: f64,
    max_iter: usize,
) -> Result<NmResult> {
    if tol <= 0.0 {
        return Err(Error::Input(
            "nelder_mead tolerance must be positive".into(),
        ));
    }
    let f0 = objective(init);
    if !f0.is_finite() {
        return Err(Error::Domain(format!(
            "objective is non-finite at the start point ({f0})"
        )));
    }
    let n = init.len();
    if n == 0 {
        return Ok(NmResult {
            x: Vec::new(),
            fx: f0,
            iterations: 0,
            converged: true,
        });
    }

    let eval = |x: &[f64]| -> f64 {
        let v = objective(x);
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    // Simplex of n+1 (vertex, value) pairs.
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    simplex.push((init.to_vec(), f0));
    for i in 0..n {
        let mut v = init.to_vec();
        v[i] += (0.05 * v[i].abs()).max(0.05);
        let fv = eval(&v);
        simplex.push((v, fv));
    }

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));

        let diameter = simplex[1..]
            .iter()
            .map(|(v, _)| {
                v.iter()
                    .zip(&simplex[0].0)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0_f64, f64::max)
            })
            .fold(0.0_f64, f64::max);
        if diameter < tol {
            converged = true;
            break;
        }
        iterations += 1;

        // Centroid of all vertices except the worst.
        let mut centroid = vec![0.0; n];
        for (v, _) in &simplex[..n] {
            for (c, x) in centroid.iter_mut().zip(v) {
                *c += x / n as f64;
            }
        }
        let worst = simplex[n].clone();

        let reflect: Vec<f64> = centroid
            .iter()
            .zip(&worst.0)
            .map(|(c, w)| c + ALPHA * (c - w))
            .collect();
        let f_reflect = eval(&reflect);

        if f_reflect < simplex[0].1 {
            // Try to expand further in the same direction.
            let expand: Vec<f64> = centroid
                .iter()
                .zip(&reflect)
                .map(|(c, r)| c + GAMMA * (r - c))
                .collect();
            let f_expand = eval(&expand);
            simplex[n] = if f_expand < f_reflect {
                (expand, f_expand)
            } else {
                (reflect, f_reflect)
            };
        } else if f_reflect < simplex[n - 1].1 {
            simplex[n] = (reflect, f_reflect);
        } else {
            // Contract toward the better of the worst vertex and its reflection.
            let (outside, f_ref) = if f_reflect < worst.1 {
                (reflect, f_reflect)
            } else {
                (worst.0.clone(), worst.1)
            };
            let contract: Vec<f64> = centroid
                .iter()
                .zip(&outside)
                .map(|(c, w)| c + BETA * (w - c))
                .collect();
            let f_contract = eval(&contract);
            if f_contract < f_ref {
                simplex[n] = (contract, f_contract);
            } else {
                // Shrink everything toward the best vertex.
                let best = simplex[0].0.clone();
                for (v, fv) in simplex.iter_mut().skip(1) {
                    for (x, b) in v.iter_mut().zip(&best) {
                        *x = b + SIGMA * (*x - b);
                    }
                    *fv = eval(v);
                }
            }
        }
    }

    simplex.sort_by(|a, b| a.1.partial_cmp(&b.1).unwrap_or(std::cmp::Ordering::Equal));
    let (x, fx) = simplex.swap_remove(0);
    Ok(NmResult {
        x,
        fx,
        iterations,
        converged,
    })
}
