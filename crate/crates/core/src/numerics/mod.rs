//! Dense linear algebra and optimization kernels for the forecasters:
//! QR least squares, a derivative-free simplex optimizer, and a
//! generalized symmetric eigensolver.
//!
//! Everything here is a pure function on immutable inputs and safe to call
//! concurrently.

mod decomp;
mod eigen;
mod matrix;
mod neldermead;
mod ols;

pub use decomp::{cholesky, ln_det_spd, spd_inverse};
pub use eigen::{generalized_eigen, symmetric_eigen, GeneralizedEigen};
pub use matrix::Matrix;
pub use neldermead::{nelder_mead, NmResult};
pub use ols::{ols_solve, OlsFit};
