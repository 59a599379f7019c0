//! Dense linear algebra, activations, seeded randomness and a
//! finite-difference gradient oracle.

mod activation;
mod matrix;
mod rng;

pub use activation::Activation;
pub use matrix::{cosine, dot, frobenius_inner, hadamard, l2_norm, matmul, softmax, Matrix};
pub use rng::Rng;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum NumericsError {
    #[error("shape mismatch: {}x{} vs {}x{}", left.0, left.1, right.0, right.1)]
    ShapeMismatch {
        left: (usize, usize),
        right: (usize, usize),
    },
    #[error("data length {len} does not match {rows}x{cols}")]
    DataLength { rows: usize, cols: usize, len: usize },
    #[error("ragged rows: expected {expected} columns, found {found}")]
    RaggedRows { expected: usize, found: usize },
    #[error("{0}: empty input")]
    Empty(&'static str),
    #[error("non-finite {what} at index {index}")]
    NonFinite { what: &'static str, index: usize },
    #[error("finite-difference step must be positive, got {0}")]
    BadStep(f64),
}

/// Central-difference gradient of `f` at `theta`.
pub fn finite_diff_grad<F>(mut f: F, theta: &[f64], eps: f64) -> Result<Vec<f64>, NumericsError>
where
    F: FnMut(&[f64]) -> f64,
{
    if !(eps > 0.0) {
        return Err(NumericsError::BadStep(eps));
    }
    let mut point = theta.to_vec();
    let mut grad = Vec::with_capacity(theta.len());
    for i in 0..theta.len() {
        point[i] = theta[i] + eps;
        let plus = f(&point);
        point[i] = theta[i] - eps;
        let minus = f(&point);
        point[i] = theta[i];
        if !plus.is_finite() || !minus.is_finite() {
            return Err(NumericsError::NonFinite {
                what: "objective value",
                index: i,
            });
        }
        grad.push((plus - minus) / (2.0 * eps));
    }
    Ok(grad)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic() {
        let g = finite_diff_grad(|t| t[0] * t[0], &[3.0], 1e-5).unwrap();
        assert!((g[0] - 6.0).abs() < 1e-8);
    }

    #[test]
    fn constant_gives_zero() {
        let g = finite_diff_grad(|_| 4.2, &[1.0, -2.0, 3.0], 1e-5).unwrap();
        assert_eq!(g, vec![0.0; 3]);
    }

    #[test]
    fn sine_plus_linear() {
        let g = finite_diff_grad(|t| t[0].sin() + t[1], &[0.0, 5.0], 1e-5).unwrap();
        assert!((g[0] - 1.0).abs() < 1e-8);
        assert!((g[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn rejects_non_finite_and_bad_step() {
        assert!(matches!(
            finite_diff_grad(|t| 1.0 / t[0], &[0.0], 1e-5),
            Ok(_)
        ));
        assert!(matches!(
            finite_diff_grad(|t| t[0].ln(), &[0.0], 1e-5),
            Err(NumericsError::NonFinite { index: 0, .. })
        ));
        assert!(matches!(
            finite_diff_grad(|t| t[0], &[0.0], 0.0),
            Err(NumericsError::BadStep(_))
        ));
    }
}
