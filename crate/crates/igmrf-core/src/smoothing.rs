//! Posterior-mean smoothing of noisy grid observations under a field prior.
//!
//! With observations y = u + ε, ε ~ N(0, σ²I), and the improper prior
//! u ~ N(0, (λP)⁻), the posterior mean solves the proper linear system
//!
//! ```text
//! (λP + σ⁻²I) m = σ⁻² y
//! ```

use ndarray::{Array1, Array2};
use ndarray_linalg::Solve;

use crate::error::{Error, Result};
use crate::lattice::SparseSymmetricMatrix;

/// Solve the regularized system; returns the posterior mean and the
/// residual norm ‖A m − b‖₂ of the solve.
pub fn posterior_mean(
    p: &SparseSymmetricMatrix,
    lambda: f64,
    noise_sd: f64,
    y: &[f64],
) -> Result<(Vec<f64>, f64)> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositive(format!("lambda = {lambda}")));
    }
    if !(noise_sd > 0.0) {
        return Err(Error::NonPositive(format!("noise_sd = {noise_sd}")));
    }
    let n = p.dimension();
    if y.len() != n {
        return Err(Error::InvalidLattice(format!(
            "observation vector has length {}, expected {n}",
            y.len()
        )));
    }
    let noise_precision = 1.0 / (noise_sd * noise_sd);
    let mut a: Array2<f64> = p.to_dense() * lambda;
    for i in 0..n {
        a[[i, i]] += noise_precision;
    }
    let b = Array1::from_iter(y.iter().map(|&v| v * noise_precision));
    let m = a
        .solve(&b)
        .map_err(|e| Error::Eigen(format!("posterior solve failed: {e}")))?;
    let residual = (&a.dot(&m) - &b).mapv(|v| v * v).sum().sqrt();
    Ok((m.to_vec(), residual))
}

/// Residual norm of the best-fit affine surface a + b·d + c·s over a grid,
/// by least squares on the three-column design.
pub fn plane_fit_residual(values: &[f64], n1: usize, n2: usize) -> Result<f64> {
    if values.len() != n1 * n2 {
        return Err(Error::InvalidLattice(format!(
            "value vector has length {}, expected {}",
            values.len(),
            n1 * n2
        )));
    }
    let n = values.len();
    let mut x = Array2::zeros((n, 3));
    for d in 0..n1 {
        for s in 0..n2 {
            let i = d * n2 + s;
            x[[i, 0]] = 1.0;
            x[[i, 1]] = d as f64;
            x[[i, 2]] = s as f64;
        }
    }
    let y = Array1::from(values.to_vec());
    let xtx = x.t().dot(&x);
    let xty = x.t().dot(&y);
    let coef = xtx
        .solve(&xty)
        .map_err(|e| Error::Eigen(format!("plane fit failed: {e}")))?;
    let fitted = x.dot(&coef);
    Ok((&y - &fitted).mapv(|v| v * v).sum().sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builders::build_bound1;

    #[test]
    fn tiny_noise_recovers_observations() {
        let m = build_bound1(6, 6).unwrap();
        let y: Vec<f64> = (0..36).map(|i| (i as f64 * 0.37).sin()).collect();
        let (mean, residual) = posterior_mean(&m.structure, 1.0, 1e-6, &y).unwrap();
        for (a, b) in mean.iter().zip(&y) {
            assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
        }
        assert!(residual <= 1e-6 * 1e12);
    }

    #[test]
    fn strong_prior_flattens_toward_plane() {
        let m = build_bound1(7, 7).unwrap();
        let y: Vec<f64> = (0..49)
            .map(|i| {
                let (d, s) = (i / 7, i % 7);
                ((d as f64) * 0.9).sin() + ((s as f64) * 1.3).cos()
            })
            .collect();
        let mut previous = f64::INFINITY;
        for lambda in [1.0, 10.0, 100.0] {
            let (mean, _) = posterior_mean(&m.structure, lambda, 1.0, &y).unwrap();
            let residual = plane_fit_residual(&mean, 7, 7).unwrap();
            assert!(
                residual < previous,
                "plane residual {residual} did not shrink at lambda {lambda}"
            );
            previous = residual;
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let m = build_bound1(5, 5).unwrap();
        assert!(posterior_mean(&m.structure, 0.0, 1.0, &[0.0; 25]).is_err());
        assert!(posterior_mean(&m.structure, 1.0, 0.0, &[0.0; 25]).is_err());
        assert!(posterior_mean(&m.structure, 1.0, 1.0, &[0.0; 24]).is_err());
    }
}
