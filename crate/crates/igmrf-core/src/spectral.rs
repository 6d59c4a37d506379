//! Rank-deficient eigendecomposition and reference standard deviations.
//!
//! The marginal variance of node i at unit precision is the diagonal of the
//! constrained generalized inverse
//!
//! ```text
//! Σ*_ii = Σ_{j > k} Γ_ij² / λ_j
//! ```
//!
//! where the eigenvalues λ_j are sorted ascending and the k smallest are
//! treated as infinite precision (their reciprocals zeroed), independent of
//! whether they are numerically zero. The reference standard deviation is
//! the geometric mean of the per-node marginal standard deviations.
//!
//! The nominal k is a modelling convention (1 for first-order chains, 2 for
//! second-order chains, 3 for 2D second-order fields). The numeric rank
//! deficiency can differ — the torus constructions and the bounded squared
//! graph Laplacian all have a one-dimensional kernel — so every summary also
//! carries the numeric count and a warning when the two disagree.

use ndarray::{Array1, Array2};
use ndarray_linalg::{Eigh, UPLO};
use serde::Serialize;

use crate::builders::IgmrfModel;
use crate::error::{Error, Result};
use crate::lattice::SparseSymmetricMatrix;

/// Default dimension cap for dense decompositions.
pub const DEFAULT_DIMENSION_CAP: usize = 12_000;

/// Default relative tolerance separating "numerically zero" eigenvalues.
pub const DEFAULT_RANK_TOL: f64 = 1e-8;

/// Ascending eigenvalues and orthonormal eigenvectors of a structure matrix.
#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Eigenvalues sorted ascending.
    pub eigenvalues: Vec<f64>,
    /// Column i is the eigenvector paired with `eigenvalues[i]`.
    pub eigenvectors: Array2<f64>,
    pub dimension: usize,
}

impl SpectralDecomposition {
    pub fn lambda_max(&self) -> f64 {
        *self.eigenvalues.last().unwrap_or(&0.0)
    }
}

/// Full symmetric eigendecomposition with the default dimension cap.
pub fn eigendecompose(p: &SparseSymmetricMatrix) -> Result<SpectralDecomposition> {
    eigendecompose_with_cap(p, Some(DEFAULT_DIMENSION_CAP))
}

/// Full symmetric eigendecomposition; `cap = None` lifts the dimension gate.
pub fn eigendecompose_with_cap(
    p: &SparseSymmetricMatrix,
    cap: Option<usize>,
) -> Result<SpectralDecomposition> {
    let dim = p.dimension();
    if let Some(cap) = cap {
        if dim > cap {
            return Err(Error::DimensionOverCap { dim, cap });
        }
    }
    let dense = p.to_dense();
    let (values, vectors): (Array1<f64>, Array2<f64>) = dense
        .eigh(UPLO::Lower)
        .map_err(|e| Error::Eigen(e.to_string()))?;
    Ok(SpectralDecomposition {
        eigenvalues: values.to_vec(),
        eigenvectors: vectors,
        dimension: dim,
    })
}

/// Diagonal of the constrained generalized inverse: Σ*_ii = Σ_{j>k} Γ_ij²/λ_j.
///
/// The `null_dim` smallest eigenvalues are dropped regardless of magnitude.
/// Retained eigenvalues must be strictly positive beyond numerical noise.
pub fn pseudo_inverse_diagonal(
    decomp: &SpectralDecomposition,
    null_dim: usize,
) -> Result<Vec<f64>> {
    let dim = decomp.dimension;
    if null_dim >= dim {
        return Err(Error::NullDimOutOfRange { null_dim, dim });
    }
    let floor = 1e-12 * decomp.lambda_max().max(f64::MIN_POSITIVE);
    for (j, &lambda) in decomp.eigenvalues.iter().enumerate().skip(null_dim) {
        if lambda <= floor {
            return Err(Error::SingularRetained {
                index: j,
                value: lambda,
            });
        }
    }
    let mut variances = vec![0.0; dim];
    for j in null_dim..dim {
        let inv = 1.0 / decomp.eigenvalues[j];
        let col = decomp.eigenvectors.column(j);
        for i in 0..dim {
            variances[i] += col[i] * col[i] * inv;
        }
    }
    Ok(variances)
}

/// Elementwise square root of marginal variances.
///
/// Entries more negative than −1e−12 are rejected outright; tiny negatives
/// are clamped to zero and then rejected as degenerate, since downstream
/// geometric means require strict positivity.
pub fn marginal_stddevs(variances: &[f64]) -> Result<Vec<f64>> {
    let mut out = Vec::with_capacity(variances.len());
    for (i, &v) in variances.iter().enumerate() {
        if v < -1e-12 {
            return Err(Error::NegativeVariance { index: i, value: v });
        }
        let v = v.max(0.0);
        if v == 0.0 {
            return Err(Error::DegenerateMarginal { index: i });
        }
        out.push(v.sqrt());
    }
    Ok(out)
}

/// Geometric mean of positive marginal standard deviations.
pub fn reference_stddev(sigmas: &[f64]) -> Result<f64> {
    if sigmas.is_empty() {
        return Err(Error::EmptyInput("sigma vector".into()));
    }
    let mut log_sum = 0.0;
    for (i, &s) in sigmas.iter().enumerate() {
        if s <= 0.0 {
            return Err(Error::NonPositive(format!(
                "sigma[{i}] = {s}; geometric mean needs positive entries"
            )));
        }
        log_sum += s.ln();
    }
    Ok((log_sum / sigmas.len() as f64).exp())
}

/// Approximate marginal standard deviation at precision λ: σ_ref · λ^{−1/2}.
pub fn marginal_at_lambda(sigma_ref: f64, lambda: f64) -> Result<f64> {
    if lambda <= 0.0 {
        return Err(Error::NonPositive(format!("lambda = {lambda}")));
    }
    Ok(sigma_ref / lambda.sqrt())
}

/// Count of eigenvalues below `rel_tol · λ_max`.
pub fn numeric_rank(decomp: &SpectralDecomposition, rel_tol: f64) -> usize {
    let cutoff = rel_tol * decomp.lambda_max();
    decomp
        .eigenvalues
        .iter()
        .take_while(|&&v| v < cutoff)
        .count()
}

/// Spectrum bracketing around the dropped/retained split.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ConditionDiagnostics {
    pub smallest_retained_eigenvalue: f64,
    pub largest_dropped_eigenvalue: Option<f64>,
}

/// Per-node marginal standard deviations at λ=1 and their geometric mean.
#[derive(Debug, Clone, Serialize)]
pub struct MarginalSummary {
    pub sigma_at_unit_lambda: Vec<f64>,
    pub sigma_ref: f64,
    pub null_dim_used: usize,
    pub numeric_null_dim: usize,
    pub condition_diagnostics: ConditionDiagnostics,
    /// Set when the numeric rank deficiency disagrees with `null_dim_used`.
    pub warning: Option<String>,
}

/// Build the marginal summary for a decomposition at a given null dimension.
pub fn summarize(decomp: &SpectralDecomposition, null_dim: usize) -> Result<MarginalSummary> {
    let variances = pseudo_inverse_diagonal(decomp, null_dim)?;
    let sigma = marginal_stddevs(&variances)?;
    let sigma_ref = reference_stddev(&sigma)?;
    let numeric_null_dim = numeric_rank(decomp, DEFAULT_RANK_TOL);
    let warning = (numeric_null_dim != null_dim).then(|| {
        format!(
            "numeric rank deficiency {numeric_null_dim} differs from the {null_dim} \
             eigenvalues dropped; the inverse spectrum is a modelling convention here"
        )
    });
    Ok(MarginalSummary {
        sigma_at_unit_lambda: sigma,
        sigma_ref,
        null_dim_used: null_dim,
        numeric_null_dim,
        condition_diagnostics: ConditionDiagnostics {
            smallest_retained_eigenvalue: decomp.eigenvalues[null_dim],
            largest_dropped_eigenvalue: (null_dim > 0)
                .then(|| decomp.eigenvalues[null_dim - 1]),
        },
        warning,
    })
}

/// Decompose a model's structure matrix and summarize at its null dimension.
pub fn model_summary(model: &IgmrfModel) -> Result<MarginalSummary> {
    model_summary_with_cap(model, Some(DEFAULT_DIMENSION_CAP))
}

/// As [`model_summary`], with an explicit dimension cap (`None` = unlimited).
pub fn model_summary_with_cap(
    model: &IgmrfModel,
    cap: Option<usize>,
) -> Result<MarginalSummary> {
    let decomp = eigendecompose_with_cap(&model.structure, cap)?;
    summarize(&decomp, model.null_dim)
}
