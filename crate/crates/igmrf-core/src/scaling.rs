//! Hyperprior rescaling: upper limits on marginal standard deviations and
//! rescaled standard-deviation parameters.
//!
//! For a Gaussian hyperprior with location μ and standard-deviation
//! parameter b, the upper limit on the marginal standard deviation at tail
//! probability α is
//!
//! ```text
//! U = ( b σ²_ref / Φ⁻¹(α, μ, 1) )^{1/2}
//! ```
//!
//! and, given an aggregated U, the rescaled parameter for a model with
//! reference standard deviation σ_ref is
//!
//! ```text
//! b_new = U² Φ⁻¹(α, μ, 1) / σ²_ref
//! ```
//!
//! Both formulas are implemented exactly as written, with b acting as a
//! multiplicative factor outside the unit-variance quantile. The quantile
//! must be positive; there is no truncated-normal correction.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::builders::ModelClass;
use crate::error::{Error, Result};

/// Supported hyperprior families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HyperpriorFamily {
    /// The Gaussian formulas above, exactly as printed.
    GaussianAsWritten,
    /// Upper limit solved from Pr(λ/σ²_ref < 1/U²) = α with a caller-supplied
    /// quantile function for λ.
    GenericQuantile,
}

/// A hyperprior specification for the precision parameter.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HyperpriorSpec {
    pub family: HyperpriorFamily,
    pub mu: f64,
    pub b: f64,
    pub alpha: f64,
}

impl HyperpriorSpec {
    pub fn gaussian(mu: f64, b: f64, alpha: f64) -> Result<Self> {
        let spec = HyperpriorSpec {
            family: HyperpriorFamily::GaussianAsWritten,
            mu,
            b,
            alpha,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.b > 0.0) {
            return Err(Error::NonPositive(format!("b = {}", self.b)));
        }
        if !(self.alpha > 0.0 && self.alpha < 0.5) {
            return Err(Error::NonPositive(format!(
                "alpha = {} outside (0, 0.5)",
                self.alpha
            )));
        }
        if self.family == HyperpriorFamily::GaussianAsWritten {
            let q = gaussian_quantile(self.alpha, self.mu);
            if q <= 0.0 {
                return Err(Error::NonPositiveQuantile { quantile: q });
            }
        }
        Ok(())
    }
}

/// α-quantile of a unit-variance Gaussian centred at μ.
pub fn gaussian_quantile(alpha: f64, mu: f64) -> f64 {
    // unit variance by construction; Normal::new only fails on bad σ
    let normal = Normal::new(mu, 1.0).expect("unit-variance normal");
    normal.inverse_cdf(alpha)
}

/// Upper limit U = (b σ²_ref / Φ⁻¹(α, μ, 1))^{1/2}.
pub fn upper_limit(b: f64, sigma_ref: f64, alpha: f64, mu: f64) -> Result<f64> {
    if !(b > 0.0) {
        return Err(Error::NonPositive(format!("b = {b}")));
    }
    if !(sigma_ref > 0.0) {
        return Err(Error::NonPositive(format!("sigma_ref = {sigma_ref}")));
    }
    let q = gaussian_quantile(alpha, mu);
    if q <= 0.0 {
        return Err(Error::NonPositiveQuantile { quantile: q });
    }
    Ok((b * sigma_ref * sigma_ref / q).sqrt())
}

/// Upper limit under a caller-supplied quantile function for the precision:
/// Pr(λ < σ²_ref / U²) = α gives U = σ_ref / √(F⁻¹(α)).
pub fn upper_limit_generic<F>(sigma_ref: f64, alpha: f64, quantile: F) -> Result<f64>
where
    F: Fn(f64) -> f64,
{
    if !(sigma_ref > 0.0) {
        return Err(Error::NonPositive(format!("sigma_ref = {sigma_ref}")));
    }
    let q = quantile(alpha);
    if q <= 0.0 {
        return Err(Error::NonPositiveQuantile { quantile: q });
    }
    Ok(sigma_ref / q.sqrt())
}

/// Statistical median; the mean of the two middle values for even counts.
pub fn aggregate_upper_limit(limits: &[f64]) -> Result<f64> {
    if limits.is_empty() {
        return Err(Error::EmptyInput("upper limits".into()));
    }
    let mut sorted = limits.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite upper limits"));
    let n = sorted.len();
    Ok(if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    })
}

/// Rescaled standard-deviation parameter b_new = U² Φ⁻¹(α, μ, 1) / σ²_ref.
pub fn scaled_sd_parameter(u: f64, alpha: f64, mu: f64, sigma_ref: f64) -> Result<f64> {
    if !(u > 0.0) {
        return Err(Error::NonPositive(format!("U = {u}")));
    }
    if !(sigma_ref > 0.0) {
        return Err(Error::NonPositive(format!("sigma_ref = {sigma_ref}")));
    }
    let q = gaussian_quantile(alpha, mu);
    if q <= 0.0 {
        return Err(Error::NonPositiveQuantile { quantile: q });
    }
    Ok(u * u * q / (sigma_ref * sigma_ref))
}

/// Transfer a standard-deviation parameter between models:
/// b_dst = b_src · σ²_src / σ²_dst.
pub fn transfer_sd_parameter(b_src: f64, sigma_ref_src: f64, sigma_ref_dst: f64) -> Result<f64> {
    for (name, v) in [
        ("b_src", b_src),
        ("sigma_ref_src", sigma_ref_src),
        ("sigma_ref_dst", sigma_ref_dst),
    ] {
        if !(v > 0.0) {
            return Err(Error::NonPositive(format!("{name} = {v}")));
        }
    }
    Ok(b_src * (sigma_ref_src * sigma_ref_src) / (sigma_ref_dst * sigma_ref_dst))
}

/// Precision after subdividing each interval into k parts: the marginal
/// precision of the refined field is the reciprocal of kλ (first order),
/// k³λ (second order, 1D) or k²λ (second order, 2D).
pub fn subdivision_precision(lambda: f64, k: u32, class: ModelClass) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::NonPositive(format!("lambda = {lambda}")));
    }
    if k < 1 {
        return Err(Error::NonPositive("subdivision factor k".into()));
    }
    let k = k as f64;
    match class {
        ModelClass::Rw1 => Ok(k * lambda),
        ModelClass::Rw2 => Ok(k * k * k * lambda),
        ModelClass::Torus1 | ModelClass::Torus2 | ModelClass::Bound1 | ModelClass::Bound2 => {
            Ok(k * k * lambda)
        }
        ModelClass::Custom => Err(Error::UnknownSubdivisionClass("custom".into())),
    }
}

/// Hyperprior inputs echoed into every scaling report.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct HyperpriorInputs {
    pub mu: f64,
    pub b: f64,
    pub alpha: f64,
}

/// One model's scaling results.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelScaling {
    pub label: String,
    pub sigma_ref: f64,
    #[serde(rename = "U")]
    pub upper_limit: f64,
    pub b_new: f64,
}

/// Full scaling report, serialized to the JSON schema
/// `{inputs:{mu,b,alpha}, models:[{label,sigma_ref,U,b_new}], aggregated_U}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScalingReport {
    pub inputs: HyperpriorInputs,
    pub models: Vec<ModelScaling>,
    #[serde(rename = "aggregated_U")]
    pub aggregated_u: f64,
}

/// Run the whole rescaling sequence: per-model upper limits from the shared
/// adjusted b, the median aggregate, then every b_new against the aggregate.
pub fn scaling_pipeline(
    b: f64,
    mu: f64,
    alpha: f64,
    models: &[(String, f64)],
) -> Result<ScalingReport> {
    HyperpriorSpec::gaussian(mu, b, alpha)?;
    if models.is_empty() {
        return Err(Error::EmptyInput("model list".into()));
    }
    let limits = models
        .iter()
        .map(|(_, sigma_ref)| upper_limit(b, *sigma_ref, alpha, mu))
        .collect::<Result<Vec<f64>>>()?;
    let aggregated_u = aggregate_upper_limit(&limits)?;
    let mut out = Vec::with_capacity(models.len());
    for ((label, sigma_ref), u) in models.iter().zip(&limits) {
        out.push(ModelScaling {
            label: label.clone(),
            sigma_ref: *sigma_ref,
            upper_limit: *u,
            b_new: scaled_sd_parameter(aggregated_u, alpha, mu, *sigma_ref)?,
        });
    }
    Ok(ScalingReport {
        inputs: HyperpriorInputs { mu, b, alpha },
        models: out,
        aggregated_u,
    })
}
