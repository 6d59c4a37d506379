//! Python bindings for the igmrf pipeline: model construction, reference
//! standard deviations, seeded sampling and hyperprior rescaling.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use igmrf_core::builders::{self, ModelClass, StencilConfig};
use igmrf_core::lattice::{LatticeSpec, Topology};
use igmrf_core::sampling;
use igmrf_core::scaling;
use igmrf_core::spectral::{self, DEFAULT_RANK_TOL};

fn core_err(e: igmrf_core::Error) -> PyErr {
    if e.is_config_error() {
        PyValueError::new_err(e.to_string())
    } else {
        PyRuntimeError::new_err(e.to_string())
    }
}

fn json_to_py<'py>(py: Python<'py>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use serde_json::Value;
    Ok(match value {
        Value::Null => py.None(),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any().unbind(),
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.into_any().unbind()
            } else {
                n.as_f64()
                    .unwrap_or(f64::NAN)
                    .into_pyobject(py)?
                    .into_any()
                    .unbind()
            }
        }
        Value::String(s) => s.into_pyobject(py)?.into_any().unbind(),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.into_any().unbind()
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, v) in map {
                dict.set_item(k, json_to_py(py, v)?)?;
            }
            dict.into_any().unbind()
        }
    })
}

/// A model class with its assembled structure matrix.
#[pyclass(module = "igmrf_py")]
pub struct Model {
    inner: builders::IgmrfModel,
}

#[pymethods]
impl Model {
    /// Build a built-in model: rw1, rw2, torus1, torus2, bound1 (alias
    /// rw2d) or bound2. 2D models default n2 to n1.
    #[new]
    #[pyo3(signature = (model, n1, n2=None))]
    fn new(model: &str, n1: usize, n2: Option<usize>) -> PyResult<Self> {
        let class = ModelClass::parse(model).map_err(core_err)?;
        let inner = builders::build(class, n1, n2)
            .map_err(core_err)?
            .with_label(model.to_ascii_lowercase());
        Ok(Model { inner })
    }

    /// Build a custom model from a stencil config JSON string.
    #[staticmethod]
    #[pyo3(signature = (config_json, n1, n2=None))]
    fn from_stencil_json(config_json: &str, n1: usize, n2: Option<usize>) -> PyResult<Self> {
        let config = StencilConfig::from_json(config_json).map_err(core_err)?;
        let lattice = match n2 {
            None | Some(1) => LatticeSpec::chain(n1).map_err(core_err)?,
            Some(n2) => LatticeSpec::grid(n1, n2, config.topology).map_err(core_err)?,
        };
        let inner = builders::load_custom_stencil(&config, &lattice).map_err(core_err)?;
        Ok(Model { inner })
    }

    #[getter]
    fn label(&self) -> String {
        self.inner.label.clone()
    }

    #[getter]
    fn null_dim(&self) -> usize {
        self.inner.null_dim
    }

    #[getter]
    fn dimension(&self) -> usize {
        self.inner.dimension()
    }

    #[getter]
    fn n1(&self) -> usize {
        self.inner.lattice.n1
    }

    #[getter]
    fn n2(&self) -> usize {
        self.inner.lattice.n2
    }

    #[getter]
    fn is_torus(&self) -> bool {
        self.inner.lattice.topology == Topology::Torus
    }

    /// Upper-triangle coordinate list (i, j, value) of the structure matrix.
    fn structure_entries(&self) -> Vec<(usize, usize, f64)> {
        self.inner.structure.entries().to_vec()
    }

    /// Marginal summary at unit precision: sigma_ref, per-node sigma,
    /// rank diagnostics. `null_dim=None` uses the model default; pass an
    /// integer to override.
    #[pyo3(signature = (null_dim=None))]
    fn summary(&self, py: Python<'_>, null_dim: Option<usize>) -> PyResult<Py<PyAny>> {
        let decomp = spectral::eigendecompose(&self.inner.structure).map_err(core_err)?;
        let k = null_dim.unwrap_or(self.inner.null_dim);
        let summary = spectral::summarize(&decomp, k).map_err(core_err)?;
        let value = serde_json::to_value(&summary)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        json_to_py(py, &value)
    }

    /// Geometric-mean reference standard deviation at unit precision.
    #[pyo3(signature = (null_dim=None))]
    fn sigma_ref(&self, null_dim: Option<usize>) -> PyResult<f64> {
        let decomp = spectral::eigendecompose(&self.inner.structure).map_err(core_err)?;
        let k = null_dim.unwrap_or(self.inner.null_dim);
        Ok(spectral::summarize(&decomp, k).map_err(core_err)?.sigma_ref)
    }

    /// Numeric rank deficiency of the structure matrix.
    fn numeric_null_dim(&self) -> PyResult<usize> {
        let decomp = spectral::eigendecompose(&self.inner.structure).map_err(core_err)?;
        Ok(spectral::numeric_rank(&decomp, DEFAULT_RANK_TOL))
    }

    /// Seeded draws of u ~ N(0, (precision · P)^-) as a list of rows.
    #[pyo3(signature = (precision=1.0, count=1, seed=0, null_dim=None))]
    fn sample(
        &self,
        precision: f64,
        count: usize,
        seed: u64,
        null_dim: Option<usize>,
    ) -> PyResult<Vec<Vec<f64>>> {
        let decomp = spectral::eigendecompose(&self.inner.structure).map_err(core_err)?;
        let k = null_dim.unwrap_or(self.inner.null_dim);
        let batch = sampling::sample_igmrf(&decomp, precision, k, count, seed).map_err(core_err)?;
        Ok(batch
            .draws
            .rows()
            .into_iter()
            .map(|r| r.to_vec())
            .collect())
    }

    /// Monte Carlo verification report as a dict.
    #[pyo3(signature = (precision=1.0, count=20_000, tol=0.02, seed=0))]
    fn verify_montecarlo(
        &self,
        py: Python<'_>,
        precision: f64,
        count: usize,
        tol: f64,
        seed: u64,
    ) -> PyResult<Py<PyAny>> {
        let report = sampling::verify_sref_montecarlo(&self.inner, precision, count, tol, seed)
            .map_err(core_err)?;
        let value = serde_json::to_value(&report)
            .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        json_to_py(py, &value)
    }
}

/// sigma_ref of a built-in model without keeping the Model around.
#[pyfunction]
#[pyo3(signature = (model, n1, n2=None, null_dim=None))]
fn sigma_ref(model: &str, n1: usize, n2: Option<usize>, null_dim: Option<usize>) -> PyResult<f64> {
    Model::new(model, n1, n2)?.sigma_ref(null_dim)
}

/// alpha-quantile of a unit-variance Gaussian centred at mu.
#[pyfunction]
fn gaussian_quantile(alpha: f64, mu: f64) -> f64 {
    scaling::gaussian_quantile(alpha, mu)
}

#[pyfunction]
fn upper_limit(b: f64, sigma_ref: f64, alpha: f64, mu: f64) -> PyResult<f64> {
    scaling::upper_limit(b, sigma_ref, alpha, mu).map_err(core_err)
}

#[pyfunction]
fn aggregate_upper_limit(limits: Vec<f64>) -> PyResult<f64> {
    scaling::aggregate_upper_limit(&limits).map_err(core_err)
}

#[pyfunction]
fn scaled_sd_parameter(u: f64, alpha: f64, mu: f64, sigma_ref: f64) -> PyResult<f64> {
    scaling::scaled_sd_parameter(u, alpha, mu, sigma_ref).map_err(core_err)
}

#[pyfunction]
fn transfer_sd_parameter(b_src: f64, sigma_ref_src: f64, sigma_ref_dst: f64) -> PyResult<f64> {
    scaling::transfer_sd_parameter(b_src, sigma_ref_src, sigma_ref_dst).map_err(core_err)
}

/// Precision after k-fold interval subdivision for a model class.
#[pyfunction]
fn subdivision_precision(precision: f64, k: u32, model: &str) -> PyResult<f64> {
    let class = ModelClass::parse(model).map_err(core_err)?;
    scaling::subdivision_precision(precision, k, class).map_err(core_err)
}

/// Full rescaling pipeline over (label, sigma_ref) pairs; returns the
/// report dict {inputs, models: [{label, sigma_ref, U, b_new}], aggregated_U}.
#[pyfunction]
fn scaling_pipeline(
    py: Python<'_>,
    b: f64,
    mu: f64,
    alpha: f64,
    models: Vec<(String, f64)>,
) -> PyResult<Py<PyAny>> {
    let report = scaling::scaling_pipeline(b, mu, alpha, &models).map_err(core_err)?;
    let value =
        serde_json::to_value(&report).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &value)
}

#[pymodule]
fn igmrf_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Model>()?;
    m.add_function(wrap_pyfunction!(sigma_ref, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian_quantile, m)?)?;
    m.add_function(wrap_pyfunction!(upper_limit, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate_upper_limit, m)?)?;
    m.add_function(wrap_pyfunction!(scaled_sd_parameter, m)?)?;
    m.add_function(wrap_pyfunction!(transfer_sd_parameter, m)?)?;
    m.add_function(wrap_pyfunction!(subdivision_precision, m)?)?;
    m.add_function(wrap_pyfunction!(scaling_pipeline, m)?)?;
    Ok(())
}
