//! Command implementations. Each command takes a resolved parameter set,
//! writes its artifacts and returns the process exit code: 0 on success,
//! 1 on numerical or verification failure, 2 on configuration errors
//! (mapped in `main`).

pub mod demo;
pub mod scale;
pub mod sref;
pub mod sweep;
pub mod tablegen;
pub mod tables;
pub mod verify;

use std::path::Path;

use anyhow::{bail, Context, Result};
use igmrf_core::{build, Error, IgmrfModel, ModelClass, DEFAULT_DIMENSION_CAP};
use serde_json::Value;

/// Decompositions beyond this node count need --long-running.
pub const LONG_RUNNING_GATE: usize = 2500;

/// Default seed for commands that draw random numbers.
pub const DEFAULT_SEED: u64 = 20_240;

pub fn gate_dimension(total_nodes: usize, long_running: bool) -> Result<(), Error> {
    if !long_running && total_nodes > LONG_RUNNING_GATE {
        return Err(Error::DimensionOverCap {
            dim: total_nodes,
            cap: LONG_RUNNING_GATE,
        });
    }
    Ok(())
}

/// Dimension cap handed to the spectral layer.
pub fn decomposition_cap(long_running: bool) -> Option<usize> {
    if long_running {
        None
    } else {
        Some(DEFAULT_DIMENSION_CAP)
    }
}

/// Build a built-in model by user-facing name, honouring the gate. The
/// label echoes the name as typed (so `rw2D` sweeps stay recognizable).
pub fn build_named(
    name: &str,
    n1: usize,
    n2: Option<usize>,
    long_running: bool,
) -> Result<IgmrfModel, Error> {
    let class = ModelClass::parse(name)?;
    let model = build(class, n1, n2)?.with_label(name.to_ascii_lowercase());
    gate_dimension(model.dimension(), long_running)?;
    Ok(model)
}

/// `--null-dim` accepts a count or `auto` (use the numeric rank).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NullDimArg {
    Auto,
    Fixed(usize),
}

pub fn parse_null_dim(text: &str) -> Result<NullDimArg> {
    if text.eq_ignore_ascii_case("auto") {
        return Ok(NullDimArg::Auto);
    }
    text.parse::<usize>()
        .map(NullDimArg::Fixed)
        .with_context(|| format!("--null-dim must be an integer or 'auto', got '{text}'"))
}

/// Values for `--models` in the scale command: either `label=sigma_ref`
/// (supplied) or `class:n1[xn2]` (computed on the fly).
#[derive(Debug, Clone)]
pub enum ModelSpec {
    Supplied { label: String, sigma_ref: f64 },
    Computed { name: String, n1: usize, n2: Option<usize> },
}

pub fn parse_model_specs(text: &str) -> Result<Vec<ModelSpec>> {
    let mut out = Vec::new();
    for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        if let Some((label, sigma)) = item.split_once('=') {
            let sigma_ref: f64 = sigma
                .trim()
                .parse()
                .with_context(|| format!("bad sigma_ref in model spec '{item}'"))?;
            out.push(ModelSpec::Supplied {
                label: label.trim().to_string(),
                sigma_ref,
            });
        } else if let Some((name, dims)) = item.split_once(':') {
            let dims = dims.trim();
            let (n1, n2) = match dims.split_once(['x', 'X']) {
                Some((a, b)) => (
                    a.parse()
                        .with_context(|| format!("bad n1 in model spec '{item}'"))?,
                    Some(
                        b.parse()
                            .with_context(|| format!("bad n2 in model spec '{item}'"))?,
                    ),
                ),
                None => (
                    dims.parse()
                        .with_context(|| format!("bad node count in model spec '{item}'"))?,
                    None,
                ),
            };
            out.push(ModelSpec::Computed {
                name: name.trim().to_string(),
                n1,
                n2,
            });
        } else {
            bail!("model spec '{item}' is neither 'label=sigma_ref' nor 'class:n1[xn2]'");
        }
    }
    if out.is_empty() {
        bail!("--models list is empty");
    }
    Ok(out)
}

/// Optional JSON parameter bag backing unset flags.
#[derive(Debug, Default)]
pub struct FileConfig(Option<Value>);

impl FileConfig {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(FileConfig(None)),
            Some(p) => {
                let text = std::fs::read_to_string(p)
                    .with_context(|| format!("reading config file {}", p.display()))?;
                let value: Value = serde_json::from_str(&text)
                    .with_context(|| format!("parsing config file {}", p.display()))?;
                if !value.is_object() {
                    bail!("config file {} must hold a JSON object", p.display());
                }
                if let Some(version) = value.get("schema_version") {
                    if version.as_u64() != Some(1) {
                        bail!(
                            "config file {} has unsupported schema_version {version} (expected 1)",
                            p.display()
                        );
                    }
                }
                Ok(FileConfig(Some(value)))
            }
        }
    }

    fn field(&self, key: &str) -> Option<&Value> {
        self.0.as_ref().and_then(|v| v.get(key))
    }

    pub fn str_field(&self, key: &str) -> Option<String> {
        self.field(key).and_then(|v| v.as_str()).map(str::to_string)
    }

    pub fn f64_field(&self, key: &str) -> Option<f64> {
        self.field(key).and_then(Value::as_f64)
    }

    pub fn usize_field(&self, key: &str) -> Option<usize> {
        self.field(key).and_then(Value::as_u64).map(|v| v as usize)
    }

    pub fn u64_field(&self, key: &str) -> Option<u64> {
        self.field(key).and_then(Value::as_u64)
    }
}
