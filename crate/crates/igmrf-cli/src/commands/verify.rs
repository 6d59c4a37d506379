//! `igmrf verify` — seeded Monte Carlo check of σ_λ ≈ σ_ref / √λ.

use std::path::Path;

use anyhow::Result;
use igmrf_core::sampling::{sample_igmrf, verify_sref_montecarlo};
use igmrf_core::spectral::eigendecompose_with_cap;
use serde_json::json;

use crate::commands::{build_named, decomposition_cap};
use crate::output::{fmt_value, write_csv, Envelope, OutputOptions};
use crate::output::write_json;

pub struct VerifyParams {
    pub model: String,
    pub n1: usize,
    pub n2: Option<usize>,
    pub null_dim: Option<usize>,
    pub lambda: f64,
    pub count: usize,
    pub tol: f64,
    pub seed: u64,
    /// Also export the sampled batch, one draw per CSV row.
    pub export_draws: bool,
    pub long_running: bool,
}

pub fn run(params: &VerifyParams, out_dir: &Path, opts: &OutputOptions) -> Result<i32> {
    let mut model = build_named(&params.model, params.n1, params.n2, params.long_running)?;
    if let Some(k) = params.null_dim {
        model = model.with_null_dim(k);
    }
    let report = verify_sref_montecarlo(&model, params.lambda, params.count, params.tol, params.seed)?;

    let config = json!({
        "model": model.label,
        "n1": model.lattice.n1,
        "n2": model.lattice.n2,
        "null_dim": model.null_dim,
        "lambda": params.lambda,
        "count": params.count,
        "tol": params.tol,
        "seed": params.seed,
    });
    let envelope = Envelope::new("verify", config, opts);
    write_json(
        &out_dir.join(format!("verify_{}.json", model.label)),
        &envelope,
        serde_json::to_value(&report)?,
    )?;
    if params.export_draws {
        let decomp =
            eigendecompose_with_cap(&model.structure, decomposition_cap(params.long_running))?;
        let batch = sample_igmrf(
            &decomp,
            params.lambda,
            model.null_dim,
            params.count,
            params.seed,
        )?;
        let header: Vec<String> = (0..batch.nodes()).map(|i| format!("node_{i}")).collect();
        let rows: Vec<Vec<String>> = batch
            .draws
            .rows()
            .into_iter()
            .map(|row| row.iter().map(|&v| fmt_value(v, opts)).collect())
            .collect();
        write_csv(
            &out_dir.join(format!("draws_{}.csv", model.label)),
            &envelope,
            &header.join(","),
            &rows,
        )?;
    }

    println!(
        "{}: empirical {} vs expected {} (rel_dev {:.4e}) -> {}",
        report.model,
        report.empirical_sref,
        report.expected,
        report.rel_dev,
        if report.pass { "pass" } else { "FAIL" }
    );
    if let Some(note) = &report.note {
        eprintln!("note: {note}");
    }
    Ok(if report.pass { 0 } else { 1 })
}

/// Parameter defaults shared with the integration tests.
pub fn default_params(model: &str, n1: usize) -> VerifyParams {
    VerifyParams {
        model: model.to_string(),
        n1,
        n2: None,
        null_dim: None,
        lambda: 1.0,
        count: 20_000,
        tol: 0.02,
        seed: crate::commands::DEFAULT_SEED,
        export_draws: false,
        long_running: false,
    }
}
