//! `igmrf sref` — per-node marginal standard deviations at λ=1 and their
//! geometric mean, for one model.

use std::path::Path;

use anyhow::Result;
use igmrf_core::spectral::{eigendecompose_with_cap, numeric_rank, summarize, DEFAULT_RANK_TOL};
use serde_json::json;

use crate::commands::{build_named, decomposition_cap, NullDimArg};
use crate::output::{fmt_value, write_csv, write_json, Envelope, OutputOptions};

pub struct SrefParams {
    pub model: String,
    pub n1: usize,
    pub n2: Option<usize>,
    pub null_dim: Option<NullDimArg>,
    /// Also write the structure matrix as an i,j,value coordinate list.
    pub dump_matrix: bool,
    pub long_running: bool,
}

pub fn run(params: &SrefParams, out_dir: &Path, opts: &OutputOptions) -> Result<i32> {
    let model = build_named(&params.model, params.n1, params.n2, params.long_running)?;
    let decomp = eigendecompose_with_cap(&model.structure, decomposition_cap(params.long_running))?;
    let null_dim = match params.null_dim {
        None => model.null_dim,
        Some(NullDimArg::Fixed(k)) => k,
        Some(NullDimArg::Auto) => numeric_rank(&decomp, DEFAULT_RANK_TOL),
    };
    let summary = summarize(&decomp, null_dim)?;

    let lattice = model.lattice;
    let config = json!({
        "model": model.label,
        "n1": lattice.n1,
        "n2": lattice.n2,
        "null_dim": null_dim,
        "long_running": params.long_running,
    });
    let envelope = Envelope::new("sref", config, opts);

    let stem = format!("sref_{}_{}x{}", model.label, lattice.n1, lattice.n2);
    let rows: Vec<Vec<String>> = summary
        .sigma_at_unit_lambda
        .iter()
        .enumerate()
        .map(|(i, &sigma)| vec![i.to_string(), fmt_value(sigma, opts)])
        .collect();
    write_csv(
        &out_dir.join(format!("{stem}.csv")),
        &envelope,
        "node_index,sigma_unit_lambda",
        &rows,
    )?;
    write_json(
        &out_dir.join(format!("{stem}.json")),
        &envelope,
        serde_json::to_value(summary_sidecar(&summary))?,
    )?;
    if params.dump_matrix {
        let entries: Vec<Vec<String>> = model
            .structure
            .entries()
            .iter()
            .map(|&(i, j, v)| vec![i.to_string(), j.to_string(), fmt_value(v, opts)])
            .collect();
        write_csv(
            &out_dir.join(format!("matrix_{}_{}x{}.csv", model.label, lattice.n1, lattice.n2)),
            &envelope,
            "i,j,value",
            &entries,
        )?;
    }
    println!(
        "sigma_ref = {} ({} {}x{}, null_dim {}, numeric_null_dim {})",
        fmt_value(summary.sigma_ref, opts),
        model.label,
        lattice.n1,
        lattice.n2,
        summary.null_dim_used,
        summary.numeric_null_dim
    );
    if let Some(warning) = &summary.warning {
        eprintln!("warning: {warning}");
    }
    Ok(0)
}

fn summary_sidecar(summary: &igmrf_core::MarginalSummary) -> serde_json::Value {
    json!({
        "sigma_ref": summary.sigma_ref,
        "null_dim_used": summary.null_dim_used,
        "numeric_null_dim": summary.numeric_null_dim,
        "diagnostics": {
            "smallest_retained_eigenvalue": summary.condition_diagnostics.smallest_retained_eigenvalue,
            "largest_dropped_eigenvalue": summary.condition_diagnostics.largest_dropped_eigenvalue,
        },
        "warning": summary.warning,
    })
}
