//! Builders for the six built-in model classes plus user-defined stencils.
//!
//! Every builder produces its structure matrix through an [`IncrementSet`],
//! so positive semidefiniteness holds by construction. The 2D constructions
//! are calibrated against published reference values:
//!
//! * `torus1` — squared 5-point Laplacian on a torus (13-point biharmonic
//!   interior pattern {20, −8, 2, 1}).
//! * `torus2` — squared isotropic 9-point Laplacian on a torus, increment
//!   row {−20 centre, +4 axial, +1 diagonal}.
//! * `bound1` — squared lattice graph Laplacian; boundary rows keep only
//!   in-range neighbours with the centre reduced to the node degree. Note
//!   this matrix annihilates constants only (numeric rank deficiency 1)
//!   while its conventional rank deficiency is 3; see the spectral module
//!   for how the discrepancy is surfaced.
//! * `bound2` — thin-plate energy D_ddᵀD_dd + w·D_dsᵀD_ds + D_ssᵀD_ss with
//!   free boundaries and mixed-term weight w = 2 by default.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{
    assemble_structure_matrix, IncrementSet, LatticeKind, LatticeSpec, SparseSymmetricMatrix,
    Topology,
};

/// Default mixed-derivative weight in the `bound2` thin-plate form.
pub const BOUND2_CROSS_WEIGHT: f64 = 2.0;

/// The model classes with built-in constructions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelClass {
    Rw1,
    Rw2,
    Torus1,
    Torus2,
    Bound1,
    Bound2,
    Custom,
}

impl ModelClass {
    /// Parse a user-facing model name. `rw2d` is accepted as an alias for
    /// the bounded 2D second-order model, matching its use in the reference
    /// tables.
    pub fn parse(name: &str) -> Result<Self> {
        match name.to_ascii_lowercase().as_str() {
            "rw1" => Ok(ModelClass::Rw1),
            "rw2" => Ok(ModelClass::Rw2),
            "torus1" => Ok(ModelClass::Torus1),
            "torus2" => Ok(ModelClass::Torus2),
            "bound1" | "rw2d" => Ok(ModelClass::Bound1),
            "bound2" => Ok(ModelClass::Bound2),
            other => Err(Error::InvalidLattice(format!("unknown model class '{other}'"))),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ModelClass::Rw1 => "rw1",
            ModelClass::Rw2 => "rw2",
            ModelClass::Torus1 => "torus1",
            ModelClass::Torus2 => "torus2",
            ModelClass::Bound1 => "bound1",
            ModelClass::Bound2 => "bound2",
            ModelClass::Custom => "custom",
        }
    }

    /// Nominal rank deficiency: 1 (rw1), 2 (rw2), 3 (all 2D second-order).
    pub fn default_null_dim(&self) -> usize {
        match self {
            ModelClass::Rw1 => 1,
            ModelClass::Rw2 => 2,
            ModelClass::Custom => 0,
            _ => 3,
        }
    }

    pub fn is_two_dimensional(&self) -> bool {
        matches!(
            self,
            ModelClass::Torus1 | ModelClass::Torus2 | ModelClass::Bound1 | ModelClass::Bound2
        )
    }
}

/// A model class together with its assembled structure matrix.
#[derive(Debug, Clone)]
pub struct IgmrfModel {
    pub model_class: ModelClass,
    pub lattice: LatticeSpec,
    pub structure: SparseSymmetricMatrix,
    /// Nominal rank deficiency used when inverting the spectrum.
    pub null_dim: usize,
    pub label: String,
}

impl IgmrfModel {
    pub fn with_null_dim(mut self, null_dim: usize) -> Self {
        self.null_dim = null_dim;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn dimension(&self) -> usize {
        self.structure.dimension()
    }
}

fn grid_index(d: i64, s: i64, lattice: &LatticeSpec) -> usize {
    let n1 = lattice.n1 as i64;
    let n2 = lattice.n2 as i64;
    (d.rem_euclid(n1) * n2 + s.rem_euclid(n2)) as usize
}

/// Increment rows for any built-in class on a given lattice.
pub fn build_increments(class: ModelClass, lattice: &LatticeSpec) -> Result<IncrementSet> {
    match class {
        ModelClass::Rw1 => rw1_increments(lattice),
        ModelClass::Rw2 => rw2_increments(lattice),
        ModelClass::Torus1 => torus1_increments(lattice),
        ModelClass::Torus2 => torus2_increments(lattice),
        ModelClass::Bound1 => bound1_increments(lattice),
        ModelClass::Bound2 => bound2_increments(lattice, BOUND2_CROSS_WEIGHT),
        ModelClass::Custom => Err(Error::InvalidStencil(
            "custom models are built from a StencilConfig".into(),
        )),
    }
}

fn rw1_increments(lattice: &LatticeSpec) -> Result<IncrementSet> {
    let n = lattice.n1;
    let mut inc = IncrementSet::new(n);
    for s in 0..n - 1 {
        inc.push_row(&[(s, -1.0), (s + 1, 1.0)])?;
    }
    Ok(inc)
}

fn rw2_increments(lattice: &LatticeSpec) -> Result<IncrementSet> {
    let n = lattice.n1;
    let mut inc = IncrementSet::new(n);
    for s in 0..n - 2 {
        inc.push_row(&[(s, 1.0), (s + 1, -2.0), (s + 2, 1.0)])?;
    }
    Ok(inc)
}

fn torus1_increments(lattice: &LatticeSpec) -> Result<IncrementSet> {
    let mut inc = IncrementSet::new(lattice.total_nodes());
    for d in 0..lattice.n1 as i64 {
        for s in 0..lattice.n2 as i64 {
            inc.push_row(&[
                (grid_index(d, s, lattice), -4.0),
                (grid_index(d - 1, s, lattice), 1.0),
                (grid_index(d + 1, s, lattice), 1.0),
                (grid_index(d, s - 1, lattice), 1.0),
                (grid_index(d, s + 1, lattice), 1.0),
            ])?;
        }
    }
    Ok(inc)
}

fn torus2_increments(lattice: &LatticeSpec) -> Result<IncrementSet> {
    let mut inc = IncrementSet::new(lattice.total_nodes());
    for d in 0..lattice.n1 as i64 {
        for s in 0..lattice.n2 as i64 {
            inc.push_row(&[
                (grid_index(d, s, lattice), -20.0),
                (grid_index(d - 1, s, lattice), 4.0),
                (grid_index(d + 1, s, lattice), 4.0),
                (grid_index(d, s - 1, lattice), 4.0),
                (grid_index(d, s + 1, lattice), 4.0),
                (grid_index(d - 1, s - 1, lattice), 1.0),
                (grid_index(d - 1, s + 1, lattice), 1.0),
                (grid_index(d + 1, s - 1, lattice), 1.0),
                (grid_index(d + 1, s + 1, lattice), 1.0),
            ])?;
        }
    }
    Ok(inc)
}

fn bound1_increments(lattice: &LatticeSpec) -> Result<IncrementSet> {
    let n1 = lattice.n1 as i64;
    let n2 = lattice.n2 as i64;
    let mut inc = IncrementSet::new(lattice.total_nodes());
    for d in 0..n1 {
        for s in 0..n2 {
            let mut row: Vec<(usize, f64)> = Vec::with_capacity(5);
            let mut degree = 0.0;
            for (dd, ss) in [(d - 1, s), (d + 1, s), (d, s - 1), (d, s + 1)] {
                if dd >= 0 && dd < n1 && ss >= 0 && ss < n2 {
                    row.push((grid_index(dd, ss, lattice), -1.0));
                    degree += 1.0;
                }
            }
            row.push((grid_index(d, s, lattice), degree));
            inc.push_row(&row)?;
        }
    }
    Ok(inc)
}

fn bound2_increments(lattice: &LatticeSpec, cross_weight: f64) -> Result<IncrementSet> {
    if cross_weight < 0.0 {
        return Err(Error::NonPositive(format!(
            "bound2 cross weight must be nonnegative, got {cross_weight}"
        )));
    }
    let n1 = lattice.n1 as i64;
    let n2 = lattice.n2 as i64;
    let mut inc = IncrementSet::new(lattice.total_nodes());
    // second differences along the first axis
    for d in 1..n1 - 1 {
        for s in 0..n2 {
            inc.push_row(&[
                (grid_index(d - 1, s, lattice), 1.0),
                (grid_index(d, s, lattice), -2.0),
                (grid_index(d + 1, s, lattice), 1.0),
            ])?;
        }
    }
    // second differences along the second axis
    for d in 0..n1 {
        for s in 1..n2 - 1 {
            inc.push_row(&[
                (grid_index(d, s - 1, lattice), 1.0),
                (grid_index(d, s, lattice), -2.0),
                (grid_index(d, s + 1, lattice), 1.0),
            ])?;
        }
    }
    // mixed differences on each unit cell, entering the quadratic form with
    // weight `cross_weight`
    let w = cross_weight.sqrt();
    if w > 0.0 {
        for d in 0..n1 - 1 {
            for s in 0..n2 - 1 {
                inc.push_row(&[
                    (grid_index(d, s, lattice), w),
                    (grid_index(d + 1, s, lattice), -w),
                    (grid_index(d, s + 1, lattice), -w),
                    (grid_index(d + 1, s + 1, lattice), w),
                ])?;
            }
        }
    }
    Ok(inc)
}

fn finish(class: ModelClass, lattice: LatticeSpec, inc: &IncrementSet) -> Result<IgmrfModel> {
    Ok(IgmrfModel {
        model_class: class,
        lattice,
        structure: assemble_structure_matrix(inc)?,
        null_dim: class.default_null_dim(),
        label: class.name().to_string(),
    })
}

/// 1D first-order model: tridiagonal P with diagonal (1, 2, …, 2, 1).
pub fn build_rw1(n: usize) -> Result<IgmrfModel> {
    let lattice = LatticeSpec::chain(n)?;
    let inc = rw1_increments(&lattice)?;
    finish(ModelClass::Rw1, lattice, &inc)
}

/// 1D second-order model: pentadiagonal P from stacked (1, −2, 1) rows.
pub fn build_rw2(n: usize) -> Result<IgmrfModel> {
    if n < 5 {
        return Err(Error::InvalidLattice(format!(
            "rw2 needs at least 5 nodes, got {n}"
        )));
    }
    let lattice = LatticeSpec::chain(n)?;
    let inc = rw2_increments(&lattice)?;
    finish(ModelClass::Rw2, lattice, &inc)
}

/// 2D second-order model on a torus, squared 5-point Laplacian.
pub fn build_torus1(n1: usize, n2: usize) -> Result<IgmrfModel> {
    let lattice = LatticeSpec::grid(n1, n2, Topology::Torus)?;
    let inc = torus1_increments(&lattice)?;
    finish(ModelClass::Torus1, lattice, &inc)
}

/// 2D second-order model on a torus, squared isotropic 9-point Laplacian.
pub fn build_torus2(n1: usize, n2: usize) -> Result<IgmrfModel> {
    let lattice = LatticeSpec::grid(n1, n2, Topology::Torus)?;
    let inc = torus2_increments(&lattice)?;
    finish(ModelClass::Torus2, lattice, &inc)
}

/// 2D second-order model on a bounded grid, squared graph Laplacian with
/// degree-reduced boundary rows.
pub fn build_bound1(n1: usize, n2: usize) -> Result<IgmrfModel> {
    let lattice = LatticeSpec::grid(n1, n2, Topology::Bounded)?;
    let inc = bound1_increments(&lattice)?;
    finish(ModelClass::Bound1, lattice, &inc)
}

/// 2D second-order model on a bounded grid, thin-plate form with the
/// default mixed-term weight.
pub fn build_bound2(n1: usize, n2: usize) -> Result<IgmrfModel> {
    build_bound2_weighted(n1, n2, BOUND2_CROSS_WEIGHT)
}

/// Thin-plate form with an explicit mixed-term weight.
pub fn build_bound2_weighted(n1: usize, n2: usize, cross_weight: f64) -> Result<IgmrfModel> {
    let lattice = LatticeSpec::grid(n1, n2, Topology::Bounded)?;
    let inc = bound2_increments(&lattice, cross_weight)?;
    finish(ModelClass::Bound2, lattice, &inc)
}

/// Build any built-in class from (n1, optional n2). 1D classes ignore n2;
/// 2D classes default n2 to n1.
pub fn build(class: ModelClass, n1: usize, n2: Option<usize>) -> Result<IgmrfModel> {
    match class {
        ModelClass::Rw1 => build_rw1(n1),
        ModelClass::Rw2 => build_rw2(n1),
        ModelClass::Torus1 => build_torus1(n1, n2.unwrap_or(n1)),
        ModelClass::Torus2 => build_torus2(n1, n2.unwrap_or(n1)),
        ModelClass::Bound1 => build_bound1(n1, n2.unwrap_or(n1)),
        ModelClass::Bound2 => build_bound2(n1, n2.unwrap_or(n1)),
        ModelClass::Custom => Err(Error::InvalidStencil(
            "custom models are built from a StencilConfig".into(),
        )),
    }
}

// ---------------------------------------------------------------------------
// User-defined stencils
// ---------------------------------------------------------------------------

/// Where a template's anchor node may lie.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Region {
    Interior,
    Edges,
    Corners,
    All,
}

/// How a template behaves when an offset leaves a bounded lattice.
///
/// * `strict` — the template must fit at every anchor of its region
///   (config error otherwise).
/// * `skip` — anchors where the pattern does not fit produce no row.
/// * `clip` — out-of-range offsets are dropped and their coefficients folded
///   into the anchor, preserving the zero-sum property. Rows that collapse
///   to fewer than two nodes are skipped.
///
/// Ignored on torus lattices, where offsets wrap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoundaryRule {
    #[default]
    Strict,
    Skip,
    Clip,
}

fn default_weight() -> f64 {
    1.0
}

fn default_order() -> u32 {
    2
}

/// One increment template: an offset pattern applied at every anchor node
/// of its region.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StencilTemplate {
    pub region: Region,
    #[serde(default)]
    pub boundary: BoundaryRule,
    /// Multiplies every coefficient of the emitted rows.
    #[serde(default = "default_weight")]
    pub weight: f64,
    /// Declared increment order; templates of order ≥ 2 must have
    /// coefficients summing to zero.
    #[serde(default = "default_order")]
    pub order: u32,
    /// (row offset, column offset, coefficient) triples; (0, 0) is the anchor.
    pub offsets: Vec<(i64, i64, f64)>,
}

/// A complete user-defined model description, loadable from JSON.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StencilConfig {
    pub schema_version: u32,
    pub name: String,
    pub topology: Topology,
    pub null_dim: usize,
    pub templates: Vec<StencilTemplate>,
}

/// Current stencil config schema version.
pub const STENCIL_SCHEMA_VERSION: u32 = 1;

impl StencilConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: StencilConfig = serde_json::from_str(text)
            .map_err(|e| Error::InvalidStencil(format!("JSON parse error: {e}")))?;
        if config.schema_version != STENCIL_SCHEMA_VERSION {
            return Err(Error::InvalidStencil(format!(
                "unsupported schema_version {} (expected {STENCIL_SCHEMA_VERSION})",
                config.schema_version
            )));
        }
        Ok(config)
    }

    fn validate(&self, lattice: &LatticeSpec) -> Result<()> {
        if self.topology != lattice.topology {
            return Err(Error::InvalidStencil(format!(
                "config topology {:?} does not match lattice topology {:?}",
                self.topology, lattice.topology
            )));
        }
        if self.null_dim >= lattice.total_nodes() {
            return Err(Error::InvalidStencil(format!(
                "null_dim {} must be below the node count {}",
                self.null_dim,
                lattice.total_nodes()
            )));
        }
        if self.templates.is_empty() {
            return Err(Error::InvalidStencil("no templates given".into()));
        }
        for (t, template) in self.templates.iter().enumerate() {
            if template.offsets.len() < 2 {
                return Err(Error::InvalidStencil(format!(
                    "template {t} has fewer than 2 offsets"
                )));
            }
            if !template.weight.is_finite() || template.weight == 0.0 {
                return Err(Error::InvalidStencil(format!(
                    "template {t} has invalid weight {}",
                    template.weight
                )));
            }
            if template.order >= 2 {
                let sum: f64 = template.offsets.iter().map(|&(_, _, c)| c).sum();
                let scale: f64 = template
                    .offsets
                    .iter()
                    .map(|&(_, _, c)| c.abs())
                    .fold(0.0, f64::max);
                if sum.abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::InvalidStencil(format!(
                        "template {t} is declared order {} but its coefficients sum to {sum}",
                        template.order
                    )));
                }
            }
            if lattice.kind == LatticeKind::Chain
                && template.offsets.iter().any(|&(_, ds, _)| ds != 0)
            {
                return Err(Error::InvalidStencil(format!(
                    "template {t} has column offsets on a chain lattice"
                )));
            }
        }
        Ok(())
    }
}

/// Classify a 0-based node for region membership on a bounded lattice.
fn node_region(d: usize, s: usize, lattice: &LatticeSpec) -> Region {
    if lattice.topology == Topology::Torus {
        return Region::Interior;
    }
    let d_extreme = d == 0 || d == lattice.n1 - 1;
    let s_extreme = lattice.n2 > 1 && (s == 0 || s == lattice.n2 - 1);
    match (lattice.kind, d_extreme, s_extreme) {
        (LatticeKind::Chain, true, _) => Region::Corners,
        (LatticeKind::Chain, false, _) => Region::Interior,
        (LatticeKind::Grid, true, true) => Region::Corners,
        (LatticeKind::Grid, true, false) | (LatticeKind::Grid, false, true) => Region::Edges,
        (LatticeKind::Grid, false, false) => Region::Interior,
    }
}

fn region_matches(region: Region, node: Region) -> bool {
    region == Region::All || region == node
}

/// Assemble the increment rows described by a stencil config.
pub fn stencil_increments(config: &StencilConfig, lattice: &LatticeSpec) -> Result<IncrementSet> {
    config.validate(lattice)?;
    let n1 = lattice.n1 as i64;
    let n2 = lattice.n2 as i64;
    let mut inc = IncrementSet::new(lattice.total_nodes());
    for (t, template) in config.templates.iter().enumerate() {
        for d in 0..n1 {
            for s in 0..n2 {
                if !region_matches(template.region, node_region(d as usize, s as usize, lattice)) {
                    continue;
                }
                let mut row: Vec<(usize, f64)> = Vec::with_capacity(template.offsets.len());
                let mut clipped = 0.0;
                let mut fits = true;
                for &(dr, dc, coef) in &template.offsets {
                    let (dd, ss) = (d + dr, s + dc);
                    let in_range = dd >= 0 && dd < n1 && ss >= 0 && ss < n2;
                    if lattice.topology == Topology::Torus || in_range {
                        row.push((grid_index(dd, ss, lattice), template.weight * coef));
                    } else {
                        match template.boundary {
                            BoundaryRule::Strict => {
                                return Err(Error::InvalidStencil(format!(
                                    "template {t} references ({}, {}) outside the bounded lattice \
                                     from anchor ({}, {}); use boundary \"skip\" or \"clip\" if intended",
                                    dd + 1,
                                    ss + 1,
                                    d + 1,
                                    s + 1
                                )))
                            }
                            BoundaryRule::Skip => {
                                fits = false;
                                break;
                            }
                            BoundaryRule::Clip => clipped += template.weight * coef,
                        }
                    }
                }
                if !fits {
                    continue;
                }
                if clipped != 0.0 {
                    row.push((grid_index(d, s, lattice), clipped));
                }
                // a fully clipped row can collapse onto the anchor; skip it
                let mut merged = std::collections::BTreeMap::new();
                for &(i, c) in &row {
                    *merged.entry(i).or_insert(0.0) += c;
                }
                merged.retain(|_, c| *c != 0.0);
                if merged.len() < 2 {
                    continue;
                }
                let entries: Vec<(usize, f64)> = merged.into_iter().collect();
                inc.push_row(&entries)?;
            }
        }
    }
    if inc.row_count() == 0 {
        return Err(Error::InvalidStencil(
            "config produced no increment rows on this lattice".into(),
        ));
    }
    Ok(inc)
}

/// Build a custom model from a stencil config.
pub fn load_custom_stencil(config: &StencilConfig, lattice: &LatticeSpec) -> Result<IgmrfModel> {
    let inc = stencil_increments(config, lattice)?;
    Ok(IgmrfModel {
        model_class: ModelClass::Custom,
        lattice: *lattice,
        structure: assemble_structure_matrix(&inc)?,
        null_dim: config.null_dim,
        label: config.name.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp_d(lattice: &LatticeSpec) -> Vec<f64> {
        let mut v = vec![0.0; lattice.total_nodes()];
        for d in 0..lattice.n1 {
            for s in 0..lattice.n2 {
                v[d * lattice.n2 + s] = (d + 1) as f64;
            }
        }
        v
    }

    fn ramp_s(lattice: &LatticeSpec) -> Vec<f64> {
        let mut v = vec![0.0; lattice.total_nodes()];
        for d in 0..lattice.n1 {
            for s in 0..lattice.n2 {
                v[d * lattice.n2 + s] = (s + 1) as f64;
            }
        }
        v
    }

    fn assert_annihilates(m: &IgmrfModel, v: &[f64], tol: f64) {
        let pv = m.structure.matvec(v);
        let worst = pv.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
        assert!(worst <= tol, "max |P v| = {worst}");
    }

    #[test]
    fn rw1_matrix_and_null_vector() {
        let m = build_rw1(3).unwrap();
        let d = m.structure.to_dense();
        let expected = [[1.0, -1.0, 0.0], [-1.0, 2.0, -1.0], [0.0, -1.0, 1.0]];
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(d[[i, j]], expected[i][j]);
            }
        }
        assert_eq!(m.null_dim, 1);
        assert_annihilates(&m, &[1.0; 3], 1e-12);
        assert!(build_rw1(2).is_err());
    }

    #[test]
    fn rw2_annihilates_linear_ramp() {
        let m = build_rw2(9).unwrap();
        assert_eq!(m.null_dim, 2);
        let ramp: Vec<f64> = (1..=9).map(|i| i as f64).collect();
        assert_annihilates(&m, &ramp, 1e-12);
        assert!(build_rw2(4).is_err());
    }

    #[test]
    fn torus1_rows_sum_to_zero_and_diag_is_20() {
        let m = build_torus1(5, 5).unwrap();
        assert_eq!(m.null_dim, 3);
        assert_annihilates(&m, &[1.0; 25], 1e-12);
        let d = m.structure.to_dense();
        for i in 0..25 {
            assert_eq!(d[[i, i]], 20.0);
        }
    }

    #[test]
    fn torus2_rows_sum_to_zero_and_diag_is_468() {
        let m = build_torus2(5, 5).unwrap();
        assert_annihilates(&m, &[1.0; 25], 1e-12);
        let d = m.structure.to_dense();
        for i in 0..25 {
            assert_eq!(d[[i, i]], 468.0);
        }
    }

    #[test]
    fn bound1_stencil_weights() {
        let m = build_bound1(7, 7).unwrap();
        assert_annihilates(&m, &[1.0; 49], 1e-12);
        let d = m.structure.to_dense();
        // corner, edge and deep-interior diagonal entries of L^2
        assert_eq!(d[[0, 0]], 6.0);
        assert_eq!(d[[1, 1]], 12.0);
        assert_eq!(d[[2 * 7 + 2, 2 * 7 + 2]], 20.0);
    }

    #[test]
    fn bound2_null_space_contains_both_ramps() {
        let m = build_bound2(6, 8).unwrap();
        let lattice = m.lattice;
        assert_annihilates(&m, &vec![1.0; 48], 1e-10);
        assert_annihilates(&m, &ramp_d(&lattice), 1e-10);
        assert_annihilates(&m, &ramp_s(&lattice), 1e-10);
    }

    #[test]
    fn dims_too_small_rejected() {
        assert!(build_torus1(4, 5).is_err());
        assert!(build_torus2(5, 4).is_err());
        assert!(build_bound1(4, 4).is_err());
        assert!(build_bound2(3, 9).is_err());
    }

    #[test]
    fn custom_stencil_replicates_rw1() {
        let lattice = LatticeSpec::chain(7).unwrap();
        let config = StencilConfig {
            schema_version: 1,
            name: "rw1-replica".into(),
            topology: Topology::Bounded,
            null_dim: 1,
            templates: vec![StencilTemplate {
                region: Region::All,
                boundary: BoundaryRule::Skip,
                weight: 1.0,
                order: 1,
                offsets: vec![(0, 0, -1.0), (1, 0, 1.0)],
            }],
        };
        let custom = load_custom_stencil(&config, &lattice).unwrap();
        let builtin = build_rw1(7).unwrap();
        assert_eq!(custom.structure.entries(), builtin.structure.entries());
    }

    #[test]
    fn custom_stencil_replicates_bound1_via_clip() {
        let lattice = LatticeSpec::grid(6, 5, Topology::Bounded).unwrap();
        let config = StencilConfig {
            schema_version: 1,
            name: "bound1-replica".into(),
            topology: Topology::Bounded,
            null_dim: 3,
            templates: vec![StencilTemplate {
                region: Region::All,
                boundary: BoundaryRule::Clip,
                weight: 1.0,
                order: 2,
                offsets: vec![
                    (0, 0, 4.0),
                    (-1, 0, -1.0),
                    (1, 0, -1.0),
                    (0, -1, -1.0),
                    (0, 1, -1.0),
                ],
            }],
        };
        let custom = load_custom_stencil(&config, &lattice).unwrap();
        let builtin = build_bound1(6, 5).unwrap();
        assert_eq!(custom.structure.entries(), builtin.structure.entries());
    }

    #[test]
    fn custom_stencil_replicates_torus_models() {
        let lattice = LatticeSpec::grid(5, 6, Topology::Torus).unwrap();
        let config = StencilConfig {
            schema_version: 1,
            name: "torus1-replica".into(),
            topology: Topology::Torus,
            null_dim: 3,
            templates: vec![StencilTemplate {
                region: Region::All,
                boundary: BoundaryRule::Strict,
                weight: 1.0,
                order: 2,
                offsets: vec![
                    (0, 0, -4.0),
                    (-1, 0, 1.0),
                    (1, 0, 1.0),
                    (0, -1, 1.0),
                    (0, 1, 1.0),
                ],
            }],
        };
        let custom = load_custom_stencil(&config, &lattice).unwrap();
        let builtin = build_torus1(5, 6).unwrap();
        assert_eq!(custom.structure.entries(), builtin.structure.entries());
    }

    #[test]
    fn custom_stencil_replicates_rw2() {
        let lattice = LatticeSpec::chain(9).unwrap();
        let config = StencilConfig {
            schema_version: 1,
            name: "rw2-replica".into(),
            topology: Topology::Bounded,
            null_dim: 2,
            templates: vec![StencilTemplate {
                region: Region::All,
                boundary: BoundaryRule::Skip,
                weight: 1.0,
                order: 2,
                offsets: vec![(0, 0, 1.0), (1, 0, -2.0), (2, 0, 1.0)],
            }],
        };
        let custom = load_custom_stencil(&config, &lattice).unwrap();
        let builtin = build_rw2(9).unwrap();
        assert_eq!(custom.structure.entries(), builtin.structure.entries());
    }

    #[test]
    fn custom_stencil_replicates_bound2_with_weighted_template() {
        let lattice = LatticeSpec::grid(6, 7, Topology::Bounded).unwrap();
        let second_diff = |axis: usize| -> Vec<(i64, i64, f64)> {
            if axis == 0 {
                vec![(-1, 0, 1.0), (0, 0, -2.0), (1, 0, 1.0)]
            } else {
                vec![(0, -1, 1.0), (0, 0, -2.0), (0, 1, 1.0)]
            }
        };
        let config = StencilConfig {
            schema_version: 1,
            name: "bound2-replica".into(),
            topology: Topology::Bounded,
            null_dim: 3,
            templates: vec![
                StencilTemplate {
                    region: Region::All,
                    boundary: BoundaryRule::Skip,
                    weight: 1.0,
                    order: 2,
                    offsets: second_diff(0),
                },
                StencilTemplate {
                    region: Region::All,
                    boundary: BoundaryRule::Skip,
                    weight: 1.0,
                    order: 2,
                    offsets: second_diff(1),
                },
                StencilTemplate {
                    region: Region::All,
                    boundary: BoundaryRule::Skip,
                    weight: BOUND2_CROSS_WEIGHT.sqrt(),
                    order: 2,
                    offsets: vec![(0, 0, 1.0), (1, 0, -1.0), (0, 1, -1.0), (1, 1, 1.0)],
                },
            ],
        };
        let custom = load_custom_stencil(&config, &lattice).unwrap();
        let builtin = build_bound2(6, 7).unwrap();
        assert_eq!(custom.structure.entries(), builtin.structure.entries());
    }

    #[test]
    fn isolated_increment_yields_rank_one() {
        let lattice = LatticeSpec::chain(3).unwrap();
        let config = StencilConfig {
            schema_version: 1,
            name: "isolated".into(),
            topology: Topology::Bounded,
            null_dim: 2,
            templates: vec![StencilTemplate {
                region: Region::Corners,
                boundary: BoundaryRule::Skip,
                weight: 1.0,
                order: 1,
                offsets: vec![(0, 0, -1.0), (1, 0, 1.0)],
            }],
        };
        let custom = load_custom_stencil(&config, &lattice).unwrap();
        // only the first chain endpoint fits the forward pattern
        assert_eq!(
            custom.structure.entries(),
            &[(0, 0, 1.0), (0, 1, -1.0), (1, 1, 1.0)]
        );
    }

    #[test]
    fn strict_template_outside_lattice_is_an_error() {
        let lattice = LatticeSpec::grid(5, 5, Topology::Bounded).unwrap();
        let config = StencilConfig {
            schema_version: 1,
            name: "bad".into(),
            topology: Topology::Bounded,
            null_dim: 3,
            templates: vec![StencilTemplate {
                region: Region::All,
                boundary: BoundaryRule::Strict,
                weight: 1.0,
                order: 2,
                offsets: vec![
                    (0, 0, -4.0),
                    (-1, 0, 1.0),
                    (1, 0, 1.0),
                    (0, -1, 1.0),
                    (0, 1, 1.0),
                ],
            }],
        };
        assert!(matches!(
            load_custom_stencil(&config, &lattice),
            Err(Error::InvalidStencil(_))
        ));
    }

    #[test]
    fn second_order_template_must_sum_to_zero() {
        let lattice = LatticeSpec::chain(5).unwrap();
        let config = StencilConfig {
            schema_version: 1,
            name: "bad-sum".into(),
            topology: Topology::Bounded,
            null_dim: 1,
            templates: vec![StencilTemplate {
                region: Region::Interior,
                boundary: BoundaryRule::Skip,
                weight: 1.0,
                order: 2,
                offsets: vec![(-1, 0, 1.0), (0, 0, -1.5), (1, 0, 1.0)],
            }],
        };
        assert!(matches!(
            load_custom_stencil(&config, &lattice),
            Err(Error::InvalidStencil(_))
        ));
    }

    #[test]
    fn stencil_config_json_round_trip() {
        let text = r#"{
            "schema_version": 1,
            "name": "laplacian",
            "topology": "torus",
            "null_dim": 3,
            "templates": [
                {
                    "region": "all",
                    "offsets": [[0,0,-4.0],[-1,0,1.0],[1,0,1.0],[0,-1,1.0],[0,1,1.0]]
                }
            ]
        }"#;
        let config = StencilConfig::from_json(text).unwrap();
        assert_eq!(config.templates[0].boundary, BoundaryRule::Strict);
        assert_eq!(config.templates[0].weight, 1.0);
        assert_eq!(config.templates[0].order, 2);
        let lattice = LatticeSpec::grid(5, 5, Topology::Torus).unwrap();
        let model = load_custom_stencil(&config, &lattice).unwrap();
        assert_eq!(
            model.structure.entries(),
            build_torus1(5, 5).unwrap().structure.entries()
        );
    }
}
