//! Index sets, increment rows and sparse symmetric assembly.
//!
//! Everything downstream is built from the same primitive: a set of sparse
//! increment rows D over the nodes of a lattice, assembled into the
//! structure matrix P = DᵀD. Assembling through increments guarantees P is
//! symmetric positive semidefinite by construction.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Whether the index set is a 1D chain or a 2D grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Chain,
    Grid,
}

/// Neighbourhood closure at the lattice edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    Bounded,
    Torus,
}

/// Geometry of the node index set: a 1D chain or a 2D grid, bounded or cyclic.
///
/// Nodes are addressed by 1-based coordinates (d, s) with 1 ≤ d ≤ n1 and
/// 1 ≤ s ≤ n2, flattened row-major. Chains fix n2 = 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeSpec {
    pub kind: LatticeKind,
    pub n1: usize,
    pub n2: usize,
    pub topology: Topology,
}

impl LatticeSpec {
    /// A bounded chain of `n` nodes. Second-order stencils need n ≥ 3.
    pub fn chain(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidLattice(format!(
                "chain needs at least 3 nodes, got {n}"
            )));
        }
        Ok(LatticeSpec {
            kind: LatticeKind::Chain,
            n1: n,
            n2: 1,
            topology: Topology::Bounded,
        })
    }

    /// An n1 × n2 grid. Second-order stencils need interior room: n1, n2 ≥ 5.
    pub fn grid(n1: usize, n2: usize, topology: Topology) -> Result<Self> {
        if n1 < 5 || n2 < 5 {
            return Err(Error::InvalidLattice(format!(
                "grid needs n1 >= 5 and n2 >= 5, got {n1}x{n2}"
            )));
        }
        Ok(LatticeSpec {
            kind: LatticeKind::Grid,
            n1,
            n2,
            topology,
        })
    }

    pub fn total_nodes(&self) -> usize {
        self.n1 * self.n2
    }
}

/// Row-major linear index of 1-based coordinates (d, s) on the lattice.
pub fn node_index(d: usize, s: usize, lattice: &LatticeSpec) -> Result<usize> {
    if d < 1 || d > lattice.n1 || s < 1 || s > lattice.n2 {
        return Err(Error::IndexOutOfRange {
            d,
            s,
            n1: lattice.n1,
            n2: lattice.n2,
        });
    }
    Ok((d - 1) * lattice.n2 + (s - 1))
}

/// A stack of sparse increment rows over `dimension` nodes.
///
/// Each row is one increment Δ applied at one location, stored as sorted
/// (node, coefficient) pairs. Rows with fewer than two nonzero coefficients
/// are rejected: a single-node "increment" carries no dependence structure.
#[derive(Debug, Clone)]
pub struct IncrementSet {
    rows: Vec<Vec<(usize, f64)>>,
    dimension: usize,
}

impl IncrementSet {
    pub fn new(dimension: usize) -> Self {
        IncrementSet {
            rows: Vec::new(),
            dimension,
        }
    }

    /// Add one increment row given as (node, coefficient) pairs.
    /// Duplicate node entries are merged; exact zeros are dropped.
    pub fn push_row(&mut self, entries: &[(usize, f64)]) -> Result<()> {
        let row_id = self.rows.len();
        let mut row: Vec<(usize, f64)> = Vec::with_capacity(entries.len());
        for &(index, coef) in entries {
            if index >= self.dimension {
                return Err(Error::IncrementOutOfRange {
                    row: row_id,
                    index,
                    dim: self.dimension,
                });
            }
            match row.iter_mut().find(|(i, _)| *i == index) {
                Some((_, c)) => *c += coef,
                None => row.push((index, coef)),
            }
        }
        row.retain(|&(_, c)| c != 0.0);
        row.sort_by_key(|&(i, _)| i);
        if row.len() < 2 {
            return Err(Error::DegenerateIncrement { row: row_id });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn row_count(&self) -> usize {
        self.rows.len()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Evaluate every increment row against a node vector.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.rows
            .iter()
            .map(|row| row.iter().map(|&(i, c)| c * x[i]).sum())
            .collect()
    }
}

/// A symmetric matrix stored as an upper-triangle coordinate list (i ≤ j).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseSymmetricMatrix {
    dimension: usize,
    /// Sorted (i, j, value) with i ≤ j; the (j, i) mirror is implied.
    entries: Vec<(usize, usize, f64)>,
}

impl SparseSymmetricMatrix {
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn entries(&self) -> &[(usize, usize, f64)] {
        &self.entries
    }

    /// Dense mirror of the full symmetric matrix.
    pub fn to_dense(&self) -> Array2<f64> {
        let n = self.dimension;
        let mut out = Array2::zeros((n, n));
        for &(i, j, v) in &self.entries {
            out[[i, j]] = v;
            out[[j, i]] = v;
        }
        out
    }

    /// y = P x for a full node vector x.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dimension];
        for &(i, j, v) in &self.entries {
            y[i] += v * x[j];
            if i != j {
                y[j] += v * x[i];
            }
        }
        y
    }

    /// Largest absolute entry; 0 for an empty matrix.
    pub fn max_abs(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, _, v)| v.abs())
            .fold(0.0, f64::max)
    }

    /// Scale every entry by a constant.
    pub fn scaled(&self, factor: f64) -> Self {
        SparseSymmetricMatrix {
            dimension: self.dimension,
            entries: self
                .entries
                .iter()
                .map(|&(i, j, v)| (i, j, v * factor))
                .collect(),
        }
    }
}

/// Assemble P = DᵀD from an increment set, so that xᵀPx = Σ_rows (row·x)².
pub fn assemble_structure_matrix(increments: &IncrementSet) -> Result<SparseSymmetricMatrix> {
    if increments.row_count() == 0 {
        return Err(Error::EmptyIncrementSet);
    }
    let mut map: std::collections::BTreeMap<(usize, usize), f64> = std::collections::BTreeMap::new();
    for row in increments.rows() {
        for (a, &(i, ci)) in row.iter().enumerate() {
            for &(j, cj) in &row[a..] {
                *map.entry((i, j)).or_insert(0.0) += ci * cj;
            }
        }
    }
    let entries: Vec<(usize, usize, f64)> = map
        .into_iter()
        .filter(|&(_, v)| v != 0.0)
        .map(|((i, j), v)| (i, j, v))
        .collect();
    Ok(SparseSymmetricMatrix {
        dimension: increments.dimension(),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_vec(p: &SparseSymmetricMatrix) -> Vec<Vec<f64>> {
        let d = p.to_dense();
        (0..p.dimension())
            .map(|i| (0..p.dimension()).map(|j| d[[i, j]]).collect())
            .collect()
    }

    #[test]
    fn node_index_row_major() {
        let g = LatticeSpec::grid(5, 5, Topology::Bounded).unwrap();
        assert_eq!(node_index(1, 1, &g).unwrap(), 0);
        assert_eq!(node_index(2, 3, &g).unwrap(), 7);
        assert_eq!(node_index(5, 5, &g).unwrap(), 24);
        assert!(node_index(6, 1, &g).is_err());
        assert!(node_index(0, 1, &g).is_err());
    }

    #[test]
    fn lattice_minimums() {
        assert!(LatticeSpec::chain(2).is_err());
        assert!(LatticeSpec::chain(3).is_ok());
        assert!(LatticeSpec::grid(4, 5, Topology::Bounded).is_err());
        assert!(LatticeSpec::grid(5, 5, Topology::Torus).is_ok());
    }

    #[test]
    fn assemble_rw1_three_nodes() {
        let mut inc = IncrementSet::new(3);
        inc.push_row(&[(0, -1.0), (1, 1.0)]).unwrap();
        inc.push_row(&[(1, -1.0), (2, 1.0)]).unwrap();
        let p = assemble_structure_matrix(&inc).unwrap();
        assert_eq!(
            dense_vec(&p),
            vec![
                vec![1.0, -1.0, 0.0],
                vec![-1.0, 2.0, -1.0],
                vec![0.0, -1.0, 1.0]
            ]
        );
    }

    #[test]
    fn assemble_single_increment() {
        let mut inc = IncrementSet::new(2);
        inc.push_row(&[(0, -1.0), (1, 1.0)]).unwrap();
        let p = assemble_structure_matrix(&inc).unwrap();
        assert_eq!(dense_vec(&p), vec![vec![1.0, -1.0], vec![-1.0, 1.0]]);
    }

    #[test]
    fn assemble_rw2_four_nodes() {
        let mut inc = IncrementSet::new(4);
        inc.push_row(&[(0, 1.0), (1, -2.0), (2, 1.0)]).unwrap();
        inc.push_row(&[(1, 1.0), (2, -2.0), (3, 1.0)]).unwrap();
        let p = assemble_structure_matrix(&inc).unwrap();
        assert_eq!(
            dense_vec(&p),
            vec![
                vec![1.0, -2.0, 1.0, 0.0],
                vec![-2.0, 5.0, -4.0, 1.0],
                vec![1.0, -4.0, 5.0, -2.0],
                vec![0.0, 1.0, -2.0, 1.0]
            ]
        );
    }

    #[test]
    fn empty_increment_set_rejected() {
        let inc = IncrementSet::new(4);
        assert!(matches!(
            assemble_structure_matrix(&inc),
            Err(Error::EmptyIncrementSet)
        ));
    }

    #[test]
    fn degenerate_row_rejected() {
        let mut inc = IncrementSet::new(3);
        assert!(inc.push_row(&[(0, 1.0)]).is_err());
        // coefficients cancelling to a single survivor are also degenerate
        assert!(inc.push_row(&[(0, 1.0), (1, 1.0), (1, -1.0)]).is_err());
    }

    #[test]
    fn quadratic_form_matches_increments() {
        let mut inc = IncrementSet::new(5);
        inc.push_row(&[(0, 1.0), (1, -2.0), (2, 1.0)]).unwrap();
        inc.push_row(&[(2, 1.0), (4, -1.0)]).unwrap();
        inc.push_row(&[(0, 0.5), (3, -0.25), (4, -0.25)]).unwrap();
        let p = assemble_structure_matrix(&inc).unwrap();
        let x = [0.3, -1.2, 2.5, 0.1, -0.7];
        let px = p.matvec(&x);
        let quad: f64 = x.iter().zip(&px).map(|(a, b)| a * b).sum();
        let by_rows: f64 = inc.apply(&x).iter().map(|r| r * r).sum();
        assert!((quad - by_rows).abs() <= 1e-12 * by_rows.abs().max(1.0));
    }
}
