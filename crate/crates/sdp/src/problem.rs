use crate::{Result, SdpError};
use ndarray::Array2;
use std::collections::BTreeMap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Ge,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockKind {
    /// Dense symmetric PSD block.
    Psd,
    /// Diagonal block (only diagonal entries allowed; the off-diagonal is
    /// implicitly zero). Exported with a negative size in SDPA files.
    Diagonal,
}

/// Sparse symmetric matrix spread across the problem's blocks.
///
/// An entry `(block, row, col, v)` with `row <= col` means the symmetric
/// coefficient matrix has `F[row, col] = F[col, row] = v` in that block, so
/// its inner product with a symmetric `X` picks up `2 v X[row, col]` off the
/// diagonal and `v X[row, row]` on it.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseSym {
    entries: Vec<(usize, usize, usize, f64)>,
}

impl SparseSym {
    pub fn new() -> Self {
        Self::default()
    }

    /// Accumulates `v` onto the symmetric entry `(row, col)` of `block`.
    pub fn add(&mut self, block: usize, row: usize, col: usize, v: f64) {
        if v == 0.0 {
            return;
        }
        let (r, c) = if row <= col { (row, col) } else { (col, row) };
        self.entries.push((block, r, c, v));
    }

    /// Merges duplicate coordinates and drops exact zeros; entries end up in
    /// a deterministic order.
    pub fn consolidate(&mut self) {
        let mut map: BTreeMap<(usize, usize, usize), f64> = BTreeMap::new();
        for &(b, r, c, v) in &self.entries {
            *map.entry((b, r, c)).or_insert(0.0) += v;
        }
        self.entries = map
            .into_iter()
            .filter(|&(_, v)| v != 0.0)
            .map(|((b, r, c), v)| (b, r, c, v))
            .collect();
    }

    pub fn entries(&self) -> &[(usize, usize, usize, f64)] {
        &self.entries
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// `tr(F X)` against dense symmetric block matrices.
    pub fn inner(&self, x: &[Array2<f64>]) -> f64 {
        let mut acc = 0.0;
        for &(b, r, c, v) in &self.entries {
            let xb = &x[b];
            acc += if r == c {
                v * xb[[r, r]]
            } else {
                2.0 * v * xb[[r, c]]
            };
        }
        acc
    }

    /// Adds `scale * F` into dense accumulator matrices.
    pub fn accumulate(&self, scale: f64, out: &mut [Array2<f64>]) {
        for &(b, r, c, v) in &self.entries {
            out[b][[r, c]] += scale * v;
            if r != c {
                out[b][[c, r]] += scale * v;
            }
        }
    }

    pub fn to_dense(&self, sizes: &[usize]) -> Vec<Array2<f64>> {
        let mut out: Vec<Array2<f64>> = sizes.iter().map(|&n| Array2::zeros((n, n))).collect();
        self.accumulate(1.0, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub mat: SparseSym,
    pub sense: Sense,
    pub rhs: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpProblem {
    pub blocks: Vec<(BlockKind, usize)>,
    pub objective: SparseSym,
    pub constraints: Vec<Constraint>,
    pub maximize: bool,
}

impl SdpProblem {
    pub fn new(blocks: Vec<(BlockKind, usize)>, maximize: bool) -> Self {
        Self {
            blocks,
            objective: SparseSym::new(),
            constraints: Vec::new(),
            maximize,
        }
    }

    pub fn add_constraint(&mut self, mut mat: SparseSym, sense: Sense, rhs: f64) -> usize {
        mat.consolidate();
        self.constraints.push(Constraint { mat, sense, rhs });
        self.constraints.len() - 1
    }

    pub fn set_objective(&mut self, mut obj: SparseSym) {
        obj.consolidate();
        self.objective = obj;
    }

    pub fn n_constraints(&self) -> usize {
        self.constraints.len()
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.blocks.iter().map(|&(_, n)| n).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.blocks.is_empty() {
            return Err(SdpError::InvalidProblem("no blocks".into()));
        }
        if self.constraints.is_empty() {
            return Err(SdpError::InvalidProblem("no constraints".into()));
        }
        for &(kind, n) in &self.blocks {
            if n == 0 {
                return Err(SdpError::InvalidProblem("zero-sized block".into()));
            }
            let _ = kind;
        }
        let check = |mat: &SparseSym, what: &str| -> Result<()> {
            for &(b, r, c, v) in mat.entries() {
                if b >= self.blocks.len() {
                    return Err(SdpError::InvalidProblem(format!(
                        "{what}: block index {b} out of range"
                    )));
                }
                let (kind, n) = self.blocks[b];
                if r >= n || c >= n {
                    return Err(SdpError::InvalidProblem(format!(
                        "{what}: entry ({r},{c}) outside block of size {n}"
                    )));
                }
                if kind == BlockKind::Diagonal && r != c {
                    return Err(SdpError::InvalidProblem(format!(
                        "{what}: off-diagonal entry in diagonal block {b}"
                    )));
                }
                if !v.is_finite() {
                    return Err(SdpError::InvalidProblem(format!("{what}: non-finite value")));
                }
            }
            Ok(())
        };
        check(&self.objective, "objective")?;
        for (i, con) in self.constraints.iter().enumerate() {
            check(&con.mat, &format!("constraint {i}"))?;
            if !con.rhs.is_finite() {
                return Err(SdpError::InvalidProblem(format!(
                    "constraint {i}: non-finite rhs"
                )));
            }
        }
        Ok(())
    }
}
