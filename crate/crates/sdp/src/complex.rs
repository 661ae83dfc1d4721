//! Modeling layer for SDPs over complex Hermitian PSD matrix variables.
//!
//! Each complex block of dimension n is lowered to a real symmetric PSD
//! block of dimension 2n through the standard lift
//! `A + iB -> [[A, -B], [B, A]]`. Because every coefficient matrix produced
//! here carries that same structure, any real optimal solution can be
//! symmetrized with `J = [[0, -I], [I, 0]]` into a structured one with the
//! same objective value, so no structural tie constraints are needed and the
//! lowered problem is exactly equivalent.
//!
//! Linear functionals are entered as terms `coef * X[i, j]`; the modeled
//! quantity is the real part of the sum, which is the general real-linear
//! functional of a Hermitian matrix.

use crate::{BlockKind, Result, SdpError, SdpProblem, SdpSolution, Sense, SparseSym};
use ndarray::Array2;
use num_complex::Complex64;

/// A term `coef * X_block[i, j]` of a scalar expression.
#[derive(Debug, Clone, Copy)]
pub struct CTerm {
    pub block: usize,
    pub i: usize,
    pub j: usize,
    pub coef: Complex64,
}

pub fn term(block: usize, i: usize, j: usize, coef: Complex64) -> CTerm {
    CTerm { block, i, j, coef }
}

#[derive(Debug, Clone, Default)]
pub struct CExpr {
    pub terms: Vec<CTerm>,
}

impl CExpr {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, block: usize, i: usize, j: usize, coef: Complex64) {
        if coef != Complex64::ZERO {
            self.terms.push(CTerm { block, i, j, coef });
        }
    }

    /// Adds `tr(K X_block)` for a Hermitian coefficient matrix `K`.
    pub fn push_herm_matrix(&mut self, block: usize, k: &Array2<Complex64>, scale: f64) {
        let n = k.nrows();
        for i in 0..n {
            for j in 0..n {
                // tr(K X) = sum_ij K[j, i] X[i, j]
                self.push(block, i, j, k[[j, i]] * scale);
            }
        }
    }
}

#[derive(Debug, Clone)]
pub struct ComplexSdp {
    block_dims: Vec<usize>,
    objective: CExpr,
    constraints: Vec<(CExpr, Sense, f64)>,
    maximize: bool,
}

impl ComplexSdp {
    pub fn new(maximize: bool) -> Self {
        Self {
            block_dims: Vec::new(),
            objective: CExpr::new(),
            constraints: Vec::new(),
            maximize,
        }
    }

    /// Declares a PSD-constrained complex Hermitian matrix variable; returns
    /// its block index.
    pub fn add_block(&mut self, dim: usize) -> usize {
        self.block_dims.push(dim);
        self.block_dims.len() - 1
    }

    pub fn block_dim(&self, block: usize) -> usize {
        self.block_dims[block]
    }

    pub fn set_objective(&mut self, expr: CExpr) {
        self.objective = expr;
    }

    /// Scalar constraint `Re(expr) sense rhs`; returns the row index, or
    /// `None` when the row is structurally `0 == 0` and gets dropped.
    pub fn add_scalar(&mut self, expr: CExpr, sense: Sense, rhs: f64) -> Option<usize> {
        if rhs == 0.0 && Self::lower_expr(&expr, &self.block_dims).is_empty() {
            return None;
        }
        self.constraints.push((expr, sense, rhs));
        Some(self.constraints.len() - 1)
    }

    /// Complex equality `expr == rhs`: one row for the real part and, when
    /// the imaginary part is not structurally zero, one for the imaginary
    /// part.
    pub fn add_complex_eq(&mut self, expr: CExpr, rhs: Complex64) {
        self.add_scalar(expr.clone(), Sense::Eq, rhs.re);
        let rotated = CExpr {
            terms: expr
                .terms
                .iter()
                .map(|t| CTerm {
                    coef: t.coef * Complex64::new(0.0, -1.0),
                    ..*t
                })
                .collect(),
        };
        // skip rows that lower to 0 == 0
        if Self::lower_expr(&rotated, &self.block_dims).is_empty() && rhs.im == 0.0 {
            return;
        }
        self.add_scalar(rotated, Sense::Eq, rhs.im);
    }

    /// Pins every entry of a Hermitian matrix expression to `target`:
    /// `expr[i,j](X) == target[i,j]` for i <= j. `cells` yields the
    /// expression for a given (i, j).
    pub fn pin_hermitian(
        &mut self,
        dim: usize,
        target: &Array2<Complex64>,
        mut cells: impl FnMut(usize, usize) -> CExpr,
    ) {
        for i in 0..dim {
            for j in i..dim {
                let expr = cells(i, j);
                if i == j {
                    self.add_scalar(expr, Sense::Eq, target[[i, j]].re);
                } else {
                    self.add_complex_eq(expr, target[[i, j]]);
                }
            }
        }
    }

    fn lower_expr(expr: &CExpr, dims: &[usize]) -> SparseSym {
        let mut s = SparseSym::new();
        for t in &expr.terms {
            let n = dims[t.block];
            let (cr, ci) = (t.coef.re, t.coef.im);
            // Re(coef X[i,j]) = cr R_ij - ci S_ij with
            // R_ij = (Y[i,j] + Y[n+i, n+j]) / 2, S_ij = (Y[n+i, j] - Y[i, n+j]) / 2.
            // A desired functional w * Y[r,c] is entered as w/2 at the
            // symmetric coordinate (or w on the diagonal).
            let mut accum = |r: usize, c: usize, w: f64| {
                if w == 0.0 {
                    return;
                }
                if r == c {
                    s.add(t.block, r, c, w);
                } else {
                    s.add(t.block, r.min(c), r.max(c), w / 2.0);
                }
            };
            accum(t.i, t.j, cr / 2.0);
            accum(n + t.i, n + t.j, cr / 2.0);
            accum(n + t.i, t.j, -ci / 2.0);
            accum(t.i, n + t.j, ci / 2.0);
        }
        s.consolidate();
        s
    }

    /// Lowers to a real [`SdpProblem`] with doubled block sizes.
    pub fn lower(&self) -> Result<SdpProblem> {
        if self.constraints.is_empty() {
            return Err(SdpError::InvalidProblem(
                "complex model needs at least one constraint".into(),
            ));
        }
        let blocks = self
            .block_dims
            .iter()
            .map(|&n| (BlockKind::Psd, 2 * n))
            .collect();
        let mut p = SdpProblem::new(blocks, self.maximize);
        p.set_objective(Self::lower_expr(&self.objective, &self.block_dims));
        for (expr, sense, rhs) in &self.constraints {
            p.add_constraint(Self::lower_expr(expr, &self.block_dims), *sense, *rhs);
        }
        Ok(p)
    }

    /// Recovers the complex Hermitian block from a real solution by
    /// symmetrizing with `J` and reading `A + iB` off the quadrants.
    pub fn recover_block(&self, sol: &SdpSolution, block: usize) -> Array2<Complex64> {
        let n = self.block_dims[block];
        let y = &sol.primal_blocks[block];
        let mut out = Array2::from_elem((n, n), Complex64::ZERO);
        for i in 0..n {
            for j in 0..n {
                let re = 0.5 * (y[[i, j]] + y[[n + i, n + j]]);
                let im = 0.5 * (y[[n + i, j]] - y[[i, n + j]]);
                out[[i, j]] = Complex64::new(re, im);
            }
        }
        // Hermitian cleanup
        let outc = out.clone();
        for i in 0..n {
            for j in 0..n {
                out[[i, j]] = 0.5 * (outc[[i, j]] + outc[[j, i]].conj());
            }
        }
        out
    }

    /// Evaluates a CExpr on recovered complex blocks (testing aid).
    pub fn eval_expr(expr: &CExpr, blocks: &[Array2<Complex64>]) -> Complex64 {
        expr.terms
            .iter()
            .map(|t| t.coef * blocks[t.block][[t.i, t.j]])
            .sum()
    }
}
