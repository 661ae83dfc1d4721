//! Standard-form semidefinite programming.
//!
//! The problem model is
//!
//! ```text
//!     max/min  sum_b tr(C_b X_b)
//!     s.t.     sum_b tr(F_{i,b} X_b)  >=/=  b_i      i = 1..m
//!              X_b >= 0
//! ```
//!
//! over a list of symmetric blocks (dense PSD or diagonal). The built-in
//! solver is a primal-dual interior-point method with Nesterov-Todd scaling
//! on a homogeneous self-dual embedding, so every solve returns both a
//! primal matrix and a dual vector with certified residuals. Problems can be
//! exchanged with external solvers through SDPA sparse files.
//!
//! Dual sign convention: for a maximization, the reported multiplier of a
//! `>=` constraint is nonpositive and `sum_i lambda_i b_i` upper-bounds the
//! optimal value; for a minimization the signs flip and the dual
//! lower-bounds. Multipliers of `=` rows are unrestricted.

pub mod complex;
mod problem;
mod sdpa;
mod solution;
mod solver;

pub use problem::{BlockKind, Constraint, SdpProblem, Sense, SparseSym};
pub use sdpa::{export_sdpa, import_sdpa};
pub use solution::{Residuals, SdpSolution, SolveStatus};
pub use solver::{solve, SolverOptions};

#[derive(Debug, thiserror::Error)]
pub enum SdpError {
    #[error("invalid problem: {0}")]
    InvalidProblem(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("entry collision at line {line}: block {block} ({row},{col}) already set to a different value")]
    EntryCollision {
        line: usize,
        block: usize,
        row: usize,
        col: usize,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, SdpError>;
