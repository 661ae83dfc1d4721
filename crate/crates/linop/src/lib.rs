//! Finite-dimensional complex linear algebra for quantum information computations.
//!
//! Everything here operates on dense `ndarray` matrices over `Complex64`. The
//! main objects are Hermitian operators, density states with declared tensor
//! factorizations, CPTP channels given by Kraus operators, and classical
//! probability vectors. On top of those sit matrix functions, the matrix
//! geometric mean, partial traces and classical Renyi divergences.
//!
//! All operations are pure functions on immutable values.

mod classical;
mod eig;
mod gm;
mod mat;
mod ptrace;
pub mod rng;
mod types;

pub use classical::{classical_renyi, shannon_entropy_bits};
pub use eig::{eigh, eigvalsh, funm, herm_pow, herm_sqrt, max_eigval, min_eigval};
pub use gm::{geometric_mean, iterated_geometric_mean, schur_psd_check, schur_psd_check_detailed};
pub use mat::{
    dag, frob_norm, hermitian_part, identity, is_hermitian, kron, matmul, trace, zeros,
};
pub use ptrace::{partial_trace, purify};
pub use types::{
    psd_rank, support_reduce, DensityState, HermitianOperator, KrausChannel, ProbabilityVector,
};

use num_complex::Complex64;

/// Dense complex matrix used throughout.
pub type CMat = ndarray::Array2<Complex64>;

/// Hermiticity tolerance enforced on construction.
pub const HERM_TOL: f64 = 1e-12;
/// Eigenvalue cutoff below which an operator is treated as singular on that
/// direction (support projections, pseudo-inverses).
pub const SUPPORT_CUTOFF: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum LinopError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),
    #[error("matrix is not positive semidefinite (min eigenvalue {0:.3e})")]
    NotPsd(f64),
    #[error("trace is {0}, expected 1")]
    TraceNotOne(f64),
    #[error("subsystem dims {dims:?} do not factor dimension {dim}")]
    BadSubsystemDims { dims: Vec<usize>, dim: usize },
    #[error("invalid subsystem index {index} for {count} subsystems")]
    InvalidSubsystem { index: usize, count: usize },
    #[error("Kraus completeness violated: ||sum K*K - I|| = {0:.3e}")]
    NotCptp(f64),
    #[error("probability vector invalid: {0}")]
    BadProbability(String),
    #[error("support violation: supp(rho) not contained in supp(sigma) (leak {0:.3e})")]
    SupportViolation(f64),
    #[error("eigendecomposition failed: {0}")]
    EigFailure(String),
}

pub type Result<T> = std::result::Result<T, LinopError>;
