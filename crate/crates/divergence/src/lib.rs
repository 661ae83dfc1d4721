//! Explicit-dimension (oracle) evaluation of the iterated-mean Renyi
//! divergences and the standard comparison divergences.
//!
//! Everything here works on concrete complex matrices and produces certified
//! values through the block SDP solver, in contrast to the
//! device-independent relaxations which only see operator algebra. This
//! module is the ground truth the relaxations are tested against.

mod cond;
mod im;
mod order;
mod reference;

pub use cond::{hmin_cond, im_cond_entropy_up, CondForm};
pub use im::{im_divergence, im_divergence_with, DualWitness, ImForm, ImOptions, ImValue, ImWitness, Witness};
pub use order::ImOrder;
pub use reference::{reference_divergence, RefKind, RefValue};

#[derive(Debug, thiserror::Error)]
pub enum DivergenceError {
    #[error(transparent)]
    Linop(#[from] linop::LinopError),
    #[error(transparent)]
    Sdp(#[from] sdp::SdpError),
    #[error("solver returned status {0}")]
    SolverStatus(sdp::SolveStatus),
    #[error("geometric-mean feasibility check failed: min eig {0:.3e}")]
    GeometricMeanCheck(f64),
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, DivergenceError>;

pub(crate) fn require_optimal(sol: &sdp::SdpSolution) -> Result<()> {
    if sol.status != sdp::SolveStatus::Optimal {
        return Err(DivergenceError::SolverStatus(sol.status));
    }
    Ok(())
}
