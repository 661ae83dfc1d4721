use ndarray::Array2;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Optimal,
    PrimalInfeasible,
    DualInfeasible,
    MaxIter,
    NumericalTrouble,
}

impl std::fmt::Display for SolveStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            SolveStatus::Optimal => "optimal",
            SolveStatus::PrimalInfeasible => "primal_infeasible",
            SolveStatus::DualInfeasible => "dual_infeasible",
            SolveStatus::MaxIter => "max_iter",
            SolveStatus::NumericalTrouble => "numerical_trouble",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Residuals {
    /// Relative primal feasibility residual.
    pub primal: f64,
    /// Relative dual feasibility residual.
    pub dual: f64,
    /// Relative duality gap |primal - dual| / (1 + |primal| + |dual|).
    pub gap: f64,
}

#[derive(Debug, Clone)]
pub struct SdpSolution {
    pub status: SolveStatus,
    /// Primal block matrices (diagonal blocks come back as dense diagonals).
    pub primal_blocks: Vec<Array2<f64>>,
    /// Constraint multipliers in the documented sign convention.
    pub dual_vector: Vec<f64>,
    pub primal_value: f64,
    pub dual_value: f64,
    pub residuals: Residuals,
    pub iterations: usize,
}

impl SdpSolution {
    /// The objective bound certified by the dual side: an upper bound on the
    /// optimum for maximizations, a lower bound for minimizations.
    pub fn certified_bound(&self) -> f64 {
        self.dual_value
    }
}
