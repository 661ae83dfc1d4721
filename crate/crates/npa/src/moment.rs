use crate::scenario::StatId;
use ncpoly::{Algebra, NcPolynomial, RuleSet, Word};
use sdp::Sense;

/// Row attribution for dual recovery and tradeoff extraction.
#[derive(Debug, Clone, PartialEq)]
pub enum ConstraintId {
    /// `Gamma_(I,I) = 1`
    Normalization,
    /// an observed statistic (the varying part for tradeoff functions)
    Statistic(StatId),
    /// POVM completeness imposed at the moment level
    Completeness,
    /// experimental trace-inequality variants of operator constraints
    TraceIneq(String),
}

#[derive(Debug, Clone)]
pub struct MomentConstraint {
    pub expr: NcPolynomial,
    pub sense: Sense,
    pub rhs: f64,
    pub id: ConstraintId,
}

/// A localizing block: the moment matrix of `poly` over `monomials`.
#[derive(Debug, Clone)]
pub struct LocBlock {
    pub label: String,
    pub poly: NcPolynomial,
    pub monomials: Vec<Word>,
}

/// The assembled moment problem: symbolic data only; `lower_to_sdp` turns
/// it into numbers.
#[derive(Debug, Clone)]
pub struct MomentProblem {
    pub algebra: Algebra,
    pub rules: RuleSet,
    /// index of the main moment matrix (identity first)
    pub monomials: Vec<Word>,
    pub loc_blocks: Vec<LocBlock>,
    pub constraints: Vec<MomentConstraint>,
    /// Hermitian objective, maximized
    pub objective: NcPolynomial,
    /// restrict moments to real values (valid whenever all problem data are
    /// real, by certificate averaging)
    pub real_certificate: bool,
    /// human-readable description of the construction, echoed into outputs
    pub metadata: Vec<String>,
}

impl MomentProblem {
    pub fn describe(&self) -> String {
        let mut lines = vec![
            format!("moment matrix: {} monomials", self.monomials.len()),
            format!(
                "localizing blocks: {}",
                self.loc_blocks
                    .iter()
                    .map(|l| format!("{}[{}]", l.label, l.monomials.len()))
                    .collect::<Vec<_>>()
                    .join(" ")
            ),
            format!("constraints: {}", self.constraints.len()),
            format!("real_certificate: {}", self.real_certificate),
        ];
        lines.extend(self.metadata.iter().cloned());
        lines.join("\n")
    }

    /// Statistic rows in order of appearance.
    pub fn statistic_rows(&self) -> Vec<(usize, StatId)> {
        self.constraints
            .iter()
            .enumerate()
            .filter_map(|(i, c)| match &c.id {
                ConstraintId::Statistic(s) => Some((i, *s)),
                _ => None,
            })
            .collect()
    }
}
