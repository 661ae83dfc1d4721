use serde::{Deserialize, Serialize};
use std::fmt;

/// Identifier of one observed statistic the devices can be constrained by.
/// Joint and marginal ids use the Collins-Gisin convention (last outcome
/// dropped), which keeps the equality system free of normalization
/// redundancy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum StatId {
    Chsh,
    PA { a: usize, x: usize },
    PB { b: usize, y: usize },
    Joint { a: usize, b: usize, x: usize, y: usize },
}

impl fmt::Display for StatId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatId::Chsh => write!(f, "chsh"),
            StatId::PA { a, x } => write!(f, "A:{a}|{x}"),
            StatId::PB { b, y } => write!(f, "B:{b}|{y}"),
            StatId::Joint { a, b, x, y } => write!(f, "{a},{b},{x},{y}"),
        }
    }
}

/// Conditional distribution of the devices on the test inputs,
/// `p[x][y][a][b]`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct TestStatistics {
    pub p: Vec<Vec<Vec<Vec<f64>>>>,
}

impl TestStatistics {
    pub fn value(&self, a: usize, b: usize, x: usize, y: usize) -> f64 {
        self.p[x][y][a][b]
    }

    pub fn marginal_a(&self, a: usize, x: usize) -> f64 {
        self.p[x][0][a].iter().sum()
    }

    pub fn marginal_b(&self, b: usize, y: usize) -> f64 {
        self.p[0][y].iter().map(|row| row[b]).sum()
    }

    /// CHSH winning probability under uniform inputs.
    pub fn chsh_score(&self) -> f64 {
        let mut s = 0.0;
        for x in 0..2 {
            for y in 0..2 {
                for (a, row) in self.p[x][y].iter().enumerate() {
                    for (b, &v) in row.iter().enumerate() {
                        if (a ^ b) == (x & y) {
                            s += 0.25 * v;
                        }
                    }
                }
            }
        }
        s
    }
}

/// How the devices are constrained.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields, tag = "kind", rename_all = "snake_case")]
pub enum ConstraintMode {
    /// CHSH winning probability at least `omega` (uniform test inputs).
    ChshScore { omega: f64 },
    /// Full conditional distribution pinned through its Collins-Gisin
    /// coordinates.
    FullDistribution { statistics: TestStatistics },
    /// Arbitrary linear functionals of the conditional distribution:
    /// `sum coeff * p(a,b|x,y) (>=|=) rhs`.
    Custom { functionals: Vec<CustomFunctional> },
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CustomFunctional {
    /// terms (a, b, x, y, coefficient)
    pub terms: Vec<(usize, usize, usize, usize, f64)>,
    /// "ge" or "eq"
    pub sense: String,
    pub rhs: f64,
}

/// Whose entropy the relaxation bounds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EntropyTarget {
    /// Both outcomes against the adversary, at the key input pair.
    GlobalAb,
    /// Alice's outcome alone, at her key input.
    LocalA,
}

/// A two-device Bell scenario: test-input alphabets, key inputs, input
/// distribution over the test inputs, and the statistical constraint mode.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub na: usize,
    pub nb: usize,
    /// number of test inputs per party (statistics cover these)
    pub nx: usize,
    pub ny: usize,
    /// key-generation inputs; may lie outside the test ranges (extra inputs
    /// exist on the device but are unconstrained)
    pub x_key: usize,
    pub y_key: usize,
    /// input distribution on test inputs; `None` means uniform
    #[serde(default)]
    pub mu: Option<Vec<Vec<f64>>>,
    pub mode: ConstraintMode,
}

impl Scenario {
    pub fn mu_value(&self, x: usize, y: usize) -> f64 {
        match &self.mu {
            Some(m) => m[x][y],
            None => 1.0 / (self.nx * self.ny) as f64,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.na < 2 || self.nb < 2 || self.nx < 1 || self.ny < 1 {
            return Err("alphabets must have at least two outputs and one input".into());
        }
        if let Some(m) = &self.mu {
            let total: f64 = m.iter().flatten().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(format!("mu sums to {total}, not 1"));
            }
        }
        if let ConstraintMode::FullDistribution { statistics } = &self.mode {
            if statistics.p.len() != self.nx {
                return Err("statistics table x-extent mismatch".into());
            }
            for px in &statistics.p {
                if px.len() != self.ny {
                    return Err("statistics table y-extent mismatch".into());
                }
                for pxy in px {
                    let total: f64 = pxy.iter().flatten().sum();
                    if (total - 1.0).abs() > 1e-8 {
                        return Err(format!("conditional block sums to {total}"));
                    }
                }
            }
        }
        Ok(())
    }

    /// The Collins-Gisin statistic list for full-distribution constraints.
    pub fn cg_stat_ids(&self) -> Vec<StatId> {
        let mut out = Vec::new();
        for x in 0..self.nx {
            for a in 0..self.na - 1 {
                out.push(StatId::PA { a, x });
            }
        }
        for y in 0..self.ny {
            for b in 0..self.nb - 1 {
                out.push(StatId::PB { b, y });
            }
        }
        for x in 0..self.nx {
            for y in 0..self.ny {
                for a in 0..self.na - 1 {
                    for b in 0..self.nb - 1 {
                        out.push(StatId::Joint { a, b, x, y });
                    }
                }
            }
        }
        out
    }
}
