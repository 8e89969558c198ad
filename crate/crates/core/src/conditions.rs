//! Admissibility conditions (A)–(J).
//!
//! Each condition is a conjunction of strict inequalities. Every inequality
//! is reported with both sides and its margin `rhs - lhs`, so parameter sets
//! close to a boundary are visible even when they pass. Zero margins fail.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::params::{DerivedConstants, Params};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ConditionId {
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
    I,
    J,
}

impl ConditionId {
    pub const ALL: [ConditionId; 10] = [
        ConditionId::A,
        ConditionId::B,
        ConditionId::C,
        ConditionId::D,
        ConditionId::E,
        ConditionId::F,
        ConditionId::G,
        ConditionId::H,
        ConditionId::I,
        ConditionId::J,
    ];
}

impl fmt::Display for ConditionId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self:?}")
    }
}

/// One strict inequality `lhs < rhs`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Inequality {
    pub label: String,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
    pub holds: bool,
}

impl Inequality {
    pub fn less(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        let margin = rhs - lhs;
        Inequality {
            label: label.into(),
            lhs,
            rhs,
            margin,
            holds: margin > 0.0 && margin.is_finite(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    NotEvaluable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionResult {
    pub id: ConditionId,
    pub status: Status,
    pub inequalities: Vec<Inequality>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl ConditionResult {
    pub fn from_inequalities(id: ConditionId, inequalities: Vec<Inequality>) -> Self {
        let status = if inequalities.iter().all(|i| i.holds) {
            Status::Pass
        } else {
            Status::Fail
        };
        ConditionResult {
            id,
            status,
            inequalities,
            note: None,
        }
    }

    pub fn not_evaluable(id: ConditionId, note: impl Into<String>) -> Self {
        ConditionResult {
            id,
            status: Status::NotEvaluable,
            inequalities: Vec::new(),
            note: Some(note.into()),
        }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }

    /// Smallest margin over the inequalities, if any were evaluated.
    pub fn min_margin(&self) -> Option<f64> {
        self.inequalities
            .iter()
            .map(|i| i.margin)
            .min_by(|a, b| a.total_cmp(b))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub params: Params,
    pub results: Vec<ConditionResult>,
}

impl ConditionReport {
    pub fn all_pass(&self) -> bool {
        self.results.len() == ConditionId::ALL.len() && self.results.iter().all(|r| r.passed())
    }

    pub fn get(&self, id: ConditionId) -> Option<&ConditionResult> {
        self.results.iter().find(|r| r.id == id)
    }

    pub fn failures(&self) -> Vec<ConditionId> {
        self.results.iter().filter(|r| !r.passed()).map(|r| r.id).collect()
    }
}

/// Conditions (A)–(F), which are closed-form inequalities in the parameters.
pub fn check_algebraic_conditions(p: &Params, d: &DerivedConstants) -> Vec<ConditionResult> {
    use ConditionId::*;
    let (n, g, k) = (p.n(), p.gamma(), p.kappa());
    let w_plus = d.k2 / (3.0 * d.k1);
    vec![
        ConditionResult::from_inequalities(
            A,
            vec![
                Inequality::less("0 < mu", 0.0, d.mu),
                Inequality::less("mu < (kappa+n)/2", d.mu, (k + n) / 2.0),
            ],
        ),
        ConditionResult::from_inequalities(
            B,
            vec![Inequality::less("mu < n(gamma-1)/2", d.mu, n * (g - 1.0) / 2.0)],
        ),
        ConditionResult::from_inequalities(
            C,
            vec![Inequality::less("kappa_bar < kappa", d.kappa_bar, k)],
        ),
        ConditionResult::from_inequalities(D, vec![Inequality::less("0 < k2", 0.0, d.k2)]),
        ConditionResult::from_inequalities(
            E,
            vec![Inequality::less("0 < phi(W+), W+ = k2/(3 k1)", 0.0, d.phi(w_plus))],
        ),
        ConditionResult::from_inequalities(
            F,
            vec![
                Inequality::less("kappa < 2 mu", k, 2.0 * d.mu),
                Inequality::less("(1-mu)/3 < W*", (1.0 - d.mu) / 3.0, d.w_star),
                Inequality::less("0 < psi(W*)", 0.0, d.psi(d.w_star)),
            ],
        ),
    ]
}
