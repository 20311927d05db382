use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{element_operators, FockBasis};
use crate::wigner::{estimator_weight, ParityAngles};

/// `N = ⌈2 (CZ)² ln(2/δ) / ε²⌉` samples bound a `[−CZ, CZ]`-valued mean to
/// `±ε` with probability at least `1 − δ`.
pub fn hoeffding_budget(cz_weight: f64, epsilon: f64, delta: f64) -> usize {
    let n = 2.0 * cz_weight * cz_weight * (2.0 / delta).ln() / (epsilon * epsilon);
    // Absorb log round-off so exact integers are not bumped up by one.
    (n * (1.0 - 1e-12)).ceil().max(1.0) as usize
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorBudget {
    pub label: String,
    pub weight: f64,
    pub samples: usize,
}

/// Per-element accuracy split of a global `(ε, δ)` target.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetSpec {
    pub epsilon: f64,
    pub delta: f64,
    pub epsilon2: f64,
    pub delta2: f64,
    pub per_operator: Vec<OperatorBudget>,
    pub total: usize,
}

/// Split `(ε, δ)` over the element operators: `ε₂ = ε/D`, `δ₂ = δ/D²` with
/// `D = binomial(M+N, N)`, and give each operator its Hoeffding budget.
pub fn allocate_budget(
    basis: &FockBasis,
    angles: &ParityAngles,
    epsilon: f64,
    delta: f64,
) -> Result<BudgetSpec> {
    if !(epsilon > 0.0) || !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Precondition(format!(
            "need ε > 0 and 0 < δ < 1, got ε = {epsilon}, δ = {delta}"
        )));
    }
    let d = basis.dimension() as f64;
    let epsilon2 = epsilon / d;
    let delta2 = delta / (d * d);
    let mut per_operator = Vec::new();
    for op in element_operators(basis) {
        let weight = estimator_weight(&op, angles)?;
        per_operator.push(OperatorBudget {
            label: op.label(),
            weight,
            samples: hoeffding_budget(weight, epsilon2, delta2),
        });
    }
    let total = per_operator.iter().map(|o| o.samples).sum();
    Ok(BudgetSpec {
        epsilon,
        delta,
        epsilon2,
        delta2,
        per_operator,
        total,
    })
}
