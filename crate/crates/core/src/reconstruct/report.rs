use serde::{Deserialize, Serialize};

use super::demesst::ElementEstimate;
use super::fit::PowerLaw;
use crate::error::Result;
use crate::hilbert::{DensityMatrix, DensityMatrixJson};
use crate::sampling::Strategy;

/// A reconstruction with its raw estimate, the physical variant, and
/// diagnostics.
#[derive(Debug, Clone)]
pub struct ReconstructionReport {
    pub strategy: Strategy,
    /// Unconstrained estimate: Hermitian, trace and positivity unenforced.
    pub raw: DensityMatrix,
    /// Physical (positive, unit-trace) variant.
    pub physical: DensityMatrix,
    pub estimates: Vec<ElementEstimate>,
    pub total_shots: usize,
    /// Projected-gradient iterations (OLI only).
    pub iterations: Option<usize>,
    /// Least-squares objective per iteration, starting at the warm start
    /// (OLI only).
    pub objective: Vec<f64>,
    pub power_law: Option<PowerLaw>,
}

impl ReconstructionReport {
    pub fn raw_trace(&self) -> f64 {
        self.raw.trace()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&ReportJson::from(self))?)
    }
}

/// Serialized form of a [`ReconstructionReport`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportJson {
    pub strategy: Strategy,
    pub total_shots: usize,
    pub raw_trace: f64,
    pub iterations: Option<usize>,
    pub final_objective: Option<f64>,
    pub power_law_a: Option<f64>,
    pub power_law_b: Option<f64>,
    pub raw: DensityMatrixJson,
    pub physical: DensityMatrixJson,
    pub estimates: Vec<ElementEstimate>,
}

impl From<&ReconstructionReport> for ReportJson {
    fn from(r: &ReconstructionReport) -> Self {
        Self {
            strategy: r.strategy,
            total_shots: r.total_shots,
            raw_trace: r.raw.trace(),
            iterations: r.iterations,
            final_objective: r.objective.last().copied(),
            power_law_a: r.power_law.map(|p| p.a),
            power_law_b: r.power_law.map(|p| p.b),
            raw: DensityMatrixJson::from(&r.raw),
            physical: DensityMatrixJson::from(&r.physical),
            estimates: r.estimates.clone(),
        }
    }
}
