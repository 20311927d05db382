use serde::{Deserialize, Serialize};

use super::demesst::SampledPoint;
use crate::error::Result;
use crate::hilbert::ElementOperator;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Strategy {
    #[serde(rename = "DEMESST")]
    Demesst,
    #[serde(rename = "W2")]
    W2,
    #[serde(rename = "OLI")]
    Oli,
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Strategy::Demesst => "DEMESST",
            Strategy::W2 => "W2",
            Strategy::Oli => "OLI",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorPlan {
    pub operator: ElementOperator,
    /// `C_S̄ Z_{O_S̄}`.
    pub weight: f64,
    pub points: Vec<SampledPoint>,
}

/// Displacements to measure, serializable for replay.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SamplingPlan {
    pub strategy: Strategy,
    pub seed: u64,
    pub shots_per_point: usize,
    /// One entry per element operator (DEMESST only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub operators: Vec<OperatorPlan>,
    /// Shared point list (W² and OLI).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub points: Vec<SampledPoint>,
}

impl SamplingPlan {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn point_count(&self) -> usize {
        self.points.len() + self.operators.iter().map(|o| o.points.len()).sum::<usize>()
    }
}
