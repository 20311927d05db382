use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::ModePartition;
use crate::Complex;

/// Largest displacement magnitude accepted by default.
pub const DEFAULT_RADIUS_BOUND: f64 = 6.0;

/// Displacement amplitudes for the active modes of a partition. Vacuum
/// modes of the partition are projected out and not displaced.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DisplacementPoint {
    alphas: Vec<Complex>,
    partition: ModePartition,
}

impl DisplacementPoint {
    pub fn new(alphas: Vec<Complex>, partition: ModePartition) -> Result<Self> {
        Self::with_bound(alphas, partition, DEFAULT_RADIUS_BOUND)
    }

    pub fn with_bound(alphas: Vec<Complex>, partition: ModePartition, bound: f64) -> Result<Self> {
        if alphas.len() != partition.active().len() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for {} active modes",
                alphas.len(),
                partition.active().len()
            )));
        }
        if let Some(a) = alphas.iter().find(|a| !(a.norm() <= bound)) {
            return Err(Error::Precondition(format!(
                "|α| = {} exceeds the radius bound {bound}",
                a.norm()
            )));
        }
        Ok(Self { alphas, partition })
    }

    /// Point displacing every one of `alphas.len()` modes.
    pub fn full(alphas: Vec<Complex>) -> Result<Self> {
        let p = ModePartition::full(alphas.len());
        Self::new(alphas, p)
    }

    pub fn alphas(&self) -> &[Complex] {
        &self.alphas
    }

    pub fn partition(&self) -> &ModePartition {
        &self.partition
    }
}
