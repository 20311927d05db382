use std::collections::HashMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::coords::clip_to_physical;
use super::report::ReconstructionReport;
use crate::error::{Error, Result};
use crate::experiment::{batch_signal, ShotBatch};
use crate::hilbert::{assemble_from_slice, element_operators, FockBasis};
use crate::sampling::Strategy;

/// Estimate of one `Tr[ρ O]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementEstimate {
    pub label: String,
    pub value: f64,
    /// Standard error of the mean over batches; absent for a single batch.
    pub stderr: Option<f64>,
    pub batches: usize,
    pub shots: usize,
}

/// `C_S̄ Z · mean(signal)` over the batches of one operator, with the
/// standard error from the spread between batches.
pub fn demesst_element(batches: &[ShotBatch]) -> Result<ElementEstimate> {
    let first = batches
        .first()
        .ok_or(Error::Empty("no batches for the operator"))?;
    let label = first.operator.clone().unwrap_or_default();
    let mut values = Vec::with_capacity(batches.len());
    let mut shots = 0;
    for b in batches {
        if b.operator != first.operator {
            return Err(Error::Consistency(format!(
                "batches mix operators {:?} and {:?}",
                first.operator, b.operator
            )));
        }
        if b.weight != first.weight {
            return Err(Error::Consistency(format!(
                "operator {label} carries differing weights"
            )));
        }
        values.push(b.weight * batch_signal(b)?);
        shots += b.total_shots();
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let stderr = (values.len() > 1).then(|| {
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
        (var / n).sqrt()
    });
    Ok(ElementEstimate {
        label,
        value: mean,
        stderr,
        batches: values.len(),
        shots,
    })
}

/// Estimate every element operator of `basis` from labelled batches and
/// assemble the density matrix.
pub fn demesst_reconstruct(
    batches: &[ShotBatch],
    basis: &Arc<FockBasis>,
) -> Result<ReconstructionReport> {
    let ops = element_operators(basis);
    let index: HashMap<String, usize> = ops
        .iter()
        .enumerate()
        .map(|(k, o)| (o.label(), k))
        .collect();
    let mut groups: Vec<Vec<ShotBatch>> = vec![Vec::new(); ops.len()];
    for b in batches {
        let label = b
            .operator
            .as_deref()
            .ok_or_else(|| Error::Precondition("batch without an operator label".into()))?;
        let k = *index.get(label).ok_or_else(|| {
            Error::DimensionMismatch(format!("operator {label} is not in the basis"))
        })?;
        groups[k].push(b.clone());
    }
    let missing: Vec<String> = ops
        .iter()
        .zip(&groups)
        .filter(|(_, g)| g.is_empty())
        .map(|(o, _)| o.label())
        .collect();
    if !missing.is_empty() {
        return Err(Error::Coverage { missing });
    }
    let estimates: Vec<ElementEstimate> = groups
        .iter()
        .map(|g| demesst_element(g))
        .collect::<Result<_>>()?;
    let values: Vec<f64> = estimates.iter().map(|e| e.value).collect();
    let raw = assemble_from_slice(basis, &values)?;
    let physical = clip_to_physical(&raw);
    let total_shots = estimates.iter().map(|e| e.shots).sum();
    Ok(ReconstructionReport {
        strategy: Strategy::Demesst,
        raw,
        physical,
        estimates,
        total_shots,
        iterations: None,
        objective: Vec::new(),
        power_law: None,
    })
}
