use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling::SampledPoint;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FidelityEstimate {
    pub value: f64,
    pub stderr: f64,
    pub samples: usize,
}

/// `F = mean_i( s_i / |W̃_σ(α_i)| )` where `s_i` estimates
/// `Re[e^{iφ_i} W̃_ρ(α_i, −θ)]` with `e^{iφ_i}` aligned to the target.
/// Denominators come from the points' weights and must exceed
/// `min_denominator`.
pub fn w2_fidelity(
    points: &[SampledPoint],
    signals: &[f64],
    min_denominator: f64,
) -> Result<FidelityEstimate> {
    if points.is_empty() {
        return Err(Error::Empty("no W² samples"));
    }
    if points.len() != signals.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} points, {} signals",
            points.len(),
            signals.len()
        )));
    }
    let mut ratios = Vec::with_capacity(points.len());
    for (p, s) in points.iter().zip(signals) {
        if !(p.weight > min_denominator) {
            return Err(Error::Consistency(format!(
                "denominator {:e} is not above the cutoff {min_denominator:e}",
                p.weight
            )));
        }
        ratios.push(s / p.weight);
    }
    let n = ratios.len() as f64;
    let mean = ratios.iter().sum::<f64>() / n;
    let var = if ratios.len() > 1 {
        ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    Ok(FidelityEstimate {
        value: mean,
        stderr: (var / n).sqrt(),
        samples: ratios.len(),
    })
}
