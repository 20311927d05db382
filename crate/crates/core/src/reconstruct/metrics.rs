use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hilbert::DensityMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// `Tr[a b]`; an overlap fidelity only when `b` is pure.
    pub fidelity: f64,
    pub frobenius: f64,
    pub trace_a: f64,
    pub reference_pure: bool,
}

pub fn metrics(a: &DensityMatrix, b: &DensityMatrix) -> Result<Metrics> {
    let fidelity = a.overlap(b)?;
    let frobenius = a.frobenius_distance(b)?;
    let purity = b.overlap(b)?;
    Ok(Metrics {
        fidelity,
        frobenius,
        trace_a: a.trace(),
        reference_pure: (purity - 1.0).abs() < 1e-9,
    })
}
