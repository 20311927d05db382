use std::f64::consts::FRAC_1_SQRT_2;

use rayon::prelude::*;

use super::angles::ParityAngles;
use super::kernel::ModeKernel;
use super::point::DisplacementPoint;
use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, ElementOperator, OccupationVector, OperatorKind};
use crate::Complex;

fn check_angles(point: &DisplacementPoint, angles: &ParityAngles) -> Result<()> {
    if angles.len() != point.partition().modes() {
        return Err(Error::DimensionMismatch(format!(
            "{} angles for a point over {} modes",
            angles.len(),
            point.partition().modes()
        )));
    }
    Ok(())
}

/// Kernel tables `T_k[b][a] = ⟨b|X(α_k, θ_k)|a⟩` for each active mode.
pub(crate) fn kernel_tables(
    point: &DisplacementPoint,
    angles: &ParityAngles,
    n_max: usize,
) -> Vec<Vec<Vec<Complex>>> {
    point
        .partition()
        .active()
        .iter()
        .zip(point.alphas())
        .map(|(&m, &a)| ModeKernel::new(a, angles.get(m)).table(n_max))
        .collect()
}

/// `W̃_ρ(α, θ) = Tr[ρ D(α) e^{iΣθ_m n̂_m} D†(α)]` over the point's active
/// modes; `state` must live on exactly those modes.
pub fn generalized_wigner_state(
    state: &DensityMatrix,
    point: &DisplacementPoint,
    angles: &ParityAngles,
) -> Result<Complex> {
    check_angles(point, angles)?;
    let basis = state.basis();
    if basis.modes() != point.alphas().len() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode state at a point with {} active modes",
            basis.modes(),
            point.alphas().len()
        )));
    }
    let tables = kernel_tables(point, angles, basis.max_occupation());
    Ok(wigner_with_tables(state, &tables))
}

pub(crate) fn wigner_with_tables(state: &DensityMatrix, tables: &[Vec<Vec<Complex>>]) -> Complex {
    let basis = state.basis();
    let rho = state.entries();
    let d = basis.dimension();
    let mut acc = Complex::new(0.0, 0.0);
    for j in 0..d {
        let sj = basis.state(j).as_slice();
        for i in 0..d {
            let r = rho[(i, j)];
            if r.re == 0.0 && r.im == 0.0 {
                continue;
            }
            let si = basis.state(i).as_slice();
            let mut x = Complex::new(1.0, 0.0);
            for (k, t) in tables.iter().enumerate() {
                x *= t[sj[k] as usize][si[k] as usize];
            }
            acc += r * x;
        }
    }
    acc
}

/// Evaluate [`generalized_wigner_state`] at many points in parallel;
/// output order follows `points`.
pub fn generalized_wigner_state_batch(
    state: &DensityMatrix,
    points: &[DisplacementPoint],
    angles: &ParityAngles,
) -> Result<Vec<Complex>> {
    points
        .par_iter()
        .map(|p| generalized_wigner_state(state, p, angles))
        .collect()
}

/// `W̃` of the ket-bra `|ket⟩⟨bra|` over the point's active modes. Both
/// occupation vectors span all modes of the partition and must be vacuum on
/// its projected modes.
pub fn ketbra_wigner(
    ket: &OccupationVector,
    bra: &OccupationVector,
    point: &DisplacementPoint,
    angles: &ParityAngles,
) -> Result<Complex> {
    check_angles(point, angles)?;
    let partition = point.partition();
    if ket.modes() != partition.modes() || bra.modes() != partition.modes() {
        return Err(Error::DimensionMismatch(format!(
            "occupation vectors over {} modes, point over {}",
            ket.modes(),
            partition.modes()
        )));
    }
    if partition
        .vacuum()
        .iter()
        .any(|&m| ket.get(m) != 0 || bra.get(m) != 0)
    {
        return Err(Error::DimensionMismatch(format!(
            "|{ket}⟩⟨{bra}| is not vacuum on the projected modes {:?}",
            partition.vacuum()
        )));
    }
    let mut w = Complex::new(1.0, 0.0);
    for (&m, &a) in partition.active().iter().zip(point.alphas()) {
        w *= ModeKernel::new(a, angles.get(m)).element(bra.get(m) as usize, ket.get(m) as usize);
    }
    Ok(w)
}

/// `W̃_O` of an element operator, restricted to the point's active modes
/// (the projected operator `O_S̄` when the point carries the operator's own
/// partition).
pub fn generalized_wigner_element(
    op: &ElementOperator,
    point: &DisplacementPoint,
    angles: &ParityAngles,
) -> Result<Complex> {
    let (r, c) = (op.row(), op.col());
    match op.kind() {
        OperatorKind::Diagonal => ketbra_wigner(r, r, point, angles),
        OperatorKind::RealOffDiag => {
            let rc = ketbra_wigner(r, c, point, angles)?;
            let cr = ketbra_wigner(c, r, point, angles)?;
            Ok((rc + cr) * FRAC_1_SQRT_2)
        }
        OperatorKind::ImagOffDiag => {
            let rc = ketbra_wigner(r, c, point, angles)?;
            let cr = ketbra_wigner(c, r, point, angles)?;
            Ok((rc - cr) * Complex::new(0.0, FRAC_1_SQRT_2))
        }
    }
}
