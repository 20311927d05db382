//! Truncated multimode Fock spaces.

mod basis;
mod operator;
mod state;

pub use basis::{binomial, enumerate_basis, FockBasis, OccupationVector, DEFAULT_DIMENSION_LIMIT};
pub use operator::{element_operators, ElementOperator, ModePartition, OperatorKind};
pub use state::{
    assemble_from_elements, assemble_from_slice, ideal_w_state, perturbed_state, project_and_trace,
    w_state_vector, DensityMatrix, DensityMatrixJson,
};

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::Complex;

/// Random physical state of the given rank (Ginibre construction).
pub fn random_density_matrix<R: Rng + ?Sized>(
    basis: Arc<FockBasis>,
    rank: usize,
    rng: &mut R,
) -> DensityMatrix {
    let d = basis.dimension();
    let g = DMatrix::from_fn(d, rank.max(1), |_, _| {
        Complex::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    });
    let mut m = &g * g.adjoint();
    let tr = m.trace().re;
    m /= Complex::new(tr, 0.0);
    // Symmetrize away round-off so the Hermiticity check is exact.
    let m = (&m + m.adjoint()).scale(0.5);
    DensityMatrix::physical(basis, m).expect("Ginibre matrices are physical")
}

/// Random Hermitian matrix with unit-scale entries (not normalized).
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> DMatrix<Complex> {
    let g = DMatrix::from_fn(d, d, |_, _| {
        Complex::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        )
    });
    (&g + g.adjoint()).scale(0.5)
}
