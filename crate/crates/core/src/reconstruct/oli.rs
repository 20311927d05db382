use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::coords::{from_coordinates, project_to_density, to_coordinates};
use super::report::ReconstructionReport;
use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, FockBasis};
use crate::sampling::Strategy;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PgdOptions {
    pub max_iterations: usize,
    /// Stop once the objective changes by less than this.
    pub tolerance: f64,
}

impl Default for PgdOptions {
    fn default() -> Self {
        Self {
            max_iterations: 10_000,
            tolerance: 1e-10,
        }
    }
}

/// Least squares `min ‖A x − y‖²` over density matrices, where `x` are the
/// element-operator coordinates of `ρ` and row `k` of `A` predicts signal
/// `y_k`.
///
/// The raw variant is the unconstrained solution. The physical variant is
/// found by projected gradient descent with step `1/L` from the projected
/// raw solution; each projection is the exact Frobenius projection onto
/// density matrices (eigenvalues onto the simplex).
pub fn oli_reconstruct(
    matrix: &DMatrix<f64>,
    signals: &[f64],
    basis: &Arc<FockBasis>,
    total_shots: usize,
    options: &PgdOptions,
) -> Result<ReconstructionReport> {
    OliSystem::new(matrix, basis)?.solve(signals, total_shots, options)
}

/// A factored measurement matrix, reusable across signal vectors.
#[derive(Debug, Clone)]
pub struct OliSystem {
    basis: Arc<FockBasis>,
    matrix: DMatrix<f64>,
    gram: DMatrix<f64>,
    cholesky: nalgebra::Cholesky<f64, nalgebra::Dyn>,
    lmax: f64,
}

impl OliSystem {
    pub fn new(matrix: &DMatrix<f64>, basis: &Arc<FockBasis>) -> Result<Self> {
        let d = basis.dimension();
        let p = d * d;
        if matrix.ncols() != p {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for {p} parameters",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let gram = matrix.transpose() * matrix;
        let eig = gram.clone().symmetric_eigen();
        let lmax = eig.eigenvalues.max();
        let rank = eig
            .eigenvalues
            .iter()
            .filter(|&&l| l > lmax * 1e-20 && l > 0.0)
            .count();
        if rank < p {
            return Err(Error::RankDeficient { rank, needed: p });
        }
        let cholesky = gram
            .clone()
            .cholesky()
            .ok_or(Error::RankDeficient { rank, needed: p })?;
        Ok(Self {
            basis: basis.clone(),
            matrix: matrix.clone(),
            gram,
            cholesky,
            lmax,
        })
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn solve(
        &self,
        signals: &[f64],
        total_shots: usize,
        options: &PgdOptions,
    ) -> Result<ReconstructionReport> {
        let (basis, matrix, gram, lmax) = (&self.basis, &self.matrix, &self.gram, self.lmax);
        let d = basis.dimension();
        if matrix.nrows() != signals.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} rows, {} signals",
                matrix.nrows(),
                signals.len()
            )));
        }
        let y = DVector::from_column_slice(signals);
        let rhs = matrix.transpose() * &y;
        let yy = y.dot(&y);
        let x_ls = self.cholesky.solve(&rhs);
        let raw = DensityMatrix::raw(basis.clone(), from_coordinates(x_ls.as_slice(), d))?;

        let objective = |x: &DVector<f64>| x.dot(&(gram * x)) - 2.0 * rhs.dot(x) + yy;
        let project = |x: &DVector<f64>| -> DVector<f64> {
            DVector::from_vec(to_coordinates(&project_to_density(&from_coordinates(
                x.as_slice(),
                d,
            ))))
        };
        let step = 1.0 / (2.0 * lmax);
        let mut x = project(&x_ls);
        let mut f = objective(&x);
        let mut history = vec![f];
        let mut converged = false;
        let mut iterations = 0;
        while iterations < options.max_iterations {
            iterations += 1;
            let grad = (gram * &x - &rhs) * 2.0;
            let next = project(&(&x - grad * step));
            let f_next = objective(&next);
            x = next;
            let change = (f - f_next).abs();
            f = f_next;
            history.push(f);
            if change < options.tolerance {
                converged = true;
                break;
            }
        }
        if !converged {
            return Err(Error::NonConvergence {
                iterations,
                residual: f.max(0.0).sqrt(),
            });
        }
        let physical = DensityMatrix::raw(basis.clone(), from_coordinates(x.as_slice(), d))?;
        let physical =
            DensityMatrix::physical(basis.clone(), physical.entries().clone()).unwrap_or(physical);
        Ok(ReconstructionReport {
            strategy: Strategy::Oli,
            raw,
            physical,
            estimates: Vec::new(),
            total_shots,
            iterations: Some(iterations),
            objective: history,
            power_law: None,
        })
    }
}
