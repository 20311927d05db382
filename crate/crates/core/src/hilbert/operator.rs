use std::fmt;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::basis::{FockBasis, OccupationVector};
use crate::error::{Error, Result};
use crate::Complex;

/// Split of the modes into those that are vacuum on both sides of an
/// element operator (`vacuum`, projected out during measurement) and the
/// remaining `active` modes that are displaced and read out.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModePartition {
    modes: usize,
    vacuum: Vec<usize>,
    active: Vec<usize>,
}

impl ModePartition {
    /// Partition with the given active modes; every other mode is vacuum.
    pub fn from_active(modes: usize, mut active: Vec<usize>) -> Result<Self> {
        active.sort_unstable();
        active.dedup();
        if active.iter().any(|&m| m >= modes) {
            return Err(Error::Precondition(format!(
                "active modes {active:?} out of range for {modes} modes"
            )));
        }
        let vacuum = (0..modes)
            .filter(|m| active.binary_search(m).is_err())
            .collect();
        Ok(Self {
            modes,
            vacuum,
            active,
        })
    }

    /// No projection: every mode active.
    pub fn full(modes: usize) -> Self {
        Self {
            modes,
            vacuum: Vec::new(),
            active: (0..modes).collect(),
        }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn vacuum(&self) -> &[usize] {
        &self.vacuum
    }

    pub fn active(&self) -> &[usize] {
        &self.active
    }

    pub fn is_full(&self) -> bool {
        self.vacuum.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OperatorKind {
    /// `|n⟩⟨n|`
    Diagonal,
    /// `(|n⟩⟨n′| + |n′⟩⟨n|)/√2`
    RealOffDiag,
    /// `i(|n⟩⟨n′| − |n′⟩⟨n|)/√2`
    ImagOffDiag,
}

/// Hermitian, unit Frobenius-norm basis operator attached to a pair of
/// basis states `row = n`, `col = n′` with `row` preceding `col` in basis
/// order. Its expectation values recover
/// `⟨n|ρ|n⟩`, `√2 Re⟨n|ρ|n′⟩` and `√2 Im⟨n|ρ|n′⟩` respectively.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ElementOperator {
    kind: OperatorKind,
    row: OccupationVector,
    col: OccupationVector,
    support: ModePartition,
}

impl ElementOperator {
    pub fn new(kind: OperatorKind, row: OccupationVector, col: OccupationVector) -> Result<Self> {
        if row.modes() != col.modes() {
            return Err(Error::DimensionMismatch(format!(
                "occupation vectors {row} and {col} differ in length"
            )));
        }
        match kind {
            OperatorKind::Diagonal if row != col => {
                return Err(Error::Precondition(format!(
                    "diagonal operator needs equal states, got {row}, {col}"
                )))
            }
            OperatorKind::RealOffDiag | OperatorKind::ImagOffDiag if row == col => {
                return Err(Error::Precondition(format!(
                    "off-diagonal operator needs distinct states, got {row}"
                )))
            }
            _ => {}
        }
        let modes = row.modes();
        let active = (0..modes)
            .filter(|&m| row.get(m) != 0 || col.get(m) != 0)
            .collect();
        let support = ModePartition::from_active(modes, active)?;
        Ok(Self {
            kind,
            row,
            col,
            support,
        })
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn row(&self) -> &OccupationVector {
        &self.row
    }

    pub fn col(&self) -> &OccupationVector {
        &self.col
    }

    pub fn support(&self) -> &ModePartition {
        &self.support
    }

    pub fn modes(&self) -> usize {
        self.row.modes()
    }

    /// Short label such as `R:100|010`.
    pub fn label(&self) -> String {
        match self.kind {
            OperatorKind::Diagonal => format!("D:{}", self.row),
            OperatorKind::RealOffDiag => format!("R:{}|{}", self.row, self.col),
            OperatorKind::ImagOffDiag => format!("I:{}|{}", self.row, self.col),
        }
    }

    /// The operator restricted to its active modes (`O_S̄`).
    pub fn reduced(&self) -> Self {
        let active = self.support.active();
        let row = self.row.select(active);
        let col = self.col.select(active);
        let support = ModePartition::full(active.len());
        Self {
            kind: self.kind,
            row,
            col,
            support,
        }
    }

    /// Re-express on `total_modes` modes, placing mode `j` of `self` at
    /// `mode_map[j]`; all other modes are vacuum.
    pub fn embed(&self, mode_map: &[usize], total_modes: usize) -> Result<Self> {
        if mode_map.len() != self.modes() {
            return Err(Error::DimensionMismatch(format!(
                "mode map of length {} for a {}-mode operator",
                mode_map.len(),
                self.modes()
            )));
        }
        Self::new(
            self.kind,
            self.row.scatter(mode_map, total_modes),
            self.col.scatter(mode_map, total_modes),
        )
    }

    /// Dense matrix on `basis`.
    pub fn to_matrix(&self, basis: &FockBasis) -> Result<DMatrix<Complex>> {
        let lookup = |s: &OccupationVector| {
            basis
                .index_of(s)
                .ok_or_else(|| Error::DimensionMismatch(format!("state {s} not in basis")))
        };
        let r = lookup(&self.row)?;
        let c = lookup(&self.col)?;
        let d = basis.dimension();
        let mut m = DMatrix::zeros(d, d);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match self.kind {
            OperatorKind::Diagonal => m[(r, r)] = Complex::new(1.0, 0.0),
            OperatorKind::RealOffDiag => {
                m[(r, c)] = Complex::new(h, 0.0);
                m[(c, r)] = Complex::new(h, 0.0);
            }
            OperatorKind::ImagOffDiag => {
                m[(r, c)] = Complex::new(0.0, h);
                m[(c, r)] = Complex::new(0.0, -h);
            }
        }
        Ok(m)
    }

    /// `Tr[ρ O]` read directly off the matrix entries of `rho` on `basis`.
    pub fn expectation(&self, basis: &FockBasis, rho: &DMatrix<Complex>) -> Result<f64> {
        let r = basis
            .index_of(&self.row)
            .ok_or_else(|| Error::DimensionMismatch(format!("state {} not in basis", self.row)))?;
        let c = basis
            .index_of(&self.col)
            .ok_or_else(|| Error::DimensionMismatch(format!("state {} not in basis", self.col)))?;
        let s2 = std::f64::consts::SQRT_2;
        Ok(match self.kind {
            OperatorKind::Diagonal => rho[(r, r)].re,
            OperatorKind::RealOffDiag => s2 * 0.5 * (rho[(r, c)] + rho[(c, r)]).re,
            OperatorKind::ImagOffDiag => s2 * 0.5 * (rho[(r, c)] - rho[(c, r)]).im,
        })
    }
}

impl fmt::Display for ElementOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

/// The complete Hermitian operator basis of `basis`: `D` diagonal
/// projectors followed by a real/imaginary pair for every `i < j`.
pub fn element_operators(basis: &FockBasis) -> Vec<ElementOperator> {
    let d = basis.dimension();
    let mut ops = Vec::with_capacity(d * d);
    for s in basis.states() {
        ops.push(
            ElementOperator::new(OperatorKind::Diagonal, s.clone(), s.clone()).expect("diagonal"),
        );
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let (a, b) = (basis.state(i).clone(), basis.state(j).clone());
            ops.push(
                ElementOperator::new(OperatorKind::RealOffDiag, a.clone(), b.clone())
                    .expect("pair"),
            );
            ops.push(ElementOperator::new(OperatorKind::ImagOffDiag, a, b).expect("pair"));
        }
    }
    ops
}
