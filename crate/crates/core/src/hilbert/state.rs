use std::collections::HashMap;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::basis::{FockBasis, OccupationVector};
use super::operator::{element_operators, ElementOperator, ModePartition, OperatorKind};
use crate::error::{Error, Result};
use crate::Complex;

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const POSITIVITY_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;

/// Complex square matrix over a [`FockBasis`].
///
/// `physical` is set only by constructors that checked Hermiticity,
/// positivity and unit trace; raw reconstructions carry `physical = false`.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    basis: Arc<FockBasis>,
    entries: DMatrix<Complex>,
    physical: bool,
}

impl DensityMatrix {
    /// Wrap a matrix without any physicality claim.
    pub fn raw(basis: Arc<FockBasis>, entries: DMatrix<Complex>) -> Result<Self> {
        let d = basis.dimension();
        if entries.nrows() != d || entries.ncols() != d {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a basis of dimension {d}",
                entries.nrows(),
                entries.ncols()
            )));
        }
        Ok(Self {
            basis,
            entries,
            physical: false,
        })
    }

    /// Wrap a matrix that must pass the physicality checks.
    pub fn physical(basis: Arc<FockBasis>, entries: DMatrix<Complex>) -> Result<Self> {
        let mut dm = Self::raw(basis, entries)?;
        dm.check_physical()?;
        dm.physical = true;
        Ok(dm)
    }

    /// `|ψ⟩⟨ψ|` for a normalized `psi`.
    pub fn pure(basis: Arc<FockBasis>, psi: &DVector<Complex>) -> Result<Self> {
        let norm = psi.norm();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Precondition(format!("state vector has norm {norm}")));
        }
        let m = psi * psi.adjoint();
        Self::physical(basis, m)
    }

    pub fn maximally_mixed(basis: Arc<FockBasis>) -> Self {
        let d = basis.dimension();
        let m = DMatrix::from_diagonal_element(d, d, Complex::new(1.0 / d as f64, 0.0));
        Self {
            basis,
            entries: m,
            physical: true,
        }
    }

    pub fn basis(&self) -> &Arc<FockBasis> {
        &self.basis
    }

    pub fn entries(&self) -> &DMatrix<Complex> {
        &self.entries
    }

    pub fn dimension(&self) -> usize {
        self.basis.dimension()
    }

    pub fn is_physical(&self) -> bool {
        self.physical
    }

    pub fn trace(&self) -> f64 {
        self.entries.trace().re
    }

    pub fn hermiticity_error(&self) -> f64 {
        (&self.entries - self.entries.adjoint()).camax()
    }

    /// Eigenvalues of the Hermitian part, ascending.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let h = hermitian_part(&self.entries);
        let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn check_physical(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if herm > HERMITIAN_TOL {
            return Err(Error::Precondition(format!(
                "matrix is not Hermitian (deviation {herm:e})"
            )));
        }
        let tr = self.trace();
        if (tr - 1.0).abs() > TRACE_TOL {
            return Err(Error::Precondition(format!("trace {tr} is not 1")));
        }
        let min = self.eigenvalues().first().copied().unwrap_or(0.0);
        if min < -POSITIVITY_TOL {
            return Err(Error::Precondition(format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `Tr[self · other]`, real part.
    pub fn overlap(&self, other: &DensityMatrix) -> Result<f64> {
        self.same_basis(other)?;
        Ok(self
            .entries
            .component_mul(&other.entries.transpose())
            .sum()
            .re)
    }

    pub fn frobenius_distance(&self, other: &DensityMatrix) -> Result<f64> {
        self.same_basis(other)?;
        Ok((&self.entries - &other.entries).norm())
    }

    fn same_basis(&self, other: &DensityMatrix) -> Result<()> {
        if self.basis != other.basis {
            return Err(Error::DimensionMismatch(format!(
                "bases ({}, {}) and ({}, {}) differ",
                self.basis.modes(),
                self.basis.cutoff(),
                other.basis.modes(),
                other.basis.cutoff()
            )));
        }
        Ok(())
    }

    /// Same state on a basis with a larger photon cutoff (zero padding).
    pub fn with_cutoff(&self, cutoff: usize) -> Result<Self> {
        if cutoff < self.basis.cutoff() {
            return Err(Error::Precondition(format!(
                "cannot shrink cutoff {} to {cutoff}",
                self.basis.cutoff()
            )));
        }
        let target = crate::hilbert::enumerate_basis(self.basis.modes(), cutoff)?;
        let map: Vec<usize> = self
            .basis
            .states()
            .iter()
            .map(|s| target.index_of(s).expect("smaller basis embeds"))
            .collect();
        let d = target.dimension();
        let mut m = DMatrix::zeros(d, d);
        for (i, &ti) in map.iter().enumerate() {
            for (j, &tj) in map.iter().enumerate() {
                m[(ti, tj)] = self.entries[(i, j)];
            }
        }
        Ok(Self {
            basis: target,
            entries: m,
            physical: self.physical,
        })
    }

    /// Entries restricted to the states of `basis` (which must live on the
    /// same number of modes). States absent from `self` contribute zeros.
    pub fn restrict_to(&self, basis: Arc<FockBasis>) -> Result<Self> {
        if basis.modes() != self.basis.modes() {
            return Err(Error::DimensionMismatch(format!(
                "{}-mode basis for a {}-mode state",
                basis.modes(),
                self.basis.modes()
            )));
        }
        let map: Vec<Option<usize>> = basis
            .states()
            .iter()
            .map(|s| self.basis.index_of(s))
            .collect();
        let d = basis.dimension();
        let mut m = DMatrix::zeros(d, d);
        for (i, si) in map.iter().enumerate() {
            for (j, sj) in map.iter().enumerate() {
                if let (Some(a), Some(b)) = (si, sj) {
                    m[(i, j)] = self.entries[(*a, *b)];
                }
            }
        }
        Self::raw(basis, m)
    }

    /// Expectation of every element operator of the basis, in
    /// [`element_operators`] order.
    pub fn element_expectations(&self) -> Vec<f64> {
        element_operators(&self.basis)
            .iter()
            .map(|op| {
                op.expectation(&self.basis, &self.entries)
                    .expect("operator on own basis")
            })
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&DensityMatrixJson::from(self))?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let j: DensityMatrixJson = serde_json::from_str(s)?;
        j.try_into()
    }
}

pub(crate) fn hermitian_part(m: &DMatrix<Complex>) -> DMatrix<Complex> {
    (m + m.adjoint()).scale(0.5)
}

/// Serialized layout of a [`DensityMatrix`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityMatrixJson {
    pub modes: usize,
    pub cutoff: usize,
    pub ordering: String,
    /// Per-mode occupation cap, when the basis has one.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_cap: Option<usize>,
    /// Row-major `[re, im]` pairs.
    pub entries: Vec<[f64; 2]>,
}

impl From<&DensityMatrix> for DensityMatrixJson {
    fn from(dm: &DensityMatrix) -> Self {
        let d = dm.dimension();
        let mut entries = Vec::with_capacity(d * d);
        for i in 0..d {
            for j in 0..d {
                let z = dm.entries[(i, j)];
                entries.push([z.re, z.im]);
            }
        }
        Self {
            modes: dm.basis.modes(),
            cutoff: dm.basis.cutoff(),
            ordering: "graded-lex".into(),
            mode_cap: dm.basis.mode_cap(),
            entries,
        }
    }
}

impl TryFrom<DensityMatrixJson> for DensityMatrix {
    type Error = Error;

    fn try_from(j: DensityMatrixJson) -> Result<Self> {
        if j.ordering != "graded-lex" {
            return Err(Error::Precondition(format!(
                "unsupported ordering {:?}",
                j.ordering
            )));
        }
        let basis = match j.mode_cap {
            Some(cap) if j.cutoff == j.modes * cap => FockBasis::per_mode(j.modes, cap)?,
            Some(cap) => {
                return Err(Error::Precondition(format!(
                    "cutoff {} with per-mode cap {cap}",
                    j.cutoff
                )))
            }
            None => crate::hilbert::enumerate_basis(j.modes, j.cutoff)?,
        };
        let d = basis.dimension();
        if j.entries.len() != d * d {
            return Err(Error::DimensionMismatch(format!(
                "{} entries for dimension {d}",
                j.entries.len()
            )));
        }
        let m =
            DMatrix::from_row_iterator(d, d, j.entries.iter().map(|p| Complex::new(p[0], p[1])));
        DensityMatrix::raw(basis, m)
    }
}

/// `ρ_S̄ = Tr_S[ρ P_S]`: project the vacuum modes of `partition` onto
/// `|0⟩` and trace them out. The result lives on the active modes with the
/// same photon cutoff.
pub fn project_and_trace(
    state: &DensityMatrix,
    partition: &ModePartition,
) -> Result<DensityMatrix> {
    let basis = state.basis();
    if partition.modes() != basis.modes() {
        return Err(Error::DimensionMismatch(format!(
            "partition over {} modes for a {}-mode state",
            partition.modes(),
            basis.modes()
        )));
    }
    let active = partition.active();
    let reduced = basis.reduced(active.len());
    let map: Vec<usize> = reduced
        .states()
        .iter()
        .map(|s| {
            basis
                .index_of(&s.scatter(active, basis.modes()))
                .expect("embedded state within cutoff")
        })
        .collect();
    let d = reduced.dimension();
    let mut m = DMatrix::zeros(d, d);
    for (i, &a) in map.iter().enumerate() {
        for (j, &b) in map.iter().enumerate() {
            m[(i, j)] = state.entries()[(a, b)];
        }
    }
    DensityMatrix::raw(reduced, m)
}

/// `|W⟩ = (|10…0⟩ + Σ_j e^{iφ_j}|0…1_j…0⟩)/√M` as a state vector on `basis`.
pub fn w_state_vector(basis: &FockBasis, phases: &[f64]) -> Result<DVector<Complex>> {
    let modes = basis.modes();
    if modes < 2 {
        return Err(Error::Precondition(format!(
            "a W state needs at least 2 modes, got {modes}"
        )));
    }
    if phases.len() != modes - 1 {
        return Err(Error::Precondition(format!(
            "{} phases for a {modes}-mode W state (need {})",
            phases.len(),
            modes - 1
        )));
    }
    if basis.cutoff() < 1 {
        return Err(Error::Precondition("a W state needs cutoff >= 1".into()));
    }
    let amp = 1.0 / (modes as f64).sqrt();
    let mut psi = DVector::zeros(basis.dimension());
    for j in 0..modes {
        let idx = basis
            .index_of(&OccupationVector::single(modes, j))
            .expect("single excitation");
        let phase = if j == 0 { 0.0 } else { phases[j - 1] };
        psi[idx] = Complex::from_polar(amp, phase);
    }
    Ok(psi)
}

/// Pure W state on the single-excitation basis `(M, N = 1)`.
pub fn ideal_w_state(modes: usize, phases: &[f64]) -> Result<DensityMatrix> {
    if modes < 2 {
        return Err(Error::Precondition(format!(
            "a W state needs at least 2 modes, got {modes}"
        )));
    }
    let basis = crate::hilbert::enumerate_basis(modes, 1)?;
    let psi = w_state_vector(&basis, phases)?;
    DensityMatrix::pure(basis, &psi)
}

/// Imperfect-preparation stand-in:
/// `(1 − l − d) ρ + d · diag(ρ) + l · L` where `L` spreads weight over up to
/// three pseudo-randomly chosen two-photon basis states.
pub fn perturbed_state(
    state: &DensityMatrix,
    leak_weight: f64,
    dephase_weight: f64,
    seed: u64,
) -> Result<DensityMatrix> {
    if !(0.0..=1.0).contains(&leak_weight) || !(0.0..=1.0).contains(&dephase_weight) {
        return Err(Error::Precondition(
            "perturbation weights must lie in [0, 1]".into(),
        ));
    }
    if leak_weight + dephase_weight > 1.0 {
        return Err(Error::Precondition(
            "perturbation weights must sum to at most 1".into(),
        ));
    }
    if !state.is_physical() {
        return Err(Error::Precondition(
            "perturbed_state needs a physical input".into(),
        ));
    }
    let basis = state.basis().clone();
    if leak_weight > 0.0 && basis.cutoff() < 2 {
        return Err(Error::Precondition(
            "two-photon leakage needs a basis with cutoff >= 2".into(),
        ));
    }
    if leak_weight == 0.0 && dephase_weight == 0.0 {
        return Ok(state.clone());
    }
    let d = basis.dimension();
    let rho = state.entries();
    let mut out = rho.scale(1.0 - leak_weight - dephase_weight);
    for i in 0..d {
        out[(i, i)] += rho[(i, i)] * dephase_weight;
    }
    if leak_weight > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let two: Vec<usize> = (0..d).filter(|&i| basis.state(i).total() == 2).collect();
        let k = two.len().min(3);
        let picks = sample(&mut rng, two.len(), k);
        let weights: Vec<f64> = (0..k).map(|_| rng.random_range(0.2..1.0)).collect();
        let total: f64 = weights.iter().sum();
        for (p, w) in picks.iter().zip(&weights) {
            let i = two[p];
            out[(i, i)] += Complex::new(leak_weight * w / total, 0.0);
        }
    }
    DensityMatrix::physical(basis, out)
}

/// Assemble `ρ̂` from element estimates:
/// `⟨n|ρ̂|n⟩ = est(D)`, `⟨n|ρ̂|n′⟩ = (est(R) + i est(I))/√2` for `n` before
/// `n′`, and the conjugate below the diagonal.
pub fn assemble_from_elements(
    basis: &Arc<FockBasis>,
    estimates: &HashMap<ElementOperator, f64>,
) -> Result<DensityMatrix> {
    let ops = element_operators(basis);
    let mut values = Vec::with_capacity(ops.len());
    for op in &ops {
        match estimates.get(op) {
            Some(v) => values.push(*v),
            None => return Err(Error::MissingEstimate(op.label())),
        }
    }
    assemble_from_slice(basis, &values)
}

/// As [`assemble_from_elements`] with estimates aligned to
/// [`element_operators`] order.
pub fn assemble_from_slice(basis: &Arc<FockBasis>, values: &[f64]) -> Result<DensityMatrix> {
    let ops = element_operators(basis);
    if values.len() != ops.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} estimates for {} element operators",
            values.len(),
            ops.len()
        )));
    }
    let d = basis.dimension();
    let mut m = DMatrix::zeros(d, d);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    for (op, &v) in ops.iter().zip(values) {
        let r = basis.index_of(op.row()).expect("own basis");
        let c = basis.index_of(op.col()).expect("own basis");
        match op.kind() {
            OperatorKind::Diagonal => m[(r, r)] = Complex::new(v, 0.0),
            OperatorKind::RealOffDiag => {
                m[(r, c)].re = v * h;
                m[(c, r)].re = v * h;
            }
            OperatorKind::ImagOffDiag => {
                m[(r, c)].im = v * h;
                m[(c, r)].im = -v * h;
            }
        }
    }
    DensityMatrix::raw(basis.clone(), m)
}
