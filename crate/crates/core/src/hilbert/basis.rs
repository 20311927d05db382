use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default ceiling on the number of basis states.
pub const DEFAULT_DIMENSION_LIMIT: usize = 1_000_000;

/// Photon number per mode.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OccupationVector(Vec<u32>);

impl OccupationVector {
    pub fn new(occupations: Vec<u32>) -> Self {
        Self(occupations)
    }

    pub fn vacuum(modes: usize) -> Self {
        Self(vec![0; modes])
    }

    /// `|0…1_j…0⟩`.
    pub fn single(modes: usize, j: usize) -> Self {
        let mut v = vec![0; modes];
        v[j] = 1;
        Self(v)
    }

    pub fn modes(&self) -> usize {
        self.0.len()
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, mode: usize) -> u32 {
        self.0[mode]
    }

    /// Occupations of the listed modes, in the listed order.
    pub fn select(&self, modes: &[usize]) -> Self {
        Self(modes.iter().map(|&m| self.0[m]).collect())
    }

    /// Place the occupations of `self` at positions `modes` of an
    /// otherwise-vacuum vector of length `total_modes`.
    pub fn scatter(&self, modes: &[usize], total_modes: usize) -> Self {
        let mut v = vec![0; total_modes];
        for (&m, &n) in modes.iter().zip(&self.0) {
            v[m] = n;
        }
        Self(v)
    }
}

impl fmt::Display for OccupationVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.iter().all(|&n| n < 10) {
            for n in &self.0 {
                write!(f, "{n}")?;
            }
            Ok(())
        } else {
            let parts: Vec<String> = self.0.iter().map(|n| n.to_string()).collect();
            write!(f, "({})", parts.join(","))
        }
    }
}

/// Truncated multimode Fock basis: all occupation vectors over `modes`
/// modes with total photon number at most `cutoff`, in graded
/// lexicographic order (by total photon number, then with earlier modes
/// taking precedence, so `100` precedes `010`).
///
/// A basis may also cap the occupation of every single mode, which gives
/// the per-mode truncation `{0, …, cap}^M` when `cutoff = M · cap`.
#[derive(Debug, Clone)]
pub struct FockBasis {
    modes: usize,
    cutoff: usize,
    mode_cap: Option<usize>,
    states: Vec<OccupationVector>,
    index_of: HashMap<OccupationVector, usize>,
}

impl PartialEq for FockBasis {
    fn eq(&self, other: &Self) -> bool {
        self.modes == other.modes && self.cutoff == other.cutoff && self.mode_cap == other.mode_cap
    }
}

impl Eq for FockBasis {}

pub fn binomial(n: u128, k: u128) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul(n - i) / (i + 1);
    }
    acc
}

/// Enumerate the Fock basis over `modes >= 1` modes with total photon cutoff.
pub fn enumerate_basis(modes: usize, cutoff: usize) -> Result<Arc<FockBasis>> {
    if modes == 0 {
        return Err(Error::Precondition(
            "a basis needs at least one mode".into(),
        ));
    }
    FockBasis::with_limit(modes, cutoff, DEFAULT_DIMENSION_LIMIT).map(Arc::new)
}

impl FockBasis {
    /// Like [`enumerate_basis`] with an explicit capacity limit. `modes = 0`
    /// is accepted and yields the one-dimensional space of a fully projected
    /// subsystem.
    pub fn with_limit(modes: usize, cutoff: usize, limit: usize) -> Result<Self> {
        Self::build(modes, cutoff, None, limit)
    }

    /// Per-mode truncation: every mode holds at most `cap` photons, in the
    /// same graded order.
    pub fn per_mode(modes: usize, cap: usize) -> Result<Arc<Self>> {
        if modes == 0 {
            return Err(Error::Precondition(
                "a basis needs at least one mode".into(),
            ));
        }
        Self::build(modes, modes * cap, Some(cap), DEFAULT_DIMENSION_LIMIT).map(Arc::new)
    }

    fn build(modes: usize, cutoff: usize, mode_cap: Option<usize>, limit: usize) -> Result<Self> {
        let dimension = match mode_cap {
            None => binomial((modes + cutoff) as u128, cutoff as u128),
            Some(c) => (c as u128 + 1).saturating_pow(modes as u32),
        };
        if dimension > limit as u128 {
            return Err(Error::Capacity { dimension, limit });
        }
        let mut states = Vec::with_capacity(dimension as usize);
        let mut scratch = vec![0u32; modes];
        for total in 0..=cutoff as u32 {
            compositions(&mut scratch, 0, total, &mut states);
        }
        if let Some(c) = mode_cap {
            states.retain(|s| s.0.iter().all(|&n| n as usize <= c));
        }
        let index_of = states
            .iter()
            .cloned()
            .enumerate()
            .map(|(i, s)| (s, i))
            .collect();
        Ok(Self {
            modes,
            cutoff,
            mode_cap,
            states,
            index_of,
        })
    }

    /// The basis of `modes` of this basis' modes, with the same limits.
    pub(crate) fn reduced(&self, modes: usize) -> Arc<Self> {
        let cutoff = match self.mode_cap {
            Some(c) => (modes * c).min(self.cutoff),
            None => self.cutoff,
        };
        Arc::new(Self::build(modes, cutoff, self.mode_cap, usize::MAX).expect("reduced basis fits"))
    }

    /// Largest occupation any single mode can hold.
    pub fn max_occupation(&self) -> usize {
        self.mode_cap.map_or(self.cutoff, |c| c.min(self.cutoff))
    }

    pub fn mode_cap(&self) -> Option<usize> {
        self.mode_cap
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dimension(&self) -> usize {
        self.states.len()
    }

    pub fn states(&self) -> &[OccupationVector] {
        &self.states
    }

    pub fn state(&self, i: usize) -> &OccupationVector {
        &self.states[i]
    }

    pub fn index_of(&self, state: &OccupationVector) -> Option<usize> {
        self.index_of.get(state).copied()
    }
}

// Earlier modes take the larger share first.
fn compositions(scratch: &mut [u32], pos: usize, remaining: u32, out: &mut Vec<OccupationVector>) {
    if pos + 1 >= scratch.len() {
        if scratch.is_empty() {
            if remaining == 0 {
                out.push(OccupationVector(Vec::new()));
            }
            return;
        }
        scratch[pos] = remaining;
        out.push(OccupationVector(scratch.to_vec()));
        scratch[pos] = 0;
        return;
    }
    for first in (0..=remaining).rev() {
        scratch[pos] = first;
        compositions(scratch, pos + 1, remaining - first, out);
    }
    scratch[pos] = 0;
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(b: &FockBasis) -> Vec<String> {
        b.states().iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn three_modes_one_photon() {
        let b = enumerate_basis(3, 1).unwrap();
        assert_eq!(labels(&b), ["000", "100", "010", "001"]);
    }

    #[test]
    fn single_vacuum() {
        let b = enumerate_basis(1, 0).unwrap();
        assert_eq!(labels(&b), ["0"]);
    }

    #[test]
    fn three_modes_two_photons() {
        let b = enumerate_basis(3, 2).unwrap();
        assert_eq!(b.dimension(), 10);
        assert_eq!(
            labels(&b),
            ["000", "100", "010", "001", "200", "110", "101", "020", "011", "002"]
        );
    }

    #[test]
    fn zero_modes_is_rejected_publicly_but_reducible() {
        assert!(enumerate_basis(0, 2).is_err());
        let r = enumerate_basis(3, 2).unwrap().reduced(0);
        assert_eq!(r.dimension(), 1);
        assert_eq!(r.state(0).modes(), 0);
    }

    #[test]
    fn per_mode_truncation() {
        let b = FockBasis::per_mode(3, 1).unwrap();
        assert_eq!(b.dimension(), 8);
        assert_eq!(
            labels(&b),
            ["000", "100", "010", "001", "110", "101", "011", "111"]
        );
        assert_eq!(b.max_occupation(), 1);
        let r = b.reduced(2);
        assert_eq!(labels(&r), ["00", "10", "01", "11"]);
        assert_ne!(*b, *enumerate_basis(3, 3).unwrap());
    }

    #[test]
    fn capacity_error() {
        let err = FockBasis::with_limit(20, 10, DEFAULT_DIMENSION_LIMIT).unwrap_err();
        assert!(matches!(err, Error::Capacity { .. }));
    }

    #[test]
    fn dimension_matches_brute_force() {
        for m in 1..=8usize {
            for n in 0..=3usize {
                let b = enumerate_basis(m, n).unwrap();
                let brute = wigtomo_oracle::brute_force_states(m, n);
                assert_eq!(b.dimension() as u128, binomial((m + n) as u128, n as u128));
                assert_eq!(b.dimension(), brute.len(), "M={m} N={n}");
                for s in &brute {
                    let occ = OccupationVector::new(s.clone());
                    let i = b.index_of(&occ).expect("state present");
                    assert_eq!(b.state(i), &occ);
                }
            }
        }
    }
}
