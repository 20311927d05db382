use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-mode generalized parity angles `θ_m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ParityAngles(Vec<f64>);

impl ParityAngles {
    pub fn new(thetas: Vec<f64>) -> Result<Self> {
        for (mode, &angle) in thetas.iter().enumerate() {
            let wrapped = angle.rem_euclid(TAU);
            if !angle.is_finite() || wrapped.min(TAU - wrapped) < 1e-9 {
                return Err(Error::DegenerateAngle { mode, angle });
            }
        }
        Ok(Self(thetas))
    }

    /// `θ_m = π` on every mode: the ordinary parity operator.
    pub fn pi(modes: usize) -> Self {
        Self(vec![PI; modes])
    }

    pub fn uniform(modes: usize, theta: f64) -> Result<Self> {
        Self::new(vec![theta; modes])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn get(&self, mode: usize) -> f64 {
        self.0[mode]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// `−θ` on every mode.
    pub fn negated(&self) -> Self {
        Self(self.0.iter().map(|t| -t).collect())
    }

    /// Angles of the listed modes, renumbered from zero.
    pub fn select(&self, modes: &[usize]) -> Self {
        Self(modes.iter().map(|&m| self.0[m]).collect())
    }

    /// `Π_{m ∈ modes} 2(1 − cos θ_m)/π`.
    pub fn normalization_over(&self, modes: &[usize]) -> f64 {
        modes
            .iter()
            .map(|&m| 2.0 * (1.0 - self.0[m].cos()) / PI)
            .product()
    }

    /// True when every angle is `π` modulo `2π`.
    pub fn is_parity(&self) -> bool {
        self.0
            .iter()
            .all(|t| ((t - PI).rem_euclid(TAU)).min(TAU - (t - PI).rem_euclid(TAU)) < 1e-12)
    }
}

impl TryFrom<Vec<f64>> for ParityAngles {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<ParityAngles> for Vec<f64> {
    fn from(a: ParityAngles) -> Self {
        a.0
    }
}

/// Storage-mode dispersive shifts `χ_m/2π` in MHz of the reference device.
pub const REFERENCE_CHI_MHZ: [f64; 4] = [-1.636, -1.269, -1.093, -0.906];

/// Angles derived from dispersive shifts: `θ_m = 2π χ_m t` with `χ_m` in MHz
/// and the wait `t` in µs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HardwareProfile {
    pub chi_mhz: Vec<f64>,
    /// Parity wait time. When absent, the wait that brings the angles
    /// closest to `π` modulo `2π` is searched for.
    pub wait_us: Option<f64>,
}

impl Default for HardwareProfile {
    fn default() -> Self {
        Self {
            chi_mhz: REFERENCE_CHI_MHZ.to_vec(),
            wait_us: None,
        }
    }
}

impl HardwareProfile {
    /// Profile restricted to the last `modes` entries (smaller experiments
    /// used the highest-frequency modes).
    pub fn last_modes(&self, modes: usize) -> Result<Self> {
        if modes > self.chi_mhz.len() {
            return Err(Error::Precondition(format!(
                "profile lists {} modes, {modes} requested",
                self.chi_mhz.len()
            )));
        }
        Ok(Self {
            chi_mhz: self.chi_mhz[self.chi_mhz.len() - modes..].to_vec(),
            wait_us: self.wait_us,
        })
    }

    /// Wait time in `(0, max_us]` minimizing `Σ_m (1 + cos θ_m)`.
    pub fn best_wait(&self, max_us: f64) -> f64 {
        let score =
            |t: f64| -> f64 { self.chi_mhz.iter().map(|c| 1.0 + (TAU * c * t).cos()).sum() };
        let steps = 200_000;
        let mut best = (f64::INFINITY, 0.0);
        for i in 1..=steps {
            let t = max_us * i as f64 / steps as f64;
            let s = score(t);
            if s < best.0 {
                best = (s, t);
            }
        }
        // Golden-section polish inside the winning grid cell.
        let h = max_us / steps as f64;
        let (mut lo, mut hi) = ((best.1 - h).max(1e-12), best.1 + h);
        let g = 0.5 * (5f64.sqrt() - 1.0);
        for _ in 0..100 {
            let a = hi - g * (hi - lo);
            let b = lo + g * (hi - lo);
            if score(a) < score(b) {
                hi = b;
            } else {
                lo = a;
            }
        }
        0.5 * (lo + hi)
    }

    pub fn wait(&self) -> f64 {
        self.wait_us.unwrap_or_else(|| self.best_wait(2.0))
    }

    pub fn angles(&self) -> Result<ParityAngles> {
        let t = self.wait();
        ParityAngles::new(self.chi_mhz.iter().map(|c| TAU * c * t).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_angles_rejected() {
        assert!(ParityAngles::new(vec![PI, 0.0]).is_err());
        assert!(ParityAngles::new(vec![4.0 * PI]).is_err());
        assert!(ParityAngles::new(vec![-TAU]).is_err());
        assert!(ParityAngles::new(vec![PI, 0.5]).is_ok());
    }

    #[test]
    fn normalization_values() {
        let a = ParityAngles::pi(3);
        assert!((a.normalization_over(&[0]) - 4.0 / PI).abs() < 1e-15);
        assert!((a.normalization_over(&[0, 1, 2]) - (4.0 / PI).powi(3)).abs() < 1e-14);
        let b = ParityAngles::uniform(1, PI / 2.0).unwrap();
        assert!((b.normalization_over(&[0]) - 2.0 / PI).abs() < 1e-15);
        assert_eq!(a.normalization_over(&[]), 1.0);
    }

    #[test]
    fn hardware_angles_sit_near_pi() {
        let p = HardwareProfile::default();
        let score = |t: f64| -> f64 { p.chi_mhz.iter().map(|c| 1.0 + (TAU * c * t).cos()).sum() };
        let best = score(p.wait());
        for i in 1..=1000 {
            assert!(best <= score(2.0 * i as f64 / 1000.0) + 1e-12);
        }
        let a = p.angles().unwrap();
        let spread: f64 = a.as_slice().iter().map(|t| 1.0 + t.cos()).sum();
        assert!((spread - best).abs() < 1e-12);
        let two = p.last_modes(2).unwrap();
        assert_eq!(two.chi_mhz, vec![-1.093, -0.906]);
        let fixed = HardwareProfile {
            chi_mhz: vec![-1.0],
            wait_us: Some(0.5),
        };
        assert!((fixed.angles().unwrap().get(0) + PI).abs() < 1e-12);
    }
}
