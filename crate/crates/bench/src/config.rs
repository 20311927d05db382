//! Run configuration, read from TOML.

use std::path::Path;

use serde::{Deserialize, Serialize};
use wigtomo::wigner::{HardwareProfile, ParityAngles};
use wigtomo::{ProtocolConfig, SignMode};

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TargetConfig {
    pub modes: usize,
    /// Cutoff of the measured basis; 2 adds two-photon operators.
    pub cutoff: usize,
    /// W-state phases `φ_1 … φ_{M−1}`; empty means all zero.
    pub phases: Vec<f64>,
    pub leak_weight: f64,
    pub dephase_weight: f64,
    pub perturb_seed: u64,
}

impl Default for TargetConfig {
    fn default() -> Self {
        Self {
            modes: 3,
            cutoff: 1,
            phases: Vec::new(),
            leak_weight: 0.0,
            dephase_weight: 0.0,
            perturb_seed: 0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngleProfile {
    /// `θ_m = π`.
    Parity,
    /// `θ_m = 2π χ_m t` from the reference dispersive shifts.
    Hardware,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolSection {
    pub readout_flip: f64,
    pub repetitions: usize,
    pub sign_mode: SignMode,
    pub angles: AngleProfile,
    /// Parity wait for the hardware profile; searched when absent.
    pub wait_us: Option<f64>,
    pub chi_mhz: Option<Vec<f64>>,
}

impl Default for ProtocolSection {
    fn default() -> Self {
        Self {
            readout_flip: 0.0,
            repetitions: 10,
            sign_mode: SignMode::PairedPhases,
            angles: AngleProfile::Parity,
            wait_us: None,
            chi_mhz: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OliSection {
    /// Set size as a multiple of the `D²` real parameters.
    pub set_factor: f64,
    pub pool_size: usize,
    pub exchange_iterations: usize,
    /// Per-mode photon cap of the inversion basis; absent means the
    /// target's total-cutoff basis.
    pub mode_cap: Option<usize>,
}

impl Default for OliSection {
    fn default() -> Self {
        Self {
            set_factor: 2.0,
            pool_size: 2000,
            exchange_iterations: 3000,
            mode_cap: Some(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConvergenceSection {
    /// Shot checkpoints per group, strictly increasing.
    pub checkpoints: Vec<usize>,
    pub groups: usize,
    pub strategies: Vec<String>,
}

impl Default for ConvergenceSection {
    fn default() -> Self {
        Self {
            checkpoints: vec![20_000, 40_000, 80_000, 160_000, 320_000, 640_000],
            groups: 10,
            strategies: vec!["DEMESST".into(), "OLI".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingSection {
    pub modes: Vec<usize>,
    pub seeds: usize,
    pub target_fidelity: f64,
    /// Largest shot budget tried before a row is flagged.
    pub budget_cap: usize,
    /// Ratio `hi/lo` at which bisection stops.
    pub resolution: f64,
    pub strategies: Vec<String>,
}

impl Default for ScalingSection {
    fn default() -> Self {
        Self {
            modes: vec![2, 3, 4, 5],
            seeds: 5,
            target_fidelity: 0.9,
            budget_cap: 20_000_000,
            resolution: 1.02,
            strategies: vec!["DEMESST".into(), "OLI".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceSection {
    /// Modes whose single-excitation subspace is reconstructed; empty
    /// means the full space.
    pub subspace: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct W2Section {
    /// Accepted-sample checkpoints, strictly increasing.
    pub checkpoints: Vec<usize>,
    pub radius: f64,
    pub relative_cutoff: f64,
    /// Phases of the target used for sampling; defaults to the prepared
    /// state's phases.
    pub target_phases: Option<Vec<f64>>,
}

impl Default for W2Section {
    fn default() -> Self {
        Self {
            checkpoints: vec![625, 1250, 2500, 5000, 10_000],
            radius: 3.0,
            relative_cutoff: 1e-3,
            target_phases: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ReconstructSection {
    pub strategy: String,
    pub shots: usize,
}

impl Default for ReconstructSection {
    fn default() -> Self {
        Self {
            strategy: "DEMESST".into(),
            shots: 200_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub target: TargetConfig,
    pub protocol: ProtocolSection,
    pub oli: OliSection,
    pub convergence: ConvergenceSection,
    pub scaling: ScalingSection,
    pub trace_check: TraceSection,
    pub w2: W2Section,
    pub reconstruct: ReconstructSection,
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let c: Self = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(BenchError::Config(m));
        if self.target.modes == 0 {
            return bad("target.modes must be at least 1".into());
        }
        if !self.target.phases.is_empty() && self.target.phases.len() + 1 != self.target.modes {
            return bad(format!(
                "target.phases needs {} entries",
                self.target.modes.saturating_sub(1)
            ));
        }
        if self.protocol.repetitions == 0 || !(0.0..0.5).contains(&self.protocol.readout_flip) {
            return bad("protocol needs repetitions >= 1 and 0 <= readout_flip < 0.5".into());
        }
        for (name, list) in [
            ("convergence.checkpoints", &self.convergence.checkpoints),
            ("w2.checkpoints", &self.w2.checkpoints),
        ] {
            if list.is_empty() || list.windows(2).any(|w| w[1] <= w[0]) {
                return bad(format!("{name} must be non-empty and strictly increasing"));
            }
        }
        if self.convergence.groups == 0 || self.scaling.seeds == 0 {
            return bad("convergence.groups and scaling.seeds must be positive".into());
        }
        if self.scaling.resolution <= 1.0 {
            return bad("scaling.resolution must exceed 1".into());
        }
        if self
            .trace_check
            .subspace
            .iter()
            .any(|&m| m >= self.target.modes)
        {
            return bad("trace_check.subspace lists a mode outside the target".into());
        }
        for s in self
            .convergence
            .strategies
            .iter()
            .chain(&self.scaling.strategies)
            .chain([&self.reconstruct.strategy])
        {
            crate::harness::parse_strategy(s)?;
        }
        Ok(())
    }

    pub fn phases(&self) -> Vec<f64> {
        if self.target.phases.is_empty() {
            vec![0.0; self.target.modes.saturating_sub(1)]
        } else {
            self.target.phases.clone()
        }
    }

    /// Parity angles for `modes` modes under the configured profile.
    pub fn angles(&self, modes: usize) -> Result<ParityAngles> {
        match self.protocol.angles {
            AngleProfile::Parity => Ok(ParityAngles::pi(modes)),
            AngleProfile::Hardware => {
                let mut p = HardwareProfile::default();
                if let Some(chi) = &self.protocol.chi_mhz {
                    p.chi_mhz = chi.clone();
                }
                p.wait_us = self.protocol.wait_us;
                Ok(p.last_modes(modes)?.angles()?)
            }
        }
    }

    pub fn protocol(&self, modes: usize, seed: u64) -> Result<ProtocolConfig> {
        Ok(ProtocolConfig::new(
            self.angles(modes)?,
            self.protocol.readout_flip,
            self.protocol.repetitions,
            self.protocol.sign_mode,
            seed,
        )?)
    }
}
