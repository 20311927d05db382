use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{project_and_trace, DensityMatrix, ModePartition};
use crate::sampling::rng::substream;
use crate::sampling::SampledPoint;
use crate::wigner::{generalized_wigner_state, DisplacementPoint, ParityAngles};
use crate::Complex;

/// How the `φ` and `φ + π` readouts are combined into a signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SignMode {
    /// `R` shots at `φ` and `R` at `φ + π`; the signal is the difference of
    /// the two ground-state frequencies.
    PairedPhases,
    /// `R` single shots, each at `φ` or `φ + π` by a fair coin `s = ±1`; the
    /// signal is the mean of `s·A`.
    RandomSign,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProtocolConfig {
    pub angles: ParityAngles,
    pub readout_flip: f64,
    pub repetitions: usize,
    pub sign_mode: SignMode,
    pub seed: u64,
    /// Keep every individual outcome in the batch (for shot logs).
    #[serde(default)]
    pub record_shots: bool,
}

impl ProtocolConfig {
    pub fn new(
        angles: ParityAngles,
        readout_flip: f64,
        repetitions: usize,
        sign_mode: SignMode,
        seed: u64,
    ) -> Result<Self> {
        let c = Self {
            angles,
            readout_flip,
            repetitions,
            sign_mode,
            seed,
            record_shots: false,
        };
        c.validate()?;
        Ok(c)
    }

    /// Noise-free readout, paired phases, one repetition per branch.
    pub fn ideal(angles: ParityAngles, seed: u64) -> Self {
        Self {
            angles,
            readout_flip: 0.0,
            repetitions: 1,
            sign_mode: SignMode::PairedPhases,
            seed,
            record_shots: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.repetitions == 0 {
            return Err(Error::Precondition("repetitions must be at least 1".into()));
        }
        if !(0.0..0.5).contains(&self.readout_flip) {
            return Err(Error::Precondition(format!(
                "readout flip {} is outside [0, 0.5)",
                self.readout_flip
            )));
        }
        Ok(())
    }

    /// Shots consumed by one batch.
    pub fn shots_per_batch(&self) -> usize {
        match self.sign_mode {
            SignMode::PairedPhases => 2 * self.repetitions,
            SignMode::RandomSign => self.repetitions,
        }
    }
}

/// One binary readout: `branch` is `+1` for `φ` and `−1` for `φ + π`;
/// `ground` is the (possibly flipped) outcome `A = +1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shot {
    pub branch: i8,
    pub ground: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShotBatch {
    /// Label of the element operator this batch estimates, if any.
    pub operator: Option<String>,
    pub point: DisplacementPoint,
    pub phase: f64,
    /// `C_S̄ Z_{O_S̄}` or the fidelity denominator, copied from the sample.
    pub weight: f64,
    pub sign_mode: SignMode,
    pub plus_shots: usize,
    pub plus_ground: usize,
    pub minus_shots: usize,
    pub minus_ground: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub shots: Vec<Shot>,
}

impl ShotBatch {
    pub fn total_shots(&self) -> usize {
        self.plus_shots + self.minus_shots
    }
}

fn check_full(state: &DensityMatrix, point: &DisplacementPoint) -> Result<()> {
    if state.basis().modes() != point.partition().modes() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode state, point over {} modes",
            state.basis().modes(),
            point.partition().modes()
        )));
    }
    Ok(())
}

fn signal_of(
    reduced: &DensityMatrix,
    point: &DisplacementPoint,
    angles: &ParityAngles,
    phase: f64,
) -> Result<f64> {
    let w = generalized_wigner_state(reduced, point, &angles.negated())?;
    Ok((Complex::from_polar(1.0, phase) * w).re)
}

/// `P_g = ½(1 + Re[e^{iφ} W̃_ρ(α, −θ)])` without projection.
pub fn parity_probability(
    state: &DensityMatrix,
    point: &DisplacementPoint,
    angles: &ParityAngles,
    phase: f64,
) -> Result<f64> {
    check_full(state, point)?;
    if !point.partition().is_full() {
        return Err(Error::DimensionMismatch(
            "parity_probability needs a point on every mode".into(),
        ));
    }
    Ok(0.5 * (1.0 + signal_of(state, point, angles, phase)?))
}

/// `P_g = ½(Tr ρ_S̄ + Re[e^{iφ} W̃_{ρ_S̄}(α_S̄, −θ_S̄)])` after projecting the
/// vacuum modes `S` of `partition`. The point must target `partition`;
/// angles are indexed by global mode.
pub fn projected_parity_probability(
    state: &DensityMatrix,
    partition: &ModePartition,
    point: &DisplacementPoint,
    angles: &ParityAngles,
    phase: f64,
) -> Result<f64> {
    check_full(state, point)?;
    if point.partition() != partition {
        return Err(Error::DimensionMismatch(
            "point targets a different partition".into(),
        ));
    }
    let reduced = project_and_trace(state, partition)?;
    Ok(0.5 * (reduced.trace() + signal_of(&reduced, point, angles, phase)?))
}

/// A prepared state with its projected reductions cached per partition.
#[derive(Debug)]
pub struct MeasurementBackend {
    state: DensityMatrix,
    reduced: RwLock<HashMap<ModePartition, Arc<DensityMatrix>>>,
}

impl MeasurementBackend {
    pub fn new(state: DensityMatrix) -> Self {
        Self {
            state,
            reduced: RwLock::new(HashMap::new()),
        }
    }

    pub fn state(&self) -> &DensityMatrix {
        &self.state
    }

    pub fn reduced(&self, partition: &ModePartition) -> Result<Arc<DensityMatrix>> {
        if let Some(r) = self.reduced.read().expect("cache lock").get(partition) {
            return Ok(r.clone());
        }
        let r = Arc::new(project_and_trace(&self.state, partition)?);
        self.reduced
            .write()
            .expect("cache lock")
            .insert(partition.clone(), r.clone());
        Ok(r)
    }

    /// Noise-free signal `Re[e^{iφ} W̃_{ρ_S̄}(α_S̄, −θ_S̄)]`.
    pub fn expected_signal(
        &self,
        point: &DisplacementPoint,
        angles: &ParityAngles,
        phase: f64,
    ) -> Result<f64> {
        check_full(&self.state, point)?;
        let reduced = self.reduced(point.partition())?;
        signal_of(&reduced, point, angles, phase)
    }

    /// `(P_g(φ), P_g(φ + π))` and `Tr ρ_S̄`.
    pub fn probabilities(
        &self,
        point: &DisplacementPoint,
        angles: &ParityAngles,
        phase: f64,
    ) -> Result<(f64, f64)> {
        check_full(&self.state, point)?;
        let reduced = self.reduced(point.partition())?;
        let tr = reduced.trace();
        let s = signal_of(&reduced, point, angles, phase)?;
        let clamp = |p: f64| p.clamp(0.0, 1.0);
        Ok((clamp(0.5 * (tr + s)), clamp(0.5 * (tr - s))))
    }

    /// Measure one point and return only its signal estimate; the same
    /// random draws as [`Self::measure`].
    pub fn measure_signal<R: Rng + ?Sized>(
        &self,
        sample: &SampledPoint,
        config: &ProtocolConfig,
        rng: &mut R,
    ) -> Result<f64> {
        let probs = self.probabilities(&sample.point, &config.angles, sample.phase)?;
        Ok(signal_from_probabilities(probs, config, rng))
    }

    /// Measure one sampled point under `config`, drawing from `rng`.
    pub fn measure<R: Rng + ?Sized>(
        &self,
        sample: &SampledPoint,
        operator: Option<&str>,
        config: &ProtocolConfig,
        rng: &mut R,
    ) -> Result<ShotBatch> {
        let (p_plus, p_minus) = self.probabilities(&sample.point, &config.angles, sample.phase)?;
        let flip = config.readout_flip;
        let mut batch = ShotBatch {
            operator: operator.map(str::to_owned),
            point: sample.point.clone(),
            phase: sample.phase,
            weight: sample.weight,
            sign_mode: config.sign_mode,
            plus_shots: 0,
            plus_ground: 0,
            minus_shots: 0,
            minus_ground: 0,
            shots: Vec::new(),
        };
        let mut shoot = |branch: i8, rng: &mut R| {
            let p = if branch > 0 { p_plus } else { p_minus };
            let mut ground = rng.random::<f64>() < p;
            if flip > 0.0 && rng.random::<f64>() < flip {
                ground = !ground;
            }
            if branch > 0 {
                batch.plus_shots += 1;
                batch.plus_ground += ground as usize;
            } else {
                batch.minus_shots += 1;
                batch.minus_ground += ground as usize;
            }
            if config.record_shots {
                batch.shots.push(Shot { branch, ground });
            }
        };
        match config.sign_mode {
            SignMode::PairedPhases => {
                for _ in 0..config.repetitions {
                    shoot(1, rng);
                }
                for _ in 0..config.repetitions {
                    shoot(-1, rng);
                }
            }
            SignMode::RandomSign => {
                for _ in 0..config.repetitions {
                    let branch = if rng.random::<bool>() { 1 } else { -1 };
                    shoot(branch, rng);
                }
            }
        }
        Ok(batch)
    }
}

/// One batch drawn from known `(P_g(φ), P_g(φ + π))`; returns the signal.
/// Consumes randomness exactly as [`MeasurementBackend::measure`].
pub fn signal_from_probabilities<R: Rng + ?Sized>(
    probs: (f64, f64),
    config: &ProtocolConfig,
    rng: &mut R,
) -> f64 {
    let flip = config.readout_flip;
    let shoot = |p: f64, rng: &mut R| -> bool {
        let mut ground = rng.random::<f64>() < p;
        if flip > 0.0 && rng.random::<f64>() < flip {
            ground = !ground;
        }
        ground
    };
    let r = config.repetitions;
    match config.sign_mode {
        SignMode::PairedPhases => {
            let plus = (0..r).filter(|_| shoot(probs.0, rng)).count();
            let minus = (0..r).filter(|_| shoot(probs.1, rng)).count();
            (plus as f64 - minus as f64) / r as f64
        }
        SignMode::RandomSign => {
            let mut acc = 0i64;
            for _ in 0..r {
                let plus = rng.random::<bool>();
                let a = if shoot(if plus { probs.0 } else { probs.1 }, rng) {
                    1
                } else {
                    -1
                };
                acc += if plus { a } else { -a };
            }
            acc as f64 / r as f64
        }
    }
}

/// Measure `sample` on `state` with randomness from `(config.seed, key)`.
pub fn run_batch(
    state: &DensityMatrix,
    operator: Option<&str>,
    sample: &SampledPoint,
    config: &ProtocolConfig,
    key: u64,
) -> Result<ShotBatch> {
    config.validate()?;
    let backend = MeasurementBackend::new(state.clone());
    let mut rng = substream(config.seed, &[0xE7, key]);
    backend.measure(sample, operator, config, &mut rng)
}

/// Estimate of `Re[e^{iφ} W̃_{ρ_S̄}(α_S̄, −θ_S̄)]` from one batch.
pub fn batch_signal(batch: &ShotBatch) -> Result<f64> {
    match batch.sign_mode {
        SignMode::PairedPhases => {
            if batch.plus_shots == 0 || batch.minus_shots == 0 {
                return Err(Error::Empty(
                    "paired-phase batch needs shots on both branches",
                ));
            }
            Ok(batch.plus_ground as f64 / batch.plus_shots as f64
                - batch.minus_ground as f64 / batch.minus_shots as f64)
        }
        SignMode::RandomSign => {
            let n = batch.total_shots();
            if n == 0 {
                return Err(Error::Empty("batch has no shots"));
            }
            // s·A summed: A = +1 on ground, −1 otherwise.
            let plus = 2 * batch.plus_ground as i64 - batch.plus_shots as i64;
            let minus = 2 * batch.minus_ground as i64 - batch.minus_shots as i64;
            Ok((plus - minus) as f64 / n as f64)
        }
    }
}
