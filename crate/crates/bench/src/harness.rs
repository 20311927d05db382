//! Seeded end-to-end runs shared by the commands.
//!
//! Every random draw comes from a substream keyed by `(seed, purpose,
//! group, index)`, and budgets are spent in a fixed order, so a smaller
//! budget always sees a prefix of the data a larger one sees.

use std::sync::Arc;

use rayon::prelude::*;
use wigtomo::experiment::signal_from_probabilities;
use wigtomo::hilbert::assemble_from_slice;
use wigtomo::reconstruct::{clip_to_physical, OliSystem, PgdOptions, ReconstructionReport};
use wigtomo::sampling::rng::{derive_seed, substream};
use wigtomo::sampling::{DemesstSampler, OliOptions, OliSet};
use wigtomo::{
    element_operators, enumerate_basis, ideal_w_state, oli_displacement_set, perturbed_state,
    DensityMatrix, ElementOperator, FockBasis, MeasurementBackend, ProtocolConfig, Strategy,
};

use crate::config::RunConfig;
use crate::error::{BenchError, Result};

const DEMESST_POINTS: u64 = 0xD0;
const DEMESST_SHOTS: u64 = 0xD1;
const OLI_SET: u64 = 0x01;
const OLI_SHOTS: u64 = 0x02;

pub fn parse_strategy(s: &str) -> Result<Strategy> {
    match s.to_ascii_uppercase().as_str() {
        "DEMESST" => Ok(Strategy::Demesst),
        "OLI" => Ok(Strategy::Oli),
        "W2" => Ok(Strategy::W2),
        _ => Err(BenchError::Config(format!("unknown strategy {s:?}"))),
    }
}

/// A prepared state, its ideal reference and the measurement settings.
#[derive(Debug)]
pub struct Scenario {
    pub basis: Arc<FockBasis>,
    pub ideal: DensityMatrix,
    pub backend: MeasurementBackend,
    pub protocol: ProtocolConfig,
}

impl Scenario {
    /// The configured target on `modes` modes. Phases apply only when
    /// `modes` matches the configured mode count.
    pub fn new(config: &RunConfig, modes: usize, seed: u64) -> Result<Self> {
        let t = &config.target;
        let phases = if modes == t.modes {
            config.phases()
        } else {
            vec![0.0; modes - 1]
        };
        let ideal = ideal_w_state(modes, &phases)?;
        let prep_cutoff = if t.leak_weight > 0.0 {
            t.cutoff.max(2)
        } else {
            t.cutoff
        };
        let prepared = perturbed_state(
            &ideal.with_cutoff(prep_cutoff)?,
            t.leak_weight,
            t.dephase_weight,
            t.perturb_seed,
        )?;
        let basis = enumerate_basis(modes, t.cutoff)?;
        let ideal = ideal.with_cutoff(t.cutoff)?;
        Ok(Self {
            basis,
            ideal,
            backend: MeasurementBackend::new(prepared),
            protocol: config.protocol(modes, seed)?,
        })
    }

    pub fn from_state(
        prepared: DensityMatrix,
        basis: Arc<FockBasis>,
        ideal: DensityMatrix,
        protocol: ProtocolConfig,
    ) -> Self {
        Self {
            basis,
            ideal,
            backend: MeasurementBackend::new(prepared),
            protocol,
        }
    }

    pub fn shots_per_point(&self) -> usize {
        self.protocol.shots_per_batch()
    }

    pub fn modes(&self) -> usize {
        self.basis.modes()
    }
}

/// Number of points each of `parts` receives from `total` points, earlier
/// parts taking the remainder.
pub fn split(total: usize, parts: usize) -> impl Iterator<Item = usize> {
    (0..parts).map(move |k| total / parts + usize::from(k < total % parts))
}

/// DEMESST element estimates at each shot checkpoint for operators `ops`
/// (expressed on the scenario's modes). Points are split evenly over the
/// operators. Returns `None` for checkpoints too small to give every
/// operator a point.
pub fn demesst_estimates(
    scn: &Scenario,
    ops: &[ElementOperator],
    seed: u64,
    group: u64,
    checkpoints: &[usize],
) -> Result<Vec<Option<Vec<f64>>>> {
    let spp = scn.shots_per_point();
    let counts: Vec<Vec<usize>> = checkpoints
        .iter()
        .map(|&x| split(x / spp, ops.len()).collect())
        .collect();
    demesst_with_counts(scn, ops, seed, group, &counts)
}

/// As [`demesst_estimates`] with explicit point counts: `counts[c][k]`
/// points for operator `k` at checkpoint `c`.
pub fn demesst_with_counts(
    scn: &Scenario,
    ops: &[ElementOperator],
    seed: u64,
    group: u64,
    counts: &[Vec<usize>],
) -> Result<Vec<Option<Vec<f64>>>> {
    let point_seed = derive_seed(seed, &[DEMESST_POINTS, group]);
    let per_op: Vec<Vec<f64>> = ops
        .par_iter()
        .enumerate()
        .map(|(k, op)| -> Result<Vec<f64>> {
            let sampler = DemesstSampler::new(op, &scn.protocol.angles)?;
            let needed = counts.iter().map(|c| c[k]).max().unwrap_or(0);
            let points = sampler.sample_many(needed, point_seed, k as u64)?;
            let mut rng = substream(seed, &[DEMESST_SHOTS, group, k as u64]);
            let mut prefix = Vec::with_capacity(needed + 1);
            let mut acc = 0.0;
            prefix.push(0.0);
            for p in &points {
                acc += p.weight * scn.backend.measure_signal(p, &scn.protocol, &mut rng)?;
                prefix.push(acc);
            }
            Ok(counts
                .iter()
                .map(|c| {
                    if c[k] == 0 {
                        f64::NAN
                    } else {
                        prefix[c[k]] / c[k] as f64
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..counts.len())
        .map(|c| {
            let v: Vec<f64> = per_op.iter().map(|e| e[c]).collect();
            v.iter().all(|x| x.is_finite()).then_some(v)
        })
        .collect())
}

/// Raw (assembled) and physical (eigenvalue-clipped) DEMESST states.
pub fn demesst_states(
    basis: &Arc<FockBasis>,
    values: &[f64],
) -> Result<(DensityMatrix, DensityMatrix)> {
    let raw = assemble_from_slice(basis, values)?;
    let physical = clip_to_physical(&raw);
    Ok((raw, physical))
}

/// A fixed OLI displacement set on the inversion basis, with its factored
/// measurement matrix and the ideal target on that basis.
#[derive(Debug, Clone)]
pub struct OliDesign {
    pub basis: Arc<FockBasis>,
    pub ideal: DensityMatrix,
    pub set: OliSet,
    pub system: OliSystem,
}

impl OliDesign {
    pub fn new(scn: &Scenario, config: &RunConfig, seed: u64) -> Result<Self> {
        let basis = match config.oli.mode_cap {
            Some(cap) => FockBasis::per_mode(scn.modes(), cap)?,
            None => scn.basis.clone(),
        };
        Self::on_basis(scn, config, basis, seed)
    }

    pub fn on_basis(
        scn: &Scenario,
        config: &RunConfig,
        basis: Arc<FockBasis>,
        seed: u64,
    ) -> Result<Self> {
        let ideal = scn.ideal.restrict_to(basis.clone())?;
        let p = basis.dimension().pow(2);
        let size = ((config.oli.set_factor * p as f64).ceil() as usize).max(p);
        let options = OliOptions {
            pool_size: config.oli.pool_size.max(2 * size),
            exchange_iterations: config.oli.exchange_iterations,
        };
        let set = oli_displacement_set(
            &basis,
            &scn.protocol.angles,
            size,
            &options,
            derive_seed(seed, &[OLI_SET]),
        )?;
        let system = OliSystem::new(&set.matrix, &basis)?;
        Ok(Self {
            basis,
            ideal,
            set,
            system,
        })
    }

    pub fn size(&self) -> usize {
        self.set.points.len()
    }
}

/// Mean OLI signal per set point at each checkpoint; the set is visited
/// cyclically. `None` where some point has no visit.
pub fn oli_signals(
    scn: &Scenario,
    design: &OliDesign,
    seed: u64,
    group: u64,
    checkpoints: &[usize],
) -> Result<Vec<Option<Vec<f64>>>> {
    let spp = scn.shots_per_point();
    let k = design.size();
    let counts: Vec<Vec<usize>> = checkpoints
        .iter()
        .map(|&x| split(x / spp, k).collect())
        .collect();
    let per_point: Vec<Vec<f64>> = design
        .set
        .points
        .par_iter()
        .enumerate()
        .map(|(j, p)| -> Result<Vec<f64>> {
            let probs = scn
                .backend
                .probabilities(&p.point, &scn.protocol.angles, p.phase)?;
            let needed = counts.iter().map(|c| c[j]).max().unwrap_or(0);
            let mut rng = substream(seed, &[OLI_SHOTS, group, j as u64]);
            let mut prefix = Vec::with_capacity(needed + 1);
            let mut acc = 0.0;
            prefix.push(0.0);
            for _ in 0..needed {
                acc += signal_from_probabilities(probs, &scn.protocol, &mut rng);
                prefix.push(acc);
            }
            Ok(counts
                .iter()
                .map(|c| {
                    if c[j] == 0 {
                        f64::NAN
                    } else {
                        prefix[c[j]] / c[j] as f64
                    }
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok((0..checkpoints.len())
        .map(|c| {
            let v: Vec<f64> = per_point.iter().map(|e| e[c]).collect();
            v.iter().all(|x| x.is_finite()).then_some(v)
        })
        .collect())
}

/// Least-squares (raw) and PGD (physical) OLI states.
pub fn oli_report(
    design: &OliDesign,
    signals: &[f64],
    shots: usize,
) -> Result<ReconstructionReport> {
    Ok(design
        .system
        .solve(signals, shots, &PgdOptions::default())?)
}

/// Physical-state fidelity to the ideal target after `shots` shots, or
/// `None` when the budget cannot cover the design.
pub fn fidelity_at(
    scn: &Scenario,
    strategy: Strategy,
    design: Option<&OliDesign>,
    seed: u64,
    shots: usize,
) -> Result<Option<f64>> {
    match strategy {
        Strategy::Demesst => {
            let ops = element_operators(&scn.basis);
            match demesst_estimates(scn, &ops, seed, 0, &[shots])?
                .pop()
                .flatten()
            {
                Some(v) => Ok(Some(demesst_states(&scn.basis, &v)?.1.overlap(&scn.ideal)?)),
                None => Ok(None),
            }
        }
        Strategy::Oli => {
            let design =
                design.ok_or_else(|| BenchError::Config("OLI run without a design".into()))?;
            match oli_signals(scn, design, seed, 0, &[shots])?.pop().flatten() {
                Some(y) => Ok(Some(
                    oli_report(design, &y, shots)?
                        .physical
                        .overlap(&design.ideal)?,
                )),
                None => Ok(None),
            }
        }
        Strategy::W2 => Err(BenchError::Config("W2 does not reconstruct a state".into())),
    }
}

pub fn mean_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

pub fn median(v: &[f64]) -> f64 {
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}
