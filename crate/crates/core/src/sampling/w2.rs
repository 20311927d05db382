use std::f64::consts::TAU;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::demesst::SampledPoint;
use super::rng::{substream, CHUNK};
use crate::error::{Error, Result};
use crate::hilbert::DensityMatrix;
use crate::wigner::{
    generalized_wigner_state, DisplacementPoint, ParityAngles, DEFAULT_RADIUS_BOUND,
};
use crate::Complex;

/// Smallest tolerated acceptance rate.
pub const ACCEPTANCE_FLOOR: f64 = 1e-4;
/// Proposals drawn before the acceptance rate is judged.
const JUDGE_AFTER: usize = 25 * CHUNK;
const PILOT: usize = 16 * CHUNK;
const ENVELOPE_MARGIN: f64 = 1.25;

/// Settings of the rejection sampler for `p ∝ |W̃_σ|²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct W2Options {
    /// Proposal radius per mode: `|β_m|` is uniform on `[0, radius]`.
    pub radius: f64,
    /// Absolute cutoff on `|W̃_σ(β)|² Π|β_m|`. `None` uses `relative_cutoff`
    /// times the pilot peak.
    pub cutoff: Option<f64>,
    pub relative_cutoff: f64,
}

impl Default for W2Options {
    fn default() -> Self {
        Self {
            radius: 3.0,
            cutoff: None,
            relative_cutoff: 1e-3,
        }
    }
}

struct Proposal {
    point: DisplacementPoint,
    wigner: Complex,
    weight: f64,
    u: f64,
}

fn propose<R: Rng + ?Sized>(
    target: &DensityMatrix,
    angles: &ParityAngles,
    radius: f64,
    rng: &mut R,
) -> Result<Proposal> {
    let modes = target.basis().modes();
    let mut alphas = Vec::with_capacity(modes);
    let mut jac = 1.0;
    for _ in 0..modes {
        let r = radius * rng.random::<f64>();
        jac *= r;
        alphas.push(Complex::from_polar(r, TAU * rng.random::<f64>()));
    }
    let point = DisplacementPoint::with_bound(
        alphas,
        crate::hilbert::ModePartition::full(modes),
        radius.max(DEFAULT_RADIUS_BOUND),
    )?;
    let wigner = generalized_wigner_state(target, &point, angles)?;
    Ok(Proposal {
        point,
        wigner,
        weight: wigner.norm_sqr() * jac,
        u: rng.random(),
    })
}

fn chunk(
    target: &DensityMatrix,
    angles: &ParityAngles,
    radius: f64,
    seed: u64,
    c: usize,
) -> Result<Vec<Proposal>> {
    let mut rng = substream(seed, &[0x5732, c as u64]);
    (0..CHUNK)
        .map(|_| propose(target, angles, radius, &mut rng))
        .collect()
}

/// Rejection-sample `count` displacements with density proportional to
/// `|W̃_σ(α, θ)|²` on `d^{2M}α`, keeping only points whose proposal weight
/// `|W̃_σ|² Π|β_m|` exceeds the cutoff. Each point carries `φ = arg W̃_σ`
/// and `weight = |W̃_σ|`, the estimator's denominator.
///
/// The envelope is 1.25 times the pilot maximum; if any later proposal
/// exceeds it, the envelope is raised and sampling restarts from the first
/// chunk, so the output is exact and depends only on the seed.
pub fn w2_sample(
    target: &DensityMatrix,
    angles: &ParityAngles,
    count: usize,
    options: &W2Options,
    seed: u64,
) -> Result<Vec<SampledPoint>> {
    if target.basis().modes() != angles.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode target with {} angles",
            target.basis().modes(),
            angles.len()
        )));
    }
    let purity = target.overlap(target)?;
    if (purity - 1.0).abs() > 1e-8 {
        return Err(Error::Precondition(format!(
            "target purity {purity} is not 1"
        )));
    }
    let batch = rayon::current_num_threads().max(1);
    let pilot_peak = (0..PILOT / CHUNK)
        .into_par_iter()
        .map(|c| {
            chunk(target, angles, options.radius, seed ^ 0xA5A5, c)
                .map(|v| v.iter().map(|p| p.weight).fold(0.0, f64::max))
        })
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let cutoff = options
        .cutoff
        .unwrap_or(options.relative_cutoff * pilot_peak);
    let mut envelope = ENVELOPE_MARGIN * pilot_peak;
    'restart: loop {
        let mut out = Vec::with_capacity(count);
        let mut proposed = 0usize;
        let mut next = 0usize;
        while out.len() < count {
            let chunks: Vec<Vec<Proposal>> = (next..next + batch)
                .into_par_iter()
                .map(|c| chunk(target, angles, options.radius, seed, c))
                .collect::<Result<_>>()?;
            next += batch;
            for props in chunks {
                if out.len() >= count {
                    break;
                }
                let peak = props.iter().map(|p| p.weight).fold(0.0, f64::max);
                if peak > envelope {
                    envelope = ENVELOPE_MARGIN * peak;
                    continue 'restart;
                }
                for p in props {
                    proposed += 1;
                    if p.weight > cutoff && p.u * envelope < p.weight && out.len() < count {
                        let mag = p.wigner.norm();
                        out.push(SampledPoint {
                            point: p.point,
                            phase: p.wigner.arg(),
                            weight: mag,
                        });
                    }
                }
                if proposed >= JUDGE_AFTER && out.len() < count {
                    let rate = out.len() as f64 / proposed as f64;
                    if rate < ACCEPTANCE_FLOOR {
                        return Err(Error::Acceptance {
                            rate,
                            floor: ACCEPTANCE_FLOOR,
                        });
                    }
                }
            }
        }
        return Ok(out);
    }
}
