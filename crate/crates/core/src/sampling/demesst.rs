use std::f64::consts::{FRAC_PI_2, TAU};
use std::sync::Arc;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::radial::RadialTable;
use super::rng::{substream, CHUNK};
use crate::error::{Error, Result};
use crate::hilbert::{ElementOperator, OperatorKind};
use crate::wigner::{
    estimator_weight, ketbra_wigner, DisplacementPoint, ParityAngles, DEFAULT_RADIUS_BOUND,
};
use crate::Complex;

/// A displacement with the measurement phase `φ` to apply there and the
/// weight its signal is multiplied by (`C_S̄ Z` for element estimates, the
/// target magnitude `|W̃_σ|` for fidelity estimates, 1 for OLI).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledPoint {
    pub point: DisplacementPoint,
    pub phase: f64,
    pub weight: f64,
}

/// Draws displacements for one element operator from `|W̃_K|/Z_K`, where
/// `K = |n′⟩⟨n|` is the ket-bra whose expectation is `⟨n|ρ|n′⟩`.
///
/// `|W̃_K|` factorizes over the active modes and each factor depends only
/// on `|α_m|`, so every mode gets a uniform angle and an independent radius
/// from the tabulated radial inverse CDF.
#[derive(Debug, Clone)]
pub struct DemesstSampler {
    op: ElementOperator,
    angles: ParityAngles,
    tables: Vec<Arc<RadialTable>>,
    scales: Vec<f64>,
    weight: f64,
    bound: f64,
}

impl DemesstSampler {
    pub fn new(op: &ElementOperator, angles: &ParityAngles) -> Result<Self> {
        let weight = estimator_weight(op, angles)?;
        let z = weight / angles.normalization_over(op.support().active());
        if !(z >= 1e-12) {
            return Err(Error::DegenerateOperator(z));
        }
        let mut tables = Vec::new();
        let mut scales = Vec::new();
        for &m in op.support().active() {
            tables.push(RadialTable::cached(
                op.row().get(m) as usize,
                op.col().get(m) as usize,
            )?);
            // |1 − e^{iθ}| maps |α| to the effective displacement |γ|.
            scales.push(2.0 * (angles.get(m) / 2.0).sin().abs());
        }
        Ok(Self {
            op: op.clone(),
            angles: angles.clone(),
            tables,
            scales,
            weight,
            bound: DEFAULT_RADIUS_BOUND,
        })
    }

    pub fn operator(&self) -> &ElementOperator {
        &self.op
    }

    /// `C_S̄ Z_{O_S̄}`.
    pub fn weight(&self) -> f64 {
        self.weight
    }

    /// Measurement phase at `point`: `e^{iφ} = W̃_K/|W̃_K|`, rotated by
    /// `−π/2` for the imaginary kind so the signal tracks `Im⟨n|ρ|n′⟩`.
    pub fn phase_at(&self, point: &DisplacementPoint) -> Result<f64> {
        let w = ketbra_wigner(self.op.col(), self.op.row(), point, &self.angles)?;
        let psi = if w.norm() > 0.0 { w.arg() } else { 0.0 };
        Ok(match self.op.kind() {
            OperatorKind::ImagOffDiag => psi - FRAC_PI_2,
            _ => psi,
        })
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<SampledPoint> {
        let mut alphas = Vec::with_capacity(self.tables.len());
        for (t, &s) in self.tables.iter().zip(&self.scales) {
            let r = loop {
                let r = t.invert(rng.random::<f64>()) / s;
                if r <= self.bound {
                    break r;
                }
            };
            alphas.push(Complex::from_polar(r, TAU * rng.random::<f64>()));
        }
        let point = DisplacementPoint::new(alphas, self.op.support().clone())?;
        let phase = self.phase_at(&point)?;
        Ok(SampledPoint {
            point,
            phase,
            weight: self.weight,
        })
    }

    /// `count` points from the stream `(seed, key)`, generated in fixed
    /// chunks in parallel; a shorter draw is a prefix of a longer one.
    pub fn sample_many(&self, count: usize, seed: u64, key: u64) -> Result<Vec<SampledPoint>> {
        let chunks = count.div_ceil(CHUNK);
        let parts: Vec<Result<Vec<SampledPoint>>> = (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = substream(seed, &[key, c as u64]);
                let n = CHUNK.min(count - c * CHUNK);
                (0..n).map(|_| self.sample(&mut rng)).collect()
            })
            .collect();
        let mut out = Vec::with_capacity(count);
        for p in parts {
            out.extend(p?);
        }
        Ok(out)
    }
}

/// Draw `count` DEMESST displacements for `op`.
pub fn demesst_sample(
    op: &ElementOperator,
    angles: &ParityAngles,
    count: usize,
    seed: u64,
) -> Result<Vec<SampledPoint>> {
    DemesstSampler::new(op, angles)?.sample_many(count, seed, 0)
}
