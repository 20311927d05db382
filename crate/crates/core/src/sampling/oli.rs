use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, TAU};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::demesst::SampledPoint;
use super::rng::substream;
use crate::error::{Error, Result};
use crate::hilbert::{FockBasis, ModePartition};
use crate::special::laguerre;
use crate::wigner::{kernel_tables, DisplacementPoint, ParityAngles, DEFAULT_RADIUS_BOUND};
use crate::Complex;

/// Angles per ring in the candidate pool.
pub const RING_ANGLES: usize = 24;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OliOptions {
    pub pool_size: usize,
    /// Pairwise exchange attempts after the greedy phase.
    pub exchange_iterations: usize,
}

impl Default for OliOptions {
    fn default() -> Self {
        Self {
            pool_size: 2000,
            exchange_iterations: 3000,
        }
    }
}

/// An optimized displacement set and its measurement matrix.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OliSet {
    pub points: Vec<SampledPoint>,
    /// Row `k` maps element coordinates `Tr[ρ O_j]` to the expected signal
    /// at point `k`.
    pub matrix: DMatrix<f64>,
    pub condition: f64,
    pub greedy_condition: f64,
}

/// Expected-signal row `Re[e^{iφ} W̃_{O_j}(α, −θ)]` over the element
/// operators of `basis`, in [`crate::hilbert::element_operators`] order.
pub fn measurement_row(
    basis: &FockBasis,
    point: &DisplacementPoint,
    phase: f64,
    angles: &ParityAngles,
) -> Vec<f64> {
    let tables = kernel_tables(point, &angles.negated(), basis.max_occupation());
    let d = basis.dimension();
    // w[i][j] = W̃ of |s_i⟩⟨s_j| = Π_m ⟨s_j|X|s_i⟩.
    let mut w = vec![vec![Complex::new(0.0, 0.0); d]; d];
    for (i, row) in w.iter_mut().enumerate() {
        let si = basis.state(i).as_slice();
        for (j, v) in row.iter_mut().enumerate() {
            let sj = basis.state(j).as_slice();
            let mut x = Complex::new(1.0, 0.0);
            for (m, t) in tables.iter().enumerate() {
                x *= t[sj[m] as usize][si[m] as usize];
            }
            *v = x;
        }
    }
    let rot = Complex::from_polar(1.0, phase);
    let mut out = Vec::with_capacity(d * d);
    for (i, wi) in w.iter().enumerate() {
        out.push((rot * wi[i]).re);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let (a, b) = (w[i][j], w[j][i]);
            out.push((rot * (a + b) * FRAC_1_SQRT_2).re);
            out.push((rot * (a - b) * Complex::new(0.0, FRAC_1_SQRT_2)).re);
        }
    }
    out
}

/// Measurement matrix for a list of points.
pub fn measurement_matrix(
    basis: &FockBasis,
    points: &[SampledPoint],
    angles: &ParityAngles,
) -> DMatrix<f64> {
    let p = basis.dimension().pow(2);
    let rows: Vec<Vec<f64>> = points
        .iter()
        .map(|s| measurement_row(basis, &s.point, s.phase, angles))
        .collect();
    DMatrix::from_fn(points.len(), p, |k, j| rows[k][j])
}

/// `σ_max/σ_min` of `a`; infinite when rank deficient.
pub fn condition_number(a: &DMatrix<f64>) -> f64 {
    gram_condition(&(a.transpose() * a))
}

fn gram_condition(g: &DMatrix<f64>) -> f64 {
    let ev = g.clone().symmetric_eigenvalues();
    let max = ev.max();
    let min = ev.min();
    if min <= max * 1e-24 {
        f64::INFINITY
    } else {
        (max / min).sqrt()
    }
}

/// Radii `|α|` where the Wigner functions of Fock states `0..=cutoff` have
/// their ring extrema, for a mode with parity angle `theta`.
pub fn ring_radii(cutoff: usize, theta: f64) -> Vec<f64> {
    let scale = 2.0 * (theta / 2.0).sin().abs();
    let mut radii = vec![0.0];
    for n in 1..=cutoff {
        let f = |rho: f64| (-rho * rho / 2.0).exp() * laguerre::<f64>(n, 0, rho * rho);
        let upper = 2.0 * ((n + 1) as f64).sqrt() + 2.0;
        let steps = 4000;
        let h = upper / steps as f64;
        let deriv = |x: f64| f(x + 1e-6) - f(x - 1e-6);
        let mut prev = deriv(h);
        for i in 2..steps {
            let x = i as f64 * h;
            let cur = deriv(x);
            if prev.signum() != cur.signum() {
                let (mut lo, mut hi) = (x - h, x);
                for _ in 0..60 {
                    let mid = 0.5 * (lo + hi);
                    if deriv(mid).signum() == prev.signum() {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                radii.push(0.5 * (lo + hi));
            }
            prev = cur;
        }
    }
    let mut radii: Vec<f64> = radii
        .into_iter()
        .map(|r| r / scale)
        .filter(|&r| r <= DEFAULT_RADIUS_BOUND)
        .collect();
    radii.sort_by(f64::total_cmp);
    radii.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    radii
}

/// Candidate pool: each mode independently takes the origin or a ring, and
/// one of [`RING_ANGLES`] angles on it. Off parity (`θ ≠ π`) the measurement phase
/// is drawn from `{0, π/2}` so both quadratures of `W̃` are probed.
pub fn oli_pool(
    basis: &FockBasis,
    angles: &ParityAngles,
    pool_size: usize,
    seed: u64,
) -> Result<Vec<SampledPoint>> {
    let modes = basis.modes();
    if angles.len() != modes {
        return Err(Error::DimensionMismatch(format!(
            "{} angles for {modes} modes",
            angles.len()
        )));
    }
    let rings: Vec<Vec<f64>> = (0..modes)
        .map(|m| ring_radii(basis.max_occupation(), angles.get(m)))
        .collect();
    let parity = angles.is_parity();
    let mut rng = substream(seed, &[0x011, 0]);
    let mut pool = Vec::with_capacity(pool_size);
    for _ in 0..pool_size {
        let alphas = rings
            .iter()
            .map(|r| {
                // The origin fixes only the rotation-invariant part of a
                // mode's operator space, so it is drawn a third as often as
                // each ring.
                let rings_off = r.len() - 1;
                let pick =
                    if rings_off == 0 || rng.random::<f64>() * ((3 * rings_off + 1) as f64) < 1.0 {
                        0
                    } else {
                        rng.random_range(1..r.len())
                    };
                let radius = r[pick];
                let k = rng.random_range(0..RING_ANGLES);
                Complex::from_polar(radius, TAU * k as f64 / RING_ANGLES as f64)
            })
            .collect();
        let phase = if parity || rng.random::<bool>() {
            0.0
        } else {
            FRAC_PI_2
        };
        let point = DisplacementPoint::new(alphas, ModePartition::full(modes))?;
        pool.push(SampledPoint {
            point,
            phase,
            weight: 1.0,
        });
    }
    Ok(pool)
}

/// Choose `set_size` points from a pool by greedy rank growth (largest
/// residual against the span of the chosen rows), then greedy leverage
/// (largest `r^T G⁻¹ r`) up to `set_size`, then pairwise exchange between
/// chosen and unchosen candidates whenever it lowers the condition number.
pub fn oli_displacement_set(
    basis: &FockBasis,
    angles: &ParityAngles,
    set_size: usize,
    options: &OliOptions,
    seed: u64,
) -> Result<OliSet> {
    let p = basis.dimension().pow(2);
    if set_size < p {
        return Err(Error::Precondition(format!(
            "set size {set_size} is below the {p} real parameters"
        )));
    }
    if options.pool_size < set_size {
        return Err(Error::Precondition(format!(
            "pool of {} cannot supply {set_size} points",
            options.pool_size
        )));
    }
    let pool = oli_pool(basis, angles, options.pool_size, seed)?;
    let rows = measurement_matrix(basis, &pool, angles);
    let row = |k: usize| -> DVector<f64> { rows.row(k).transpose() };

    let mut chosen: Vec<usize> = Vec::with_capacity(set_size);
    let mut used = vec![false; pool.len()];
    let mut q: Vec<DVector<f64>> = Vec::with_capacity(p);
    let mut residual: Vec<DVector<f64>> = (0..pool.len()).map(row).collect();
    while q.len() < p {
        let (best, norm) = residual
            .iter()
            .enumerate()
            .filter(|(k, _)| !used[*k])
            .map(|(k, r)| (k, r.norm()))
            .fold(
                (usize::MAX, 0.0),
                |acc, x| if x.1 > acc.1 { x } else { acc },
            );
        if best == usize::MAX || norm < 1e-9 {
            return Err(Error::PoolExhausted {
                rank: q.len(),
                needed: p,
            });
        }
        let e = &residual[best] / norm;
        for r in residual.iter_mut() {
            let c = r.dot(&e);
            r.axpy(-c, &e, 1.0);
        }
        q.push(e);
        used[best] = true;
        chosen.push(best);
    }

    let mut gram = DMatrix::<f64>::zeros(p, p);
    for &k in &chosen {
        let r = row(k);
        gram.ger(1.0, &r, &r, 1.0);
    }
    // Leverages r_kᵀ G⁻¹ r_k, kept current by Sherman–Morrison updates.
    let mut inv = gram.clone().try_inverse().ok_or(Error::RankDeficient {
        rank: q.len(),
        needed: p,
    })?;
    let mut leverage: Vec<f64> = (0..pool.len())
        .map(|k| {
            let r = row(k);
            r.dot(&(&inv * &r))
        })
        .collect();
    while chosen.len() < set_size {
        let best = (0..pool.len())
            .filter(|&k| !used[k])
            .fold((usize::MAX, f64::NEG_INFINITY), |acc, k| {
                if leverage[k] > acc.1 {
                    (k, leverage[k])
                } else {
                    acc
                }
            })
            .0;
        let r = row(best);
        let u = &inv * &r;
        let denom = 1.0 + r.dot(&u);
        let proj = &rows * &u;
        for (l, c) in leverage.iter_mut().zip(proj.iter()) {
            *l -= c * c / denom;
        }
        inv.ger(-1.0 / denom, &u, &u, 1.0);
        gram.ger(1.0, &r, &r, 1.0);
        used[best] = true;
        chosen.push(best);
    }
    let greedy_condition = gram_condition(&gram);

    let mut cond = greedy_condition;
    let mut rng = substream(seed, &[0x011, 1]);
    let mut free: Vec<usize> = (0..pool.len()).filter(|&k| !used[k]).collect();
    if !free.is_empty() {
        for _ in 0..options.exchange_iterations {
            let i = rng.random_range(0..chosen.len());
            let j = rng.random_range(0..free.len());
            let (out_row, in_row) = (row(chosen[i]), row(free[j]));
            let mut trial = gram.clone();
            trial.ger(-1.0, &out_row, &out_row, 1.0);
            trial.ger(1.0, &in_row, &in_row, 1.0);
            let c = gram_condition(&trial);
            if c < cond {
                cond = c;
                gram = trial;
                std::mem::swap(&mut chosen[i], &mut free[j]);
            }
        }
    }
    let points: Vec<SampledPoint> = chosen.iter().map(|&k| pool[k].clone()).collect();
    let matrix = DMatrix::from_fn(points.len(), p, |r, c| rows[(chosen[r], c)]);
    let condition = condition_number(&matrix);
    Ok(OliSet {
        points,
        matrix,
        condition,
        greedy_condition,
    })
}
