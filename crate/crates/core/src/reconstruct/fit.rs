use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{DensityMatrix, OccupationVector};
use crate::Complex;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseFit {
    pub phases: Vec<f64>,
    pub fidelity: f64,
    /// The objective varied by less than 1e-9 over the coarse grid.
    pub flat: bool,
}

/// Single-excitation block `ρ_jk = ⟨1_j|ρ|1_k⟩`.
fn single_block(matrix: &DensityMatrix) -> Result<Vec<Vec<Complex>>> {
    let basis = matrix.basis();
    let m = basis.modes();
    if m < 2 || basis.cutoff() < 1 {
        return Err(Error::Precondition(
            "phase fitting needs at least two modes and cutoff >= 1".into(),
        ));
    }
    let idx: Vec<usize> = (0..m)
        .map(|j| {
            basis
                .index_of(&OccupationVector::single(m, j))
                .expect("single excitation in basis")
        })
        .collect();
    Ok(idx
        .iter()
        .map(|&a| idx.iter().map(|&b| matrix.entries()[(a, b)]).collect())
        .collect())
}

fn block_fidelity(block: &[Vec<Complex>], phases: &[f64]) -> f64 {
    let m = block.len();
    let c: Vec<Complex> = (0..m)
        .map(|j| {
            if j == 0 {
                Complex::new(1.0, 0.0)
            } else {
                Complex::from_polar(1.0, phases[j - 1])
            }
        })
        .collect();
    let mut acc = Complex::new(0.0, 0.0);
    for j in 0..m {
        for k in 0..m {
            acc += c[j].conj() * block[j][k] * c[k];
        }
    }
    acc.re / m as f64
}

/// `⟨W(φ)|ρ|W(φ)⟩` for the W state with the given phases.
pub fn w_fidelity(matrix: &DensityMatrix, phases: &[f64]) -> Result<f64> {
    let block = single_block(matrix)?;
    if phases.len() + 1 != block.len() {
        return Err(Error::Precondition(format!(
            "{} phases for {} modes",
            phases.len(),
            block.len()
        )));
    }
    Ok(block_fidelity(&block, phases))
}

fn grid_search<F: Fn(&[f64]) -> f64>(dims: usize, axis: &[f64], f: F) -> (Vec<f64>, f64, f64) {
    let n = axis.len();
    let total = n.pow(dims as u32);
    let mut best = (vec![0.0; dims], f64::NEG_INFINITY);
    let mut worst = f64::INFINITY;
    let mut p = vec![0.0; dims];
    for code in 0..total {
        let mut c = code;
        for v in p.iter_mut() {
            *v = axis[c % n];
            c /= n;
        }
        let v = f(&p);
        worst = worst.min(v);
        if v > best.1 {
            best = (p.clone(), v);
        }
    }
    (best.0, best.1, worst)
}

/// Phases `φ_j ∈ [−π, π)` maximizing the fidelity of `matrix` with the
/// W state: a `grid`-point sweep per axis, then a sweep at ten times finer
/// spacing over the neighbouring cells of the best point.
pub fn fit_phases(matrix: &DensityMatrix, grid: usize) -> Result<PhaseFit> {
    let block = single_block(matrix)?;
    let dims = block.len() - 1;
    let grid = grid.max(1);
    let h = TAU / grid as f64;
    let coarse: Vec<f64> = (0..grid)
        .map(|i| -std::f64::consts::PI + i as f64 * h)
        .collect();
    let (best, best_value, worst) = grid_search(dims, &coarse, |p| block_fidelity(&block, p));
    let flat = best_value - worst < 1e-9;
    let fine: Vec<f64> = (-10..=10).map(|i| i as f64 * h / 10.0).collect();
    let (offset, value, _) = grid_search(dims, &fine, |d| {
        let p: Vec<f64> = best.iter().zip(d).map(|(b, o)| b + o).collect();
        block_fidelity(&block, &p)
    });
    let phases = best
        .iter()
        .zip(&offset)
        .map(|(b, o)| (b + o + std::f64::consts::PI).rem_euclid(TAU) - std::f64::consts::PI)
        .collect();
    Ok(PhaseFit {
        phases,
        fidelity: value.max(best_value),
        flat,
    })
}

/// Coefficients of `d = a x^b` fitted by least squares in log-log space.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLaw {
    pub a: f64,
    pub b: f64,
    /// Standard error of `ln a`.
    pub ln_a_stderr: f64,
    pub b_stderr: f64,
}

pub fn fit_power_law(series: &[(f64, f64)]) -> Result<PowerLaw> {
    if series.len() < 4 {
        return Err(Error::Precondition(format!(
            "a power-law fit needs at least 4 points, got {}",
            series.len()
        )));
    }
    if let Some(p) = series.iter().find(|(x, d)| !(*x > 0.0) || !(*d > 0.0)) {
        return Err(Error::Precondition(format!(
            "non-positive point {p:?} in power-law data"
        )));
    }
    let n = series.len() as f64;
    let lx: Vec<f64> = series.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = series.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let b = sxy / sxx;
    let ln_a = my - b * mx;
    let rss: f64 = lx
        .iter()
        .zip(&ly)
        .map(|(x, y)| (y - ln_a - b * x).powi(2))
        .sum();
    let s2 = rss / (n - 2.0);
    let b_stderr = (s2 / sxx).sqrt();
    let ln_a_stderr = (s2 * (1.0 / n + mx * mx / sxx)).sqrt();
    Ok(PowerLaw {
        a: ln_a.exp(),
        b,
        ln_a_stderr,
        b_stderr,
    })
}
