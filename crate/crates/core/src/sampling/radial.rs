use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::quadrature::integrate;
use crate::special::displacement_magnitude;
use crate::wigner::{gamma_tail_radius, magnitude_kinks};

/// Grid points of each tabulated radial CDF.
pub const GRID: usize = 4096;

/// Inverse CDF of the radial density `ρ |⟨b|D(ρ)|a⟩|` on `[0, ρ_max]`,
/// tabulated with piecewise-linear interpolation.
#[derive(Debug)]
pub struct RadialTable {
    radii: Vec<f64>,
    cdf: Vec<f64>,
    mass: f64,
}

impl RadialTable {
    pub fn build(b: usize, a: usize) -> Result<Self> {
        let (s, l) = (b.min(a), b.max(a));
        let upper = 2.0 * gamma_tail_radius(s, l);
        let f = |r: f64| r * displacement_magnitude(s, l, r);
        let h = upper / (GRID - 1) as f64;
        let radii: Vec<f64> = (0..GRID).map(|i| i as f64 * h).collect();
        let kinks = magnitude_kinks(s, l);
        let mut cdf = Vec::with_capacity(GRID);
        cdf.push(0.0);
        let mut acc = 0.0;
        for w in radii.windows(2) {
            let mut pts = vec![w[0]];
            pts.extend(kinks.iter().copied().filter(|&k| k > w[0] && k < w[1]));
            pts.push(w[1]);
            for p in pts.windows(2) {
                acc += integrate(f, p[0], p[1], 1e-10, 1e-300)?;
            }
            cdf.push(acc);
        }
        if !(acc > 1e-12) {
            return Err(Error::DegenerateOperator(acc));
        }
        for c in &mut cdf {
            *c /= acc;
        }
        Ok(Self {
            radii,
            cdf,
            mass: acc,
        })
    }

    /// Shared table for the `(b, a)` factor.
    pub fn cached(b: usize, a: usize) -> Result<Arc<Self>> {
        static CACHE: OnceLock<Mutex<HashMap<(usize, usize), Arc<RadialTable>>>> = OnceLock::new();
        let key = (b.min(a), b.max(a));
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(t) = cache.lock().expect("cache lock").get(&key) {
            return Ok(t.clone());
        }
        let t = Arc::new(Self::build(key.0, key.1)?);
        cache.lock().expect("cache lock").insert(key, t.clone());
        Ok(t)
    }

    /// `∫_0^{ρ_max} ρ |⟨b|D(ρ)|a⟩| dρ`.
    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn cdf(&self, rho: f64) -> f64 {
        if rho <= 0.0 {
            return 0.0;
        }
        let last = *self.radii.last().expect("grid");
        if rho >= last {
            return 1.0;
        }
        let h = self.radii[1];
        let i = ((rho / h) as usize).min(GRID - 2);
        let t = (rho - self.radii[i]) / h;
        self.cdf[i] + t * (self.cdf[i + 1] - self.cdf[i])
    }

    /// Radius with `cdf(ρ) = u` for `u ∈ [0, 1)`.
    pub fn invert(&self, u: f64) -> f64 {
        let i = self.cdf.partition_point(|&c| c <= u).clamp(1, GRID - 1);
        let (c0, c1) = (self.cdf[i - 1], self.cdf[i]);
        let t = if c1 > c0 { (u - c0) / (c1 - c0) } else { 0.0 };
        self.radii[i - 1] + t * (self.radii[i] - self.radii[i - 1])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vacuum_table_matches_rayleigh() {
        let t = RadialTable::build(0, 0).unwrap();
        assert!((t.mass() - 1.0).abs() < 1e-10);
        for rho in [0.2, 0.7, 1.3, 2.5] {
            let exact = 1.0 - (-rho * rho / 2.0f64).exp();
            assert!((t.cdf(rho) - exact).abs() < 1e-5, "rho={rho}");
        }
        for u in [0.01, 0.3, 0.5, 0.9, 0.999] {
            let exact = (-2.0 * (1.0f64 - u).ln()).sqrt();
            assert!((t.invert(u) - exact).abs() < 1e-3, "u={u}");
        }
    }

    #[test]
    fn kinked_table_is_monotone() {
        let t = RadialTable::build(2, 3).unwrap();
        assert!(t.cdf.windows(2).all(|w| w[1] >= w[0]));
        assert!((t.cdf[GRID - 1] - 1.0).abs() < 1e-15);
    }
}
