use std::collections::HashMap;
use std::f64::consts::SQRT_2;
use std::sync::{Mutex, OnceLock};

use super::angles::ParityAngles;
use crate::error::{Error, Result};
use crate::hilbert::{ElementOperator, OperatorKind};
use crate::quadrature::integrate_pieces;
use crate::special::{displacement_magnitude, laguerre_roots};

/// `C = Π_m 2(1 − cos θ_m)/π` over all modes of `angles`.
pub fn normalization_c(angles: &ParityAngles) -> f64 {
    let all: Vec<usize> = (0..angles.len()).collect();
    angles.normalization_over(&all)
}

/// Radius in `γ`-space beyond which `ρ |⟨b|D(ρ)|a⟩|` is negligible.
pub(crate) fn gamma_tail_radius(b: usize, a: usize) -> f64 {
    10.0 + 2.0 * ((b.max(a) + 1) as f64).sqrt()
}

/// Interior zeros of `ρ ↦ |⟨b|D(ρ)|a⟩|`, where the magnitude has kinks.
pub(crate) fn magnitude_kinks(b: usize, a: usize) -> Vec<f64> {
    let (s, l) = (b.min(a), b.max(a));
    laguerre_roots(s, l - s)
        .into_iter()
        .map(f64::sqrt)
        .collect()
}

/// `C_m ∫ d²α |⟨b|X(α, θ_m)|a⟩|` for one mode.
///
/// Substituting `γ = α(1 − e^{iθ})` turns the magnitude into
/// `|⟨b|D(γ)|a⟩|` and cancels `C_m` against the Jacobian, so the value is
/// `2 ∫_0^∞ ρ |⟨b|D(ρ)|a⟩| dρ` independent of `θ`.
pub fn mode_cz(b: usize, a: usize) -> Result<f64> {
    static CACHE: OnceLock<Mutex<HashMap<(usize, usize), f64>>> = OnceLock::new();
    let key = (b.min(a), b.max(a));
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(v) = cache.lock().expect("cache lock").get(&key) {
        return Ok(*v);
    }
    let mut breaks = vec![0.0];
    breaks.extend(magnitude_kinks(b, a));
    let tail = gamma_tail_radius(b, a);
    breaks.push(tail);
    breaks.push(2.0 * tail);
    let v = 2.0
        * integrate_pieces(
            |r| r * displacement_magnitude(key.0, key.1, r),
            &breaks,
            1e-12,
            1e-300,
        )?;
    if !v.is_finite() {
        return Err(Error::Integration(format!(
            "mode normalization for ({b}, {a}) is {v}"
        )));
    }
    cache.lock().expect("cache lock").insert(key, v);
    Ok(v)
}

/// `∫ d^{2|S̄|}α |W̃_K|` over the operator's active modes for the ket-bra
/// `K = |col⟩⟨row|` that the estimator samples from.
pub fn ketbra_z(op: &ElementOperator, angles: &ParityAngles) -> Result<f64> {
    check(op, angles)?;
    let mut z = 1.0;
    for &m in op.support().active() {
        let c = angles.normalization_over(&[m]);
        z *= mode_cz(op.row().get(m) as usize, op.col().get(m) as usize)? / c;
    }
    Ok(z)
}

/// Normalization `Z_{O_S̄}` of the element operator's sampling density.
///
/// Diagonal operators are sampled from their own magnitude. The Hermitian
/// off-diagonal pairs are estimated through the ket-bra `|n′⟩⟨n|`, whose
/// magnitude factorizes across modes; the `√2` relating the ket-bra to
/// `O^R`/`O^I` is folded in, so that `C_S̄ Z` is the range of the
/// single-shot estimator.
pub fn z_norm(op: &ElementOperator, angles: &ParityAngles) -> Result<f64> {
    let z = ketbra_z(op, angles)?;
    Ok(match op.kind() {
        OperatorKind::Diagonal => z,
        OperatorKind::RealOffDiag | OperatorKind::ImagOffDiag => SQRT_2 * z,
    })
}

/// `C_S̄ Z_{O_S̄}`: the weight multiplying each measured signal.
pub fn estimator_weight(op: &ElementOperator, angles: &ParityAngles) -> Result<f64> {
    let c = angles.normalization_over(op.support().active());
    Ok(c * z_norm(op, angles)?)
}

fn check(op: &ElementOperator, angles: &ParityAngles) -> Result<()> {
    if op.modes() != angles.len() {
        return Err(Error::DimensionMismatch(format!(
            "{}-mode operator with {} angles",
            op.modes(),
            angles.len()
        )));
    }
    Ok(())
}
