//! Closed-form single-mode factors of the generalized Wigner function.
//!
//! With `X(α, θ) = D(α) e^{iθ n̂} D†(α)`, moving the rotation through the
//! displacement (`e^{iθ n̂} D(β) = D(β e^{iθ}) e^{iθ n̂}`) and merging the two
//! displacements gives
//!
//! ```text
//! X(α, θ) = e^{i|α|² sin θ} D(α(1 − e^{iθ})) e^{iθ n̂}
//! ```
//!
//! so every Fock matrix element of `X` is one displacement element times
//! explicit phases.

use num_complex::Complex;

use crate::scalar::Scalar;
use crate::special::displacement_element;

/// `X(α, θ)` for one mode, ready to produce Fock matrix elements.
#[derive(Debug, Clone, Copy)]
pub struct ModeKernel<T> {
    phase: Complex<T>,
    gamma: Complex<T>,
    rotation: Complex<T>,
}

impl<T: Scalar> ModeKernel<T> {
    pub fn new(alpha: Complex<T>, theta: T) -> Self {
        let rotation = Complex::from_polar(T::one(), theta);
        let gamma = alpha * (Complex::new(T::one(), T::zero()) - rotation);
        let phase = Complex::from_polar(T::one(), alpha.norm_sqr() * theta.sin());
        Self {
            phase,
            gamma,
            rotation,
        }
    }

    /// Effective displacement `γ = α(1 − e^{iθ})`.
    pub fn gamma(&self) -> Complex<T> {
        self.gamma
    }

    /// `⟨b|X|a⟩`, which is also the generalized Wigner value of `|a⟩⟨b|`.
    pub fn element(&self, b: usize, a: usize) -> Complex<T> {
        self.phase * displacement_element(b, a, self.gamma) * self.rotation.powu(a as u32)
    }

    /// `table[b][a] = ⟨b|X|a⟩` for `a, b <= n_max`.
    pub fn table(&self, n_max: usize) -> Vec<Vec<Complex<T>>> {
        (0..=n_max)
            .map(|b| (0..=n_max).map(|a| self.element(b, a)).collect())
            .collect()
    }
}

/// `⟨b|D(α) e^{iθ n̂} D†(α)|a⟩`.
pub fn mode_kernel<T: Scalar>(b: usize, a: usize, alpha: Complex<T>, theta: T) -> Complex<T> {
    ModeKernel::new(alpha, theta).element(b, a)
}
