//! Generalized Wigner functions `W̃(α, θ) = Tr[ρ D(α) e^{iΣθ n̂} D†(α)]`.

mod angles;
mod eval;
pub mod kernel;
mod norm;
mod point;

pub use angles::{HardwareProfile, ParityAngles, REFERENCE_CHI_MHZ};
pub use eval::{
    generalized_wigner_element, generalized_wigner_state, generalized_wigner_state_batch,
    ketbra_wigner,
};
pub(crate) use eval::kernel_tables;
pub use kernel::mode_kernel;
pub use norm::{estimator_weight, ketbra_z, mode_cz, normalization_c, z_norm};
pub(crate) use norm::{gamma_tail_radius, magnitude_kinks};
pub use point::{DisplacementPoint, DEFAULT_RADIUS_BOUND};

pub use crate::special::displacement_element;
