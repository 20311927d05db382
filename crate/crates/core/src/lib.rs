//! Multimode bosonic Wigner tomography.
//!
//! The crate simulates generalized parity measurements on truncated
//! multimode Fock spaces and reconstructs density matrices with three
//! strategies:
//!
//! * **DEMESST** subspace sampling: every element operator `|n⟩⟨n′|` is
//!   estimated on its own, with displacements drawn proportionally to the
//!   magnitude of the operator's generalized Wigner function and with modes
//!   that are vacuum on both sides projected out of the measurement.
//! * **OLI**: a fixed displacement set chosen to minimize the condition
//!   number of the measurement matrix, followed by least squares over
//!   physical density matrices.
//! * **W²** direct fidelity estimation against a pure target.
//!
//! Module map:
//!
//! | module          | contents                                                    |
//! |-----------------|-------------------------------------------------------------|
//! | [`hilbert`]     | Fock bases, element operators, partial traces, W states     |
//! | [`wigner`]      | generalized Wigner functions and their normalizations       |
//! | [`sampling`]    | displacement samplers and Hoeffding budgets                 |
//! | [`experiment`]  | simulated qubit readout of displaced parity measurements    |
//! | [`reconstruct`] | estimators, constrained inversion, metrics and fits         |

pub mod error;
pub mod experiment;
pub mod hilbert;
pub mod quadrature;
pub mod reconstruct;
pub mod sampling;
pub mod scalar;
pub mod special;
pub mod wigner;

pub use error::{Error, Result};
pub use scalar::Scalar;

/// Working precision for state-level algebra.
pub type Real = f64;
/// Complex amplitude at working precision.
pub type Complex = num_complex::Complex<Real>;

/// Single-mode kernel evaluated in double precision.
pub type ModeKernel = wigner::kernel::ModeKernel<f64>;
/// Single-mode kernel evaluated in single precision.
pub type ModeKernel32 = wigner::kernel::ModeKernel<f32>;

pub use experiment::{
    batch_signal, parity_probability, projected_parity_probability, run_batch, MeasurementBackend,
    ProtocolConfig, ShotBatch, SignMode,
};
pub use hilbert::{
    assemble_from_elements, element_operators, enumerate_basis, ideal_w_state, perturbed_state,
    project_and_trace, DensityMatrix, ElementOperator, FockBasis, ModePartition, OccupationVector,
    OperatorKind,
};
pub use reconstruct::{
    demesst_element, demesst_reconstruct, fit_phases, fit_power_law, metrics, oli_reconstruct,
    w2_fidelity, Metrics, ReconstructionReport,
};
pub use sampling::{
    allocate_budget, demesst_sample, hoeffding_budget, oli_displacement_set, w2_sample, BudgetSpec,
    SampledPoint, SamplingPlan, Strategy,
};
pub use wigner::{
    displacement_element, generalized_wigner_element, generalized_wigner_state, normalization_c,
    z_norm, DisplacementPoint, ParityAngles,
};
