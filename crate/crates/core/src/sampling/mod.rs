//! Displacement samplers for the three strategies and Hoeffding budgets.

mod budget;
mod demesst;
mod oli;
mod plan;
mod radial;
pub mod rng;
mod w2;

pub use budget::{allocate_budget, hoeffding_budget, BudgetSpec, OperatorBudget};
pub use demesst::{demesst_sample, DemesstSampler, SampledPoint};
pub use oli::{
    condition_number, measurement_matrix, measurement_row, oli_displacement_set, oli_pool,
    ring_radii, OliOptions, OliSet, RING_ANGLES,
};
pub use plan::{OperatorPlan, SamplingPlan, Strategy};
pub use radial::{RadialTable, GRID};
pub use w2::{w2_sample, W2Options, ACCEPTANCE_FLOOR};
