//! From shot data to density matrices, fidelities and fitted trends.

mod coords;
mod demesst;
mod fit;
mod metrics;
mod oli;
mod report;
mod w2;

pub use coords::{
    clip_to_physical, from_coordinates, project_to_density, simplex_projection, to_coordinates,
};
pub use demesst::{demesst_element, demesst_reconstruct, ElementEstimate};
pub use fit::{fit_phases, fit_power_law, w_fidelity, PhaseFit, PowerLaw};
pub use metrics::{metrics, Metrics};
pub use oli::{oli_reconstruct, OliSystem, PgdOptions};
pub use report::{ReconstructionReport, ReportJson};
pub use w2::{w2_fidelity, FidelityEstimate};
