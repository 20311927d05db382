//! Simulated qubit-cavity measurement of displaced generalized parity.
//!
//! Projection pulses are exact applications of `P_S`, displacements and
//! the parity wait are exact unitaries, and the only classical noise is a
//! symmetric bit flip on every readout.

mod backend;
mod log;

pub use backend::{
    batch_signal, parity_probability, projected_parity_probability, run_batch,
    signal_from_probabilities, MeasurementBackend, ProtocolConfig, Shot, ShotBatch, SignMode,
};
pub use log::{read_shot_log, write_shot_log, ShotRecord};
