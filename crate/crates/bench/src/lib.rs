//! Benchmark harness for `wigtomo`: seeded simulations of the tomography
//! strategies, driven by TOML configs and written out as CSV and JSON.
//!
//! Results depend only on the config and seed, never on the thread count.

pub mod commands;
pub mod config;
pub mod error;
pub mod harness;

pub use commands::{convergence, optimize_set, reconstruct, scaling, trace_check, w2};
pub use config::RunConfig;
pub use error::{BenchError, Result};
