use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("basis dimension {dimension} exceeds the capacity limit {limit}")]
    Capacity { dimension: u128, limit: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parity angle {angle} on mode {mode} is a multiple of 2π")]
    DegenerateAngle { mode: usize, angle: f64 },

    #[error("missing estimate for element operator {0}")]
    MissingEstimate(String),

    #[error("shot data does not cover {} element operator(s): {}", .missing.len(), .missing.join(", "))]
    Coverage { missing: Vec<String> },

    #[error("quadrature did not converge: {0}")]
    Integration(String),

    #[error("operator normalization {0:e} is degenerate")]
    DegenerateOperator(f64),

    #[error("rejection sampler acceptance rate {rate:e} is below the floor {floor:e}")]
    Acceptance { rate: f64, floor: f64 },

    #[error("measurement matrix is rank deficient (rank {rank} of {needed})")]
    RankDeficient { rank: usize, needed: usize },

    #[error("candidate pool exhausted at rank {rank} of {needed}")]
    PoolExhausted { rank: usize, needed: usize },

    #[error(
        "projected gradient did not converge after {iterations} iterations (residual {residual:e})"
    )]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("internal consistency: {0}")]
    Consistency(String),

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
