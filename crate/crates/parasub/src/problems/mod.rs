//! Oracle library: toy paraconvex objectives, robust low-rank matrix
//! recovery (L1 completion and nonnegative factorization), phase
//! retrieval, synthetic instance generation and factor initializers.

pub mod factorization;
pub mod init;
pub mod phase;
pub mod synth;
pub mod toy;

pub use factorization::{rmc_oracle, FactorShape, RobustFactorizationInstance};
pub use init::{initialize_factors, InitMethod};
pub use phase::{phase_oracle, PhaseRetrievalInstance};
pub use synth::synth_rmc;
pub use toy::{builtin_instance, quadratic_norm_instance, sharp_norm_instance};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ProblemsError {
    #[error("unknown builtin problem: {0}")]
    UnknownBuiltin(String),
    #[error("mask entries must be 0 or 1 (found {value} at ({row}, {col}))")]
    BadMask { row: usize, col: usize, value: f64 },
    #[error("rank {r} exceeds min(m, n) = {limit}")]
    RankTooLarge { r: usize, limit: usize },
    #[error("data entry at ({row}, {col}) is observed but not finite")]
    NonFiniteObserved { row: usize, col: usize },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("all entries are unobserved")]
    AllUnobserved,
    #[error("fraction {name} = {value} must lie in [0, 1]")]
    BadFraction { name: &'static str, value: f64 },
    #[error("measurement {index} is negative: {value}")]
    NegativeMeasurement { index: usize, value: f64 },
    #[error("measurements are inconsistent with the ground truth at row {index}")]
    UnrealizableMeasurement { index: usize },
    #[error(transparent)]
    Problem(#[from] crate::problem::ProblemError),
    #[error(transparent)]
    Point(#[from] crate::point::PointError),
}
