//! File formats: CSV matrices, PGM images, MovieLens ratings and the flat
//! key=value run configuration.

pub mod config;
pub mod csv;
pub mod movielens;
pub mod pgm;

pub use config::RunConfig;
pub use csv::{read_matrix_csv, write_matrix_csv};
pub use movielens::{parse_movielens, MovielensData, RatingTriple};
pub use pgm::{read_pgm, write_pgm, PgmImage};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Malformed { line: usize, message: String },
    #[error("no ratings")]
    NoRatings,
    #[error("unsupported format: {0}")]
    UnsupportedFormat(String),
    #[error("truncated payload: expected {expected} pixels, got {got}")]
    Truncated { expected: usize, got: usize },
    #[error("maxval {0} out of range (1..=65535)")]
    BadMaxval(u32),
    #[error("matrix rows have unequal lengths (row {row} has {got}, expected {expected})")]
    RaggedRows { row: usize, got: usize, expected: usize },
    #[error("empty matrix")]
    EmptyMatrix,
    #[error("config: {0}")]
    Config(String),
}
