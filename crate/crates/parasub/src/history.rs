//! Per-iteration records of a solver run.

use thiserror::Error;

use crate::point::Point;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HistoryError {
    #[error("history has no records")]
    Empty,
    #[error("record {position} has index {found}, expected {expected}")]
    NonContiguous { position: usize, found: usize, expected: usize },
    #[error("f_best increases at iteration {k}")]
    BestNotMonotone { k: usize },
}

/// Why a run stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    MaxIterations,
    /// Subgradient norm fell below the stationarity tolerance.
    Stationary,
    /// `f_best - f_star` reached the configured target gap.
    TargetReached,
}

impl std::fmt::Display for Termination {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Termination::MaxIterations => write!(f, "max_iterations"),
            Termination::Stationary => write!(f, "stationary"),
            Termination::TargetReached => write!(f, "target_reached"),
        }
    }
}

/// One row of a run: everything observed at iterate `x_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateRecord {
    pub k: usize,
    pub f_value: f64,
    /// Running minimum of `f_value` over iterations `0..=k`.
    pub f_best: f64,
    /// Step size used to leave `x_k` (zero on the final record).
    pub alpha: f64,
    pub grad_norm: f64,
    /// Distance to the reference set, or the problem's progress surrogate;
    /// see [`RunHistory::dist_is_surrogate`].
    pub dist: Option<f64>,
}

/// Complete trace of one solver run.
#[derive(Debug, Clone)]
pub struct RunHistory {
    pub records: Vec<IterateRecord>,
    pub termination: Termination,
    pub final_point: Point,
    /// Iterates, stored only when the run was configured to record points.
    pub points: Option<Vec<Point>>,
    /// True when the `dist` column holds a reconstruction surrogate rather
    /// than a distance to known minimizers.
    pub dist_is_surrogate: bool,
}

impl RunHistory {
    /// Checks the structural invariants: nonempty, contiguous indices from
    /// zero, nonincreasing `f_best`.
    pub fn validate(&self) -> Result<(), HistoryError> {
        if self.records.is_empty() {
            return Err(HistoryError::Empty);
        }
        let mut best = f64::INFINITY;
        for (position, record) in self.records.iter().enumerate() {
            if record.k != position {
                return Err(HistoryError::NonContiguous {
                    position,
                    found: record.k,
                    expected: position,
                });
            }
            if record.f_best > best {
                return Err(HistoryError::BestNotMonotone { k: record.k });
            }
            best = record.f_best;
        }
        Ok(())
    }

    pub fn last(&self) -> &IterateRecord {
        self.records.last().expect("history is never empty")
    }

    pub fn f_best(&self) -> f64 {
        self.last().f_best
    }

    /// The `dist` column as a dense vector; `None` if any record lacks it.
    pub fn distances(&self) -> Option<Vec<f64>> {
        self.records.iter().map(|r| r.dist).collect()
    }
}
