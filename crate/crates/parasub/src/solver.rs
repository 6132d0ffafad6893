//! The generic projected subgradient method.
//!
//! The update is the descent step with a normalized subgradient,
//!
//! ```text
//! x_{k+1} = proj_X( x_k - alpha_k * zeta_k / |zeta_k| )
//! ```
//!
//! so the step length in space is exactly `alpha_k` before projection.
//! A run stops on whichever of three criteria fires first: the iteration
//! budget, a subgradient norm at or below the stationarity tolerance (a
//! stationary iterate inside the saddle-free tube is a global minimizer,
//! so repeating `x_{k+1} = x_k` forever would be a no-op), or the value gap
//! `f_best - f_star` reaching a target.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::history::{IterateRecord, RunHistory, Termination};
use crate::point::Point;
use crate::problem::ProblemInstance;
use crate::schedule::{step_size, ScheduleError, StepSizeRule};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("oracle returned a non-finite value at iteration {k}: {what}")]
    NonFiniteOracle { k: usize, what: String },
    #[error("initial point has dimension {actual}, problem has {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("subgradient has dimension {actual} at iteration {k}, expected {expected}")]
    SubgradientDimension { k: usize, expected: usize, actual: usize },
    #[error("max_iterations must be at least 1")]
    NoIterations,
    #[error(transparent)]
    Schedule(#[from] ScheduleError),
    #[error("target_gap stopping requires a problem with f_star")]
    TargetWithoutOptimum,
}

/// Run options. `Default` gives 1000 iterations, stationarity tolerance
/// 1e-12, distance recording on, point recording off.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub max_iterations: usize,
    /// Subgradient-norm threshold below which the run stops as stationary.
    pub stationary_tolerance: f64,
    /// Stop once `f_best - f_star <= target_gap`.
    pub target_gap: Option<f64>,
    pub record_distances: bool,
    /// Store every iterate (needed by [`crate::audit::audit`]).
    pub record_points: bool,
    pub seed: u64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            max_iterations: 1000,
            stationary_tolerance: 1e-12,
            target_gap: None,
            record_distances: true,
            record_points: false,
            seed: 0,
        }
    }
}

/// A deterministic point on the unit sphere, the default starting point for
/// problems without a natural initializer.
pub fn random_unit_point(dimension: usize, seed: u64) -> Point {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let values: Vec<f64> = (0..dimension).map(|_| rng.sample(StandardNormal)).collect();
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return Point::new(values.iter().map(|v| v / norm).collect()).expect("finite");
        }
    }
}

/// A deterministic point uniform in the box `[lo, hi]^n`.
pub fn random_box_point(dimension: usize, lo: f64, hi: f64, seed: u64) -> Point {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Point::new((0..dimension).map(|_| rng.random_range(lo..hi)).collect()).expect("finite")
}

/// Runs the projected subgradient method from `x0`.
///
/// The history records every visited iterate `k = 0..=K`, including the
/// final one, so a run that exhausts `max_iterations = m` has exactly
/// `m + 1` records. Identical inputs produce bit-identical scalar streams.
pub fn run(
    problem: &ProblemInstance,
    rule: &StepSizeRule,
    x0: Point,
    config: &SolverConfig,
) -> Result<RunHistory, SolverError> {
    if config.max_iterations == 0 {
        return Err(SolverError::NoIterations);
    }
    rule.validate()?;
    if x0.len() != problem.dimension() {
        return Err(SolverError::DimensionMismatch {
            expected: problem.dimension(),
            actual: x0.len(),
        });
    }
    if config.target_gap.is_some() && problem.f_star().is_none() {
        return Err(SolverError::TargetWithoutOptimum);
    }

    let mut records = Vec::with_capacity(config.max_iterations + 1);
    let mut points = if config.record_points { Some(Vec::new()) } else { None };
    let mut x = x0;
    let mut f_best = f64::INFINITY;
    let mut termination = None;

    for k in 0..=config.max_iterations {
        let f = problem.value(&x);
        if !f.is_finite() {
            return Err(SolverError::NonFiniteOracle { k, what: format!("value {f}") });
        }
        let sample = problem.subgradient(&x);
        if sample.vector().len() != x.len() {
            return Err(SolverError::SubgradientDimension {
                k,
                expected: x.len(),
                actual: sample.vector().len(),
            });
        }
        let grad_norm = sample.norm();
        if !grad_norm.is_finite() {
            return Err(SolverError::NonFiniteOracle { k, what: format!("subgradient norm {grad_norm}") });
        }
        f_best = f_best.min(f);
        let dist = if config.record_distances { problem.progress(&x) } else { None };
        if let Some(stored) = &mut points {
            stored.push(x.clone());
        }

        let stationary = grad_norm <= config.stationary_tolerance;
        let target_hit = match (config.target_gap, problem.f_star()) {
            (Some(gap), Some(f_star)) => f_best - f_star <= gap,
            _ => false,
        };
        let stopping = if k == config.max_iterations {
            Some(Termination::MaxIterations)
        } else if stationary {
            Some(Termination::Stationary)
        } else if target_hit {
            Some(Termination::TargetReached)
        } else {
            None
        };

        if let Some(term) = stopping {
            records.push(IterateRecord { k, f_value: f, f_best, alpha: 0.0, grad_norm, dist });
            termination = Some(term);
            break;
        }

        let alpha = step_size(rule, k, f, grad_norm)?;
        records.push(IterateRecord { k, f_value: f, f_best, alpha, grad_norm, dist });

        let stepped = x.add_scaled_unchecked(-alpha / grad_norm, sample.vector().as_slice());
        let stepped = Point::new(stepped)
            .map_err(|e| SolverError::NonFiniteOracle { k, what: e.to_string() })?;
        x = problem.project(&stepped);
    }

    Ok(RunHistory {
        records,
        termination: termination.expect("loop always terminates with a reason"),
        final_point: x,
        points,
        dist_is_surrogate: problem.progress_is_surrogate(),
    })
}
