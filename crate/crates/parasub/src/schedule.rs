//! Step-size rules for the projected subgradient method.
//!
//! Six rules are supported:
//!
//! | rule            | formula                                      |
//! |-----------------|----------------------------------------------|
//! | constant        | `alpha_k = alpha`                            |
//! | diminishing     | `alpha_k = lambda * (k + beta)^(-r)`, `r in (0,1)` |
//! | square-summable | `alpha_k = lambda / (k + 1)`                 |
//! | geometric       | `alpha_k = lambda * q^k`, `q in (0,1)`       |
//! | Polyak          | `alpha_k = max(0, f(x_k) - f_target) / |zeta_k|` |
//! | scaled Polyak   | `alpha_k = max(0, f(x_k) - f_target) / (sigma * |zeta_k|)` |
//!
//! Polyak-type rules clamp a negative gap to zero: with surrogate targets
//! the iterate can fall below the target, and a negative step has no
//! meaning. A scaled Polyak rule with `sigma = 1` coincides with the plain
//! Polyak rule.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScheduleError {
    #[error("invalid step-size parameter: {0}")]
    InvalidParameter(&'static str),
    #[error("stationary: Polyak-type step undefined at zero subgradient")]
    Stationary,
}

/// A deterministic step-size schedule, validated at construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepSizeRule {
    Constant { alpha: f64 },
    Diminishing { lambda: f64, beta: f64, r: f64 },
    /// `alpha_k = lambda / (k + 1)`: square-summable but not summable.
    SquareSummable { lambda: f64 },
    Geometric { lambda: f64, q: f64 },
    Polyak { f_target: f64 },
    ScaledPolyak { f_target: f64, sigma: f64 },
}

impl StepSizeRule {
    pub fn constant(alpha: f64) -> Result<Self, ScheduleError> {
        if !(alpha.is_finite() && alpha > 0.0) {
            return Err(ScheduleError::InvalidParameter("constant: alpha must be positive"));
        }
        Ok(StepSizeRule::Constant { alpha })
    }

    pub fn diminishing(lambda: f64, beta: f64, r: f64) -> Result<Self, ScheduleError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(ScheduleError::InvalidParameter("diminishing: lambda must be positive"));
        }
        if !(beta.is_finite() && beta > 0.0) {
            return Err(ScheduleError::InvalidParameter("diminishing: beta must be positive"));
        }
        if !(r.is_finite() && r > 0.0 && r < 1.0) {
            return Err(ScheduleError::InvalidParameter("diminishing: r must lie in (0, 1)"));
        }
        Ok(StepSizeRule::Diminishing { lambda, beta, r })
    }

    pub fn square_summable(lambda: f64) -> Result<Self, ScheduleError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(ScheduleError::InvalidParameter(
                "square_summable: lambda must be positive",
            ));
        }
        Ok(StepSizeRule::SquareSummable { lambda })
    }

    pub fn geometric(lambda: f64, q: f64) -> Result<Self, ScheduleError> {
        if !(lambda.is_finite() && lambda > 0.0) {
            return Err(ScheduleError::InvalidParameter("geometric: lambda must be positive"));
        }
        if !(q.is_finite() && q > 0.0 && q < 1.0) {
            return Err(ScheduleError::InvalidParameter("geometric: q must lie in (0, 1)"));
        }
        Ok(StepSizeRule::Geometric { lambda, q })
    }

    pub fn polyak(f_target: f64) -> Result<Self, ScheduleError> {
        if !f_target.is_finite() {
            return Err(ScheduleError::InvalidParameter("polyak: f_target must be finite"));
        }
        Ok(StepSizeRule::Polyak { f_target })
    }

    pub fn scaled_polyak(f_target: f64, sigma: f64) -> Result<Self, ScheduleError> {
        if !f_target.is_finite() {
            return Err(ScheduleError::InvalidParameter("scaled_polyak: f_target must be finite"));
        }
        if !(sigma.is_finite() && sigma > 0.5) {
            return Err(ScheduleError::InvalidParameter(
                "scaled_polyak: sigma must exceed 1/2",
            ));
        }
        Ok(StepSizeRule::ScaledPolyak { f_target, sigma })
    }

    /// Re-checks the parameter ranges (for rules built via struct literals).
    pub fn validate(&self) -> Result<(), ScheduleError> {
        match *self {
            StepSizeRule::Constant { alpha } => Self::constant(alpha).map(|_| ()),
            StepSizeRule::Diminishing { lambda, beta, r } => {
                Self::diminishing(lambda, beta, r).map(|_| ())
            }
            StepSizeRule::SquareSummable { lambda } => Self::square_summable(lambda).map(|_| ()),
            StepSizeRule::Geometric { lambda, q } => Self::geometric(lambda, q).map(|_| ()),
            StepSizeRule::Polyak { f_target } => Self::polyak(f_target).map(|_| ()),
            StepSizeRule::ScaledPolyak { f_target, sigma } => {
                Self::scaled_polyak(f_target, sigma).map(|_| ())
            }
        }
    }

    /// True for the Polyak family, which needs value and subgradient
    /// information at every step.
    pub fn is_polyak_type(&self) -> bool {
        matches!(self, StepSizeRule::Polyak { .. } | StepSizeRule::ScaledPolyak { .. })
    }

    pub fn name(&self) -> &'static str {
        match self {
            StepSizeRule::Constant { .. } => "constant",
            StepSizeRule::Diminishing { .. } => "diminishing",
            StepSizeRule::SquareSummable { .. } => "square_summable",
            StepSizeRule::Geometric { .. } => "geometric",
            StepSizeRule::Polyak { .. } => "polyak",
            StepSizeRule::ScaledPolyak { .. } => "scaled_polyak",
        }
    }
}

/// Step size at iteration `k`. Polyak-type rules consume the current value
/// `f_x` and subgradient norm; the other rules ignore them.
pub fn step_size(
    rule: &StepSizeRule,
    k: usize,
    f_x: f64,
    grad_norm: f64,
) -> Result<f64, ScheduleError> {
    let alpha = match *rule {
        StepSizeRule::Constant { alpha } => alpha,
        StepSizeRule::Diminishing { lambda, beta, r } => lambda * (k as f64 + beta).powf(-r),
        StepSizeRule::SquareSummable { lambda } => lambda / (k as f64 + 1.0),
        // iterated product, so alpha_{k+1} == alpha_k * q holds bit-exactly
        StepSizeRule::Geometric { lambda, q } => (0..k).fold(lambda, |a, _| a * q),
        StepSizeRule::Polyak { f_target } => polyak_step(f_x, f_target, 1.0, grad_norm)?,
        StepSizeRule::ScaledPolyak { f_target, sigma } => {
            polyak_step(f_x, f_target, sigma, grad_norm)?
        }
    };
    Ok(alpha)
}

fn polyak_step(f_x: f64, f_target: f64, sigma: f64, grad_norm: f64) -> Result<f64, ScheduleError> {
    if grad_norm <= 0.0 {
        return Err(ScheduleError::Stationary);
    }
    Ok((f_x - f_target).max(0.0) / (sigma * grad_norm))
}
