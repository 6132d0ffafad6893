//! Small closed-form objectives with known minimizers, used throughout the
//! test and certification suites.
//!
//! * `para1d`: the one-dimensional spliced objective
//!   `h(x) = 1 - |x|^{3/2}` on `[-1, 1]` and `x^2 - 1` outside. Adding
//!   `|x|^{3/2}` makes it convex, so it is 0.5-paraconvex but not weakly
//!   convex; minimizers at `x = +-1`, a stationary local maximum at `0`.
//! * `saddle2d`: `h(x, y) = x^2 + (y^2 - 1)^2`, a 1-paraconvex objective
//!   with global minima `(0, +-1)` and a saddle at the origin, at distance
//!   exactly 1 from the minimizers.
//! * `sharp_norm`: `f(x) = |x|_2`, the canonical sharp objective
//!   (`delta = 1`, `mu = L = 1`, convex so `rho = 0`).
//! * `quadratic_norm`: `f(x) = |x|_2^2`, quadratic growth.

use crate::point::Point;
use crate::problem::{ProblemInstance, ReferenceSolution, SubgradientSample, TheoryConstants};
use crate::problems::ProblemsError;

/// Default dimension for the norm-based builtins.
const NORM_DIM: usize = 10;

/// Looks up a builtin by name: `para1d`, `saddle2d`, `sharp_norm`,
/// `quadratic_norm`.
pub fn builtin_instance(name: &str) -> Result<ProblemInstance, ProblemsError> {
    match name {
        "para1d" => Ok(para1d_instance()),
        "saddle2d" => Ok(saddle2d_instance()),
        "sharp_norm" => Ok(sharp_norm_instance(NORM_DIM)),
        "quadratic_norm" => Ok(quadratic_norm_instance(NORM_DIM)),
        other => Err(ProblemsError::UnknownBuiltin(other.to_string())),
    }
}

pub fn para1d_instance() -> ProblemInstance {
    ProblemInstance::builder("para1d", 1)
        .value(|x: &Point| {
            let t = x[0];
            if t.abs() <= 1.0 {
                1.0 - t.abs().powf(1.5)
            } else {
                t * t - 1.0
            }
        })
        .gradient(|x: &Point| {
            let t = x[0];
            let g = if t.abs() < 1.0 {
                -1.5 * t.abs().sqrt() * t.signum()
            } else if t.abs() == 1.0 {
                // minimizer: zero is a valid Clarke selection
                0.0
            } else {
                2.0 * t
            };
            vec![g]
        })
        .reference(ReferenceSolution::Points(vec![
            Point::new(vec![-1.0]).expect("finite"),
            Point::new(vec![1.0]).expect("finite"),
        ]))
        .f_star(0.0)
        .build()
        .expect("builtin is well formed")
}

pub fn saddle2d_instance() -> ProblemInstance {
    ProblemInstance::builder("saddle2d", 2)
        .value(|p: &Point| {
            let (x, y) = (p[0], p[1]);
            x * x + (y * y - 1.0) * (y * y - 1.0)
        })
        .gradient(|p: &Point| {
            let (x, y) = (p[0], p[1]);
            vec![2.0 * x, 4.0 * y * (y * y - 1.0)]
        })
        .reference(ReferenceSolution::Points(vec![
            Point::new(vec![0.0, 1.0]).expect("finite"),
            Point::new(vec![0.0, -1.0]).expect("finite"),
        ]))
        .f_star(0.0)
        .build()
        .expect("builtin is well formed")
}

/// `f(x) = |x|_2` in the requested dimension.
pub fn sharp_norm_instance(dimension: usize) -> ProblemInstance {
    ProblemInstance::builder("sharp_norm", dimension)
        .value(|x: &Point| x.norm())
        .subgradient(|x: &Point| {
            let norm = x.norm();
            if norm == 0.0 {
                // minimal-norm Clarke element at the minimizer
                SubgradientSample::new(Point::zeros(x.len()))
            } else {
                SubgradientSample::new(
                    Point::new(x.as_slice().iter().map(|v| v / norm).collect()).expect("finite"),
                )
            }
        })
        .reference(ReferenceSolution::Points(vec![Point::zeros(dimension)]))
        .f_star(0.0)
        .theory(TheoryConstants::new(1.0, 0.0, 1.0, 1.0, 1.0).expect("valid constants"))
        .build()
        .expect("builtin is well formed")
}

/// `f(x) = |x|_2^2` in the requested dimension.
pub fn quadratic_norm_instance(dimension: usize) -> ProblemInstance {
    ProblemInstance::builder("quadratic_norm", dimension)
        .value(|x: &Point| x.as_slice().iter().map(|v| v * v).sum())
        .gradient(|x: &Point| x.as_slice().iter().map(|v| 2.0 * v).collect())
        .reference(ReferenceSolution::Points(vec![Point::zeros(dimension)]))
        .f_star(0.0)
        .build()
        .expect("builtin is well formed")
}
