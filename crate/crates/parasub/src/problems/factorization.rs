//! Robust low-rank matrix recovery: `min 0.5 * |M . (X - U V)|_1` over the
//! factors, optionally constrained to the nonnegative orthant (robust NMF).
//!
//! The factor pair is flattened into a single solver point, `U` row-major
//! first and then `V` row-major, so oracles and solver can never disagree
//! about the layout.

use std::sync::Arc;

use ndarray::Array2;

use crate::point::Point;
use crate::problem::{ProblemInstance, Projection, SubgradientSample};
use crate::problems::ProblemsError;

/// Shapes of a factorization `X (m x n) ~ U (m x r) V (r x n)` and the
/// canonical flattening between `(U, V)` and a solver [`Point`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FactorShape {
    pub m: usize,
    pub n: usize,
    pub r: usize,
}

impl FactorShape {
    pub fn dimension(&self) -> usize {
        (self.m + self.n) * self.r
    }

    /// Flattens `U` then `V`, both row-major.
    pub fn pack(&self, u: &Array2<f64>, v: &Array2<f64>) -> Result<Point, ProblemsError> {
        if u.dim() != (self.m, self.r) || v.dim() != (self.r, self.n) {
            return Err(ProblemsError::ShapeMismatch(format!(
                "expected U {}x{} and V {}x{}, got U {:?} and V {:?}",
                self.m,
                self.r,
                self.r,
                self.n,
                u.dim(),
                v.dim()
            )));
        }
        let mut values = Vec::with_capacity(self.dimension());
        values.extend(u.iter());
        values.extend(v.iter());
        Ok(Point::new(values)?)
    }

    pub fn unpack(&self, point: &Point) -> (Array2<f64>, Array2<f64>) {
        let split = self.m * self.r;
        let u = Array2::from_shape_vec((self.m, self.r), point.as_slice()[..split].to_vec())
            .expect("layout fixed by construction");
        let v = Array2::from_shape_vec((self.r, self.n), point.as_slice()[split..].to_vec())
            .expect("layout fixed by construction");
        (u, v)
    }
}

/// A robust matrix recovery instance: data `X`, binary observation mask
/// `M`, target rank and the nonnegativity flag. Synthetic instances carry
/// the ground-truth matrix.
#[derive(Debug, Clone)]
pub struct RobustFactorizationInstance {
    x: Array2<f64>,
    mask: Array2<f64>,
    r: usize,
    nonnegative: bool,
    ground_truth: Option<Array2<f64>>,
}

impl RobustFactorizationInstance {
    pub fn new(
        x: Array2<f64>,
        mask: Array2<f64>,
        r: usize,
        nonnegative: bool,
        ground_truth: Option<Array2<f64>>,
    ) -> Result<Self, ProblemsError> {
        let (m, n) = x.dim();
        if mask.dim() != (m, n) {
            return Err(ProblemsError::ShapeMismatch(format!(
                "mask {:?} does not match data {:?}",
                mask.dim(),
                x.dim()
            )));
        }
        if let Some(g) = &ground_truth {
            if g.dim() != (m, n) {
                return Err(ProblemsError::ShapeMismatch(format!(
                    "ground truth {:?} does not match data {:?}",
                    g.dim(),
                    x.dim()
                )));
            }
        }
        if r == 0 || r > m.min(n) {
            return Err(ProblemsError::RankTooLarge { r, limit: m.min(n) });
        }
        for ((row, col), &v) in mask.indexed_iter() {
            if v != 0.0 && v != 1.0 {
                return Err(ProblemsError::BadMask { row, col, value: v });
            }
            if v == 1.0 && !x[[row, col]].is_finite() {
                return Err(ProblemsError::NonFiniteObserved { row, col });
            }
        }
        Ok(RobustFactorizationInstance { x, mask, r, nonnegative, ground_truth })
    }

    pub fn data(&self) -> &Array2<f64> {
        &self.x
    }
    pub fn mask(&self) -> &Array2<f64> {
        &self.mask
    }
    pub fn rank(&self) -> usize {
        self.r
    }
    pub fn nonnegative(&self) -> bool {
        self.nonnegative
    }
    pub fn ground_truth(&self) -> Option<&Array2<f64>> {
        self.ground_truth.as_ref()
    }

    pub fn shape(&self) -> FactorShape {
        let (m, n) = self.x.dim();
        FactorShape { m, n, r: self.r }
    }

    /// True when the observed entries agree with the ground truth exactly,
    /// so a rank-`r` factorization attains loss zero.
    pub fn is_realizable(&self) -> bool {
        match &self.ground_truth {
            None => false,
            Some(g) => self
                .mask
                .indexed_iter()
                .all(|((i, j), &m)| m == 0.0 || self.x[[i, j]] == g[[i, j]]),
        }
    }

    pub fn observed_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m == 1.0).count()
    }
}

/// Builds the solver-facing problem for an instance.
///
/// The loss is `0.5 * sum_ij M_ij |X_ij - (UV)_ij|`; its subgradient uses
/// the minimal-norm selection `sign(0) = 0`, giving
/// `G_U = 0.5 * S V^T` and `G_V = 0.5 * U^T S` with `S = M . sign(UV - X)`.
/// With the nonnegative flag the feasible set is the orthant, otherwise the
/// problem is unconstrained.
pub fn rmc_oracle(instance: &RobustFactorizationInstance) -> ProblemInstance {
    let shape = instance.shape();
    let x = Arc::new(instance.x.clone());
    let mask = Arc::new(instance.mask.clone());
    let realizable = instance.is_realizable();

    let value = {
        let x = Arc::clone(&x);
        let mask = Arc::clone(&mask);
        move |p: &Point| {
            let (u, v) = shape.unpack(p);
            let uv = u.dot(&v);
            let mut loss = 0.0;
            for ((i, j), &m) in mask.indexed_iter() {
                if m == 1.0 {
                    loss += (x[[i, j]] - uv[[i, j]]).abs();
                }
            }
            0.5 * loss
        }
    };

    let subgradient = {
        let x = Arc::clone(&x);
        let mask = Arc::clone(&mask);
        move |p: &Point| {
            let (u, v) = shape.unpack(p);
            let uv = u.dot(&v);
            let mut s = Array2::<f64>::zeros(uv.dim());
            for ((i, j), &m) in mask.indexed_iter() {
                if m == 1.0 {
                    let resid = uv[[i, j]] - x[[i, j]];
                    s[[i, j]] = if resid > 0.0 {
                        1.0
                    } else if resid < 0.0 {
                        -1.0
                    } else {
                        0.0
                    };
                }
            }
            let g_u = s.dot(&v.t()).mapv(|e| 0.5 * e);
            let g_v = u.t().dot(&s).mapv(|e| 0.5 * e);
            SubgradientSample::new(shape.pack(&g_u, &g_v).expect("gradient shapes match"))
        }
    };

    let mut builder = ProblemInstance::builder(
        if instance.nonnegative() { "rnmf" } else { "rmc" },
        shape.dimension(),
    )
    .value(value)
    .subgradient(subgradient)
    .projection(if instance.nonnegative() {
        Projection::Nonnegative
    } else {
        Projection::Identity
    })
    .f_star(0.0)
    .surrogate_target(!realizable);

    if let Some(truth) = instance.ground_truth() {
        let truth = truth.clone();
        let truth_norm = truth.iter().map(|e| e * e).sum::<f64>().sqrt();
        builder = builder.surrogate_progress(move |p: &Point| {
            let (u, v) = shape.unpack(p);
            let uv = u.dot(&v);
            let err = (&uv - &truth).iter().map(|e| e * e).sum::<f64>().sqrt();
            err / truth_norm.max(f64::MIN_POSITIVE)
        });
    }

    builder.build().expect("oracle closures are total")
}
