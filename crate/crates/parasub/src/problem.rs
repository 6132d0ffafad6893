//! Problem instances: oracles, feasible-set projections, ground truth and
//! theory constants.
//!
//! A [`ProblemInstance`] is the unit every other module consumes. It is
//! immutable after construction and all oracles are required to be pure
//! functions of their input, so instances can be shared read-only across
//! concurrent runs.

use std::sync::Arc;

use thiserror::Error;

use crate::point::{Point, PointError};

pub type ValueOracle = dyn Fn(&Point) -> f64 + Send + Sync;
pub type SubgradientOracle = dyn Fn(&Point) -> SubgradientSample + Send + Sync;
pub type ProjectionFn = dyn Fn(&Point) -> Point + Send + Sync;
pub type ProgressFn = dyn Fn(&Point) -> f64 + Send + Sync;

#[derive(Debug, Error)]
pub enum ProblemError {
    #[error(transparent)]
    Point(#[from] PointError),
    #[error("subgradient norm {stored} disagrees with recomputed norm {actual}")]
    InconsistentNorm { stored: f64, actual: f64 },
    #[error("no reference")]
    NoReference,
    #[error("theory constant out of range: {0}")]
    TheoryConstant(&'static str),
    #[error("problem has no value oracle")]
    MissingValueOracle,
    #[error("problem has no subgradient oracle")]
    MissingSubgradientOracle,
    #[error("reference solution has value {value} but f_star is {f_star}")]
    ReferenceValueMismatch { value: f64, f_star: f64 },
    #[error("reference point has dimension {actual}, problem has {expected}")]
    ReferenceDimension { expected: usize, actual: usize },
}

/// A Clarke subgradient `zeta` together with its Euclidean norm.
///
/// The norm is stored so the solver normalizes with the exact same scalar
/// that downstream records and audits see.
#[derive(Debug, Clone, PartialEq)]
pub struct SubgradientSample {
    vector: Point,
    norm: f64,
}

impl SubgradientSample {
    /// Builds a sample, computing the norm from the vector.
    pub fn new(vector: Point) -> Self {
        let norm = vector.norm();
        SubgradientSample { vector, norm }
    }

    /// Builds a sample from a vector and a precomputed norm. The stored
    /// norm must agree with the recomputed one to 1e-12 relative.
    pub fn with_norm(vector: Point, norm: f64) -> Result<Self, ProblemError> {
        let actual = vector.norm();
        let scale = actual.abs().max(1.0);
        if (norm - actual).abs() > 1e-12 * scale {
            return Err(ProblemError::InconsistentNorm { stored: norm, actual });
        }
        Ok(SubgradientSample { vector, norm })
    }

    pub fn vector(&self) -> &Point {
        &self.vector
    }

    pub fn norm(&self) -> f64 {
        self.norm
    }
}

/// The constants of a paraconvexity plus Hölderian-error-bound assumption:
/// `f` is `nu`-paraconvex with constant `rho` and satisfies
/// `mu * dist(x, X*)^(1/delta) <= f(x) - f*`, with `L` bounding subgradient
/// norms on the saddle-free tube. The ratio `tau = mu / L` drives every
/// rate constant and is always recomputed, never stored.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TheoryConstants {
    nu: f64,
    rho: f64,
    delta: f64,
    mu: f64,
    l: f64,
}

impl TheoryConstants {
    pub fn new(nu: f64, rho: f64, delta: f64, mu: f64, l: f64) -> Result<Self, ProblemError> {
        if !(nu.is_finite() && nu > 0.0 && nu <= 1.0) {
            return Err(ProblemError::TheoryConstant("nu must lie in (0, 1]"));
        }
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(ProblemError::TheoryConstant("rho must be a finite nonnegative real"));
        }
        if !(delta.is_finite() && delta <= 1.0 && delta * (1.0 + nu) > 1.0) {
            return Err(ProblemError::TheoryConstant(
                "delta must lie in (1/(1+nu), 1] with delta*(1+nu) > 1 strictly",
            ));
        }
        if !(mu.is_finite() && mu > 0.0) {
            return Err(ProblemError::TheoryConstant("mu must be a finite positive real"));
        }
        if !(l.is_finite() && l > 0.0) {
            return Err(ProblemError::TheoryConstant("L must be a finite positive real"));
        }
        Ok(TheoryConstants { nu, rho, delta, mu, l })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
    pub fn rho(&self) -> f64 {
        self.rho
    }
    pub fn delta(&self) -> f64 {
        self.delta
    }
    pub fn mu(&self) -> f64 {
        self.mu
    }
    pub fn l(&self) -> f64 {
        self.l
    }

    /// `tau = mu / L`, recomputed on demand.
    pub fn tau(&self) -> f64 {
        self.mu / self.l
    }
}

/// Known minimizers of a problem, either as an explicit finite set or as a
/// symmetry orbit (phase retrieval solutions are only defined up to sign).
#[derive(Debug, Clone)]
pub enum ReferenceSolution {
    Points(Vec<Point>),
    /// The orbit `{x*, -x*}`.
    SignSymmetric(Point),
}

impl ReferenceSolution {
    fn dimension(&self) -> Option<usize> {
        match self {
            ReferenceSolution::Points(points) => points.first().map(Point::len),
            ReferenceSolution::SignSymmetric(point) => Some(point.len()),
        }
    }

    fn is_empty(&self) -> bool {
        match self {
            ReferenceSolution::Points(points) => points.is_empty(),
            ReferenceSolution::SignSymmetric(_) => false,
        }
    }

    /// Iterates over explicit representatives (both orbit elements for the
    /// sign-symmetric case).
    pub fn representatives(&self) -> Vec<Point> {
        match self {
            ReferenceSolution::Points(points) => points.clone(),
            ReferenceSolution::SignSymmetric(point) => {
                let negated =
                    Point::new(point.as_slice().iter().map(|v| -v).collect()).expect("finite");
                vec![point.clone(), negated]
            }
        }
    }
}

/// Euclidean distance from `x` to the reference set, minimizing over
/// explicit points or over the whole symmetry orbit.
pub fn distance_to_reference(x: &Point, refs: &ReferenceSolution) -> Result<f64, ProblemError> {
    if refs.is_empty() {
        return Err(ProblemError::NoReference);
    }
    let d = refs
        .representatives()
        .iter()
        .map(|r| x.distance(r))
        .fold(f64::INFINITY, f64::min);
    Ok(d)
}

/// Projection onto the feasible set. The built-in variants cover the
/// feasible sets used by the shipped problems; all of them are
/// nonexpansive and idempotent.
#[derive(Clone)]
pub enum Projection {
    /// Unconstrained: `X = R^n`.
    Identity,
    /// Nonnegative orthant, entrywise clamp at zero.
    Nonnegative,
    /// Axis-aligned box `[lo_i, hi_i]`.
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Custom(Arc<ProjectionFn>),
}

impl Projection {
    pub fn apply(&self, x: &Point) -> Point {
        match self {
            Projection::Identity => x.clone(),
            Projection::Nonnegative => {
                Point::new(x.as_slice().iter().map(|v| v.max(0.0)).collect()).expect("finite")
            }
            Projection::Box { lo, hi } => Point::new(
                x.as_slice()
                    .iter()
                    .zip(lo.iter().zip(hi))
                    .map(|(v, (l, h))| v.clamp(*l, *h))
                    .collect(),
            )
            .expect("finite"),
            Projection::Custom(f) => f(x),
        }
    }
}

impl std::fmt::Debug for Projection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Projection::Identity => write!(f, "Identity"),
            Projection::Nonnegative => write!(f, "Nonnegative"),
            Projection::Box { .. } => write!(f, "Box"),
            Projection::Custom(_) => write!(f, "Custom"),
        }
    }
}

/// A constrained nonsmooth minimization problem `min_{x in X} f(x)`,
/// described entirely through oracles.
#[derive(Clone)]
pub struct ProblemInstance {
    name: String,
    dimension: usize,
    value: Arc<ValueOracle>,
    subgradient: Arc<SubgradientOracle>,
    projection: Projection,
    reference: Option<ReferenceSolution>,
    /// Progress surrogate recorded in place of a reference distance when
    /// the minimizer set is unknowable (real-data recovery).
    surrogate_progress: Option<Arc<ProgressFn>>,
    f_star: Option<f64>,
    surrogate_target: bool,
    theory: Option<TheoryConstants>,
}

impl std::fmt::Debug for ProblemInstance {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProblemInstance")
            .field("name", &self.name)
            .field("dimension", &self.dimension)
            .field("f_star", &self.f_star)
            .field("surrogate_target", &self.surrogate_target)
            .field("theory", &self.theory)
            .finish()
    }
}

impl ProblemInstance {
    pub fn builder(name: impl Into<String>, dimension: usize) -> ProblemBuilder {
        ProblemBuilder {
            name: name.into(),
            dimension,
            value: None,
            subgradient: None,
            projection: Projection::Identity,
            reference: None,
            surrogate_progress: None,
            f_star: None,
            surrogate_target: false,
            theory: None,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn value(&self, x: &Point) -> f64 {
        (self.value)(x)
    }

    pub fn subgradient(&self, x: &Point) -> SubgradientSample {
        (self.subgradient)(x)
    }

    pub fn project(&self, x: &Point) -> Point {
        self.projection.apply(x)
    }

    pub fn projection(&self) -> &Projection {
        &self.projection
    }

    pub fn reference(&self) -> Option<&ReferenceSolution> {
        self.reference.as_ref()
    }

    pub fn f_star(&self) -> Option<f64> {
        self.f_star
    }

    /// True when `f_star` is a surrogate target (e.g. zero for real-data L1
    /// recovery) rather than a known optimal value.
    pub fn has_surrogate_target(&self) -> bool {
        self.surrogate_target
    }

    pub fn theory(&self) -> Option<&TheoryConstants> {
        self.theory.as_ref()
    }

    /// The scalar recorded in the `dist` column: distance to the reference
    /// set when one exists, otherwise the problem's progress surrogate.
    pub fn progress(&self, x: &Point) -> Option<f64> {
        if let Some(refs) = &self.reference {
            return distance_to_reference(x, refs).ok();
        }
        self.surrogate_progress.as_ref().map(|f| f(x))
    }

    /// True when [`ProblemInstance::progress`] reports a surrogate rather
    /// than a genuine distance.
    pub fn progress_is_surrogate(&self) -> bool {
        self.reference.is_none() && self.surrogate_progress.is_some()
    }
}

pub struct ProblemBuilder {
    name: String,
    dimension: usize,
    value: Option<Arc<ValueOracle>>,
    subgradient: Option<Arc<SubgradientOracle>>,
    projection: Projection,
    reference: Option<ReferenceSolution>,
    surrogate_progress: Option<Arc<ProgressFn>>,
    f_star: Option<f64>,
    surrogate_target: bool,
    theory: Option<TheoryConstants>,
}

impl ProblemBuilder {
    pub fn value(mut self, f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        self.value = Some(Arc::new(f));
        self
    }

    pub fn subgradient(
        mut self,
        g: impl Fn(&Point) -> SubgradientSample + Send + Sync + 'static,
    ) -> Self {
        self.subgradient = Some(Arc::new(g));
        self
    }

    /// Convenience wrapper for smooth oracles returning a bare vector.
    pub fn gradient(mut self, g: impl Fn(&Point) -> Vec<f64> + Send + Sync + 'static) -> Self {
        self.subgradient = Some(Arc::new(move |x: &Point| {
            SubgradientSample::new(Point::new(g(x)).expect("gradient oracle returned non-finite"))
        }));
        self
    }

    pub fn projection(mut self, p: Projection) -> Self {
        self.projection = p;
        self
    }

    pub fn reference(mut self, r: ReferenceSolution) -> Self {
        self.reference = Some(r);
        self
    }

    pub fn surrogate_progress(
        mut self,
        f: impl Fn(&Point) -> f64 + Send + Sync + 'static,
    ) -> Self {
        self.surrogate_progress = Some(Arc::new(f));
        self
    }

    pub fn f_star(mut self, v: f64) -> Self {
        self.f_star = Some(v);
        self
    }

    pub fn surrogate_target(mut self, flag: bool) -> Self {
        self.surrogate_target = flag;
        self
    }

    pub fn theory(mut self, t: TheoryConstants) -> Self {
        self.theory = Some(t);
        self
    }

    pub fn build(self) -> Result<ProblemInstance, ProblemError> {
        let value = self.value.ok_or(ProblemError::MissingValueOracle)?;
        let subgradient = self.subgradient.ok_or(ProblemError::MissingSubgradientOracle)?;
        if let Some(refs) = &self.reference {
            if let Some(dim) = refs.dimension() {
                if dim != self.dimension {
                    return Err(ProblemError::ReferenceDimension {
                        expected: self.dimension,
                        actual: dim,
                    });
                }
            }
            // Known minimizers must actually attain the known optimum.
            if let Some(f_star) = self.f_star {
                for r in refs.representatives() {
                    let v = value(&r);
                    if (v - f_star).abs() > 1e-10 {
                        return Err(ProblemError::ReferenceValueMismatch { value: v, f_star });
                    }
                }
            }
        }
        Ok(ProblemInstance {
            name: self.name,
            dimension: self.dimension,
            value,
            subgradient,
            projection: self.projection,
            reference: self.reference,
            surrogate_progress: self.surrogate_progress,
            f_star: self.f_star,
            surrogate_target: self.surrogate_target,
            theory: self.theory,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_picks_nearest_reference() {
        // Two minimizers straight above and below the origin.
        let refs = ReferenceSolution::Points(vec![
            Point::new(vec![0.0, 1.0]).unwrap(),
            Point::new(vec![0.0, -1.0]).unwrap(),
        ]);
        let x = Point::zeros(2);
        assert_eq!(distance_to_reference(&x, &refs).unwrap(), 1.0);

        let singleton = ReferenceSolution::Points(vec![Point::new(vec![0.0, 1.0]).unwrap()]);
        let at = Point::new(vec![0.0, 1.0]).unwrap();
        assert_eq!(distance_to_reference(&at, &singleton).unwrap(), 0.0);

        let origin = ReferenceSolution::Points(vec![Point::zeros(2)]);
        let p = Point::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(distance_to_reference(&p, &origin).unwrap(), 5.0);
    }

    #[test]
    fn distance_is_order_invariant_and_nonnegative() {
        let a = Point::new(vec![0.3, -0.7]).unwrap();
        let b = Point::new(vec![-1.1, 0.2]).unwrap();
        let fwd = ReferenceSolution::Points(vec![a.clone(), b.clone()]);
        let rev = ReferenceSolution::Points(vec![b, a]);
        let x = Point::new(vec![0.5, 0.5]).unwrap();
        let d1 = distance_to_reference(&x, &fwd).unwrap();
        let d2 = distance_to_reference(&x, &rev).unwrap();
        assert_eq!(d1, d2);
        assert!(d1 >= 0.0);
    }

    #[test]
    fn empty_reference_set_errors() {
        let refs = ReferenceSolution::Points(vec![]);
        let err = distance_to_reference(&Point::zeros(1), &refs).unwrap_err();
        assert!(matches!(err, ProblemError::NoReference));
    }

    #[test]
    fn sign_orbit_distance() {
        let refs = ReferenceSolution::SignSymmetric(Point::new(vec![2.0, 0.0]).unwrap());
        let x = Point::new(vec![-2.0, 0.0]).unwrap();
        assert_eq!(distance_to_reference(&x, &refs).unwrap(), 0.0);
    }

    #[test]
    fn theory_constants_reject_boundary_delta() {
        // delta * (1 + nu) must exceed 1 strictly.
        assert!(TheoryConstants::new(1.0, 1.0, 0.5, 1.0, 1.0).is_err());
        assert!(TheoryConstants::new(1.0, 1.0, 0.51, 1.0, 1.0).is_ok());
        assert!(TheoryConstants::new(0.5, 0.0, 0.7, 1.0, 2.0).is_ok());
        assert!(TheoryConstants::new(1.0, -0.1, 1.0, 1.0, 1.0).is_err());
        assert!(TheoryConstants::new(1.0, 0.0, 1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn tau_is_recomputed() {
        let t = TheoryConstants::new(1.0, 0.0, 1.0, 2.0, 4.0).unwrap();
        assert_eq!(t.tau(), 0.5);
    }

    #[test]
    fn subgradient_norm_consistency() {
        let v = Point::new(vec![3.0, 4.0]).unwrap();
        assert!(SubgradientSample::with_norm(v.clone(), 5.0).is_ok());
        assert!(SubgradientSample::with_norm(v, 5.1).is_err());
    }

    #[test]
    fn builtin_projections_are_idempotent_and_nonexpansive() {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        let projections = [
            Projection::Identity,
            Projection::Nonnegative,
            Projection::Box { lo: vec![-0.5, -1.0, 0.0], hi: vec![0.5, 2.0, 1.0] },
        ];
        for _ in 0..1000 {
            let x = Point::new((0..3).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap();
            let y = Point::new((0..3).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap();
            for projection in &projections {
                let px = projection.apply(&x);
                let py = projection.apply(&y);
                assert!(px.distance(&projection.apply(&px)) <= 1e-12);
                assert!(px.distance(&py) <= x.distance(&y) + 1e-12);
            }
        }
    }

    #[test]
    fn builder_checks_reference_value() {
        let bad = ProblemInstance::builder("norm", 1)
            .value(|x| x.norm())
            .gradient(|x| vec![x[0].signum()])
            .reference(ReferenceSolution::Points(vec![Point::new(vec![1.0]).unwrap()]))
            .f_star(0.0)
            .build();
        assert!(matches!(bad, Err(ProblemError::ReferenceValueMismatch { .. })));
    }
}
