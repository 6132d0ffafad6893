//! Numerical verification of paraconvexity and error-bound constants.
//!
//! Everything here is a sampling-based estimate: the estimators return
//! lower bounds on the true constants, so a report means "no violation
//! found at the sampled resolution", never a certificate of global
//! validity.
//!
//! Two estimators recover the paraconvexity constant `rho`:
//!
//! * [`midpoint_rho`] checks the midpoint inequality
//!   `h((x+y)/2) <= h(x)/2 + h(y)/2 + (rho/2) |x-y|^{1+nu}`
//!   (for continuous functions the midpoint form is equivalent to the full
//!   inequality, so fixing `lambda = 1/2` loses nothing);
//! * [`subgradient_rho`] checks the first-order form
//!   `h(y) >= h(x) + <zeta(x), y - x> - rho |y-x|^{1+nu}`.
//!
//! Both maximize the observed ratio over sampled pairs and then sharpen the
//! maximum with a deterministic pattern search. Pairs closer than a floor
//! proportional to the box diagonal are excluded: below that separation the
//! ratio numerator is dominated by rounding noise of order
//! `eps * |h| / |x-y|^{1+nu}`, which would register as spurious positive
//! curvature on exactly convex inputs. The refinement is a fixed function
//! of the box alone, so enlarging `pair_count` (with the same seed) can
//! only grow the estimate.

use std::sync::Arc;

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::linalg::smallest_eigenvalue;
use crate::point::Point;
use crate::problem::{distance_to_reference, ProblemInstance};

/// Minimum pair separation, relative to the box diagonal.
const SEP_REL: f64 = 1e-3;

/// Refinement is skipped above this dimension (the pattern search would
/// dominate runtime without improving the estimate much).
const REFINE_MAX_DIM: usize = 32;

#[derive(Debug, Error)]
pub enum ParacheckError {
    #[error("oracle returned non-finite value {value} at {at:?}")]
    OracleNonFinite { at: Vec<f64>, value: f64 },
    #[error("nu must lie in (0, 1]")]
    BadNu,
    #[error("sampling domain invalid: {0}")]
    BadDomain(&'static str),
    #[error("only {usable} usable samples, need at least {needed}")]
    TooFewSamples { usable: usize, needed: usize },
    #[error("heb_fit requires a reference solution and f_star")]
    MissingGroundTruth,
    #[error("combine({mode}) expects {expected} oracle(s), got {got}")]
    WrongArity { mode: &'static str, expected: &'static str, got: usize },
    #[error("combine requires a shared nu; downgrade to a common exponent first")]
    MismatchedNu,
    #[error("invalid constant: {0}")]
    BadConstant(&'static str),
}

/// Axis-aligned sampling box with a pair budget and a seed.
#[derive(Debug, Clone)]
pub struct SamplingDomain {
    lo: Vec<f64>,
    hi: Vec<f64>,
    pair_count: usize,
    seed: u64,
}

impl SamplingDomain {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self, ParacheckError> {
        if lo.len() != hi.len() || lo.is_empty() {
            return Err(ParacheckError::BadDomain("bounds must be nonempty and equal length"));
        }
        for (l, h) in lo.iter().zip(&hi) {
            if !(l.is_finite() && h.is_finite() && l < h) {
                return Err(ParacheckError::BadDomain("each coordinate needs lo < hi, finite"));
            }
        }
        Ok(SamplingDomain { lo, hi, pair_count: 2000, seed: 0 })
    }

    /// The box `[-half_width, half_width]^dimension`.
    pub fn symmetric(half_width: f64, dimension: usize) -> Result<Self, ParacheckError> {
        SamplingDomain::new(vec![-half_width; dimension], vec![half_width; dimension])
    }

    pub fn with_pair_count(mut self, pair_count: usize) -> Self {
        self.pair_count = pair_count.max(1);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn dimension(&self) -> usize {
        self.lo.len()
    }

    pub fn pair_count(&self) -> usize {
        self.pair_count
    }

    fn diagonal(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| (h - l) * (h - l))
            .sum::<f64>()
            .sqrt()
    }

    fn radius(&self) -> f64 {
        self.diagonal() / 2.0
    }

    pub(crate) fn sample_point(&self, rng: &mut ChaCha8Rng) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(&l, &h)| rng.random_range(l..h))
            .collect()
    }

    fn clamp(&self, x: &mut [f64]) {
        for (v, (l, h)) in x.iter_mut().zip(self.lo.iter().zip(&self.hi)) {
            *v = v.clamp(*l, *h);
        }
    }

    fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(v, (l, h))| *v >= *l && *v <= *h)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorMethod {
    Midpoint,
    Subgradient,
}

/// Result of a `rho` estimation: the largest ratio observed, clamped below
/// at zero, and the pair achieving it.
#[derive(Debug, Clone)]
pub struct ParaEstimate {
    pub rho_hat: f64,
    /// `(x, y, lambda)` achieving the estimate; `lambda` is fixed at 1/2.
    pub worst_pair: (Point, Point, f64),
    pub method: EstimatorMethod,
}

fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}

/// Pair-ratio callback shared by the estimators; `None` marks a pair the
/// estimator must skip (below the separation floor).
type RatioFn<'a> = dyn FnMut(&[f64], &[f64]) -> Result<Option<f64>, ParacheckError> + 'a;

/// Shared estimator driver: maximizes `ratio(x, y)` over seeded pairs and
/// then over the deterministic refinement trajectory.
fn maximize_ratio(
    ratio: &mut RatioFn,
    domain: &SamplingDomain,
) -> Result<(f64, Vec<f64>, Vec<f64>), ParacheckError> {
    let sep_min = SEP_REL * domain.diagonal();
    let mut rng = ChaCha8Rng::seed_from_u64(domain.seed);
    let mut best = f64::NEG_INFINITY;
    let mut best_pair = (vec![0.0; domain.dimension()], vec![0.0; domain.dimension()]);

    for _ in 0..domain.pair_count {
        let x = domain.sample_point(&mut rng);
        let y = domain.sample_point(&mut rng);
        if euclid(&x, &y) < sep_min {
            continue;
        }
        if let Some(r) = ratio(&x, &y)? {
            if r > best {
                best = r;
                best_pair = (x, y);
            }
        }
    }

    if domain.dimension() <= REFINE_MAX_DIM {
        refine_ratio(ratio, domain, sep_min, &mut best, &mut best_pair)?;
    }
    Ok((best, best_pair.0, best_pair.1))
}

/// Pattern search over pairs parameterized as `(center, offset)`, from
/// starts fixed by the box alone. Moves: shift the center or the offset
/// along a coordinate, contract or expand the offset. The offset may not
/// shrink the pair below the separation floor.
fn refine_ratio(
    ratio: &mut RatioFn,
    domain: &SamplingDomain,
    sep_min: f64,
    best: &mut f64,
    best_pair: &mut (Vec<f64>, Vec<f64>),
) -> Result<(), ParacheckError> {
    let n = domain.dimension();
    let span: Vec<f64> = domain.lo.iter().zip(&domain.hi).map(|(l, h)| h - l).collect();
    let center: Vec<f64> = domain.lo.iter().zip(&domain.hi).map(|(l, h)| 0.5 * (l + h)).collect();

    let mut starts: Vec<(Vec<f64>, Vec<f64>)> = Vec::new();
    let eighth: Vec<f64> = span.iter().map(|s| s / 8.0).collect();
    starts.push((center.clone(), eighth.clone()));
    let shifted_up: Vec<f64> =
        center.iter().zip(&span).map(|(c, s)| c + 0.25 * s).collect();
    let shifted_down: Vec<f64> =
        center.iter().zip(&span).map(|(c, s)| c - 0.25 * s).collect();
    starts.push((shifted_up, span.iter().map(|s| s / 16.0).collect()));
    starts.push((shifted_down, span.iter().map(|s| s / 16.0).collect()));

    type Scored = Option<(f64, Vec<f64>, Vec<f64>)>;
    let mut eval = |c: &[f64], d: &[f64]| -> Result<Scored, ParacheckError> {
        let mut x: Vec<f64> = c.iter().zip(d).map(|(ci, di)| ci - di).collect();
        let mut y: Vec<f64> = c.iter().zip(d).map(|(ci, di)| ci + di).collect();
        domain.clamp(&mut x);
        domain.clamp(&mut y);
        debug_assert!(domain.contains(&x) && domain.contains(&y));
        if euclid(&x, &y) < sep_min {
            return Ok(None);
        }
        Ok(ratio(&x, &y)?.map(|r| (r, x, y)))
    };

    for (mut c, mut d) in starts {
        let mut step: Vec<f64> = span.iter().map(|s| s / 8.0).collect();
        let mut current = match eval(&c, &d)? {
            Some((r, x, y)) => {
                if r > *best {
                    *best = r;
                    *best_pair = (x, y);
                }
                r
            }
            None => f64::NEG_INFINITY,
        };
        let mut budget = 4000usize;
        loop {
            let mut improved = false;
            // coordinate moves on center and offset
            for i in 0..n {
                for target in 0..2 {
                    for sign in [1.0f64, -1.0] {
                        if budget == 0 {
                            break;
                        }
                        budget -= 1;
                        let mut c2 = c.clone();
                        let mut d2 = d.clone();
                        if target == 0 {
                            c2[i] += sign * step[i];
                        } else {
                            d2[i] += sign * step[i];
                        }
                        if let Some((r, x, y)) = eval(&c2, &d2)? {
                            if r > current {
                                current = r;
                                c = c2;
                                d = d2;
                                improved = true;
                                if r > *best {
                                    *best = r;
                                    *best_pair = (x, y);
                                }
                            }
                        }
                    }
                }
            }
            // contract / expand the whole offset
            for scale in [0.5f64, 2.0] {
                if budget == 0 {
                    break;
                }
                budget -= 1;
                let d2: Vec<f64> = d.iter().map(|v| v * scale).collect();
                if let Some((r, x, y)) = eval(&c, &d2)? {
                    if r > current {
                        current = r;
                        d = d2;
                        improved = true;
                        if r > *best {
                            *best = r;
                            *best_pair = (x, y);
                        }
                    }
                }
            }
            if budget == 0 {
                break;
            }
            if !improved {
                let max_step = step.iter().fold(0.0f64, |m, s| m.max(*s));
                if max_step < sep_min / 8.0 {
                    break;
                }
                for s in &mut step {
                    *s *= 0.5;
                }
            }
        }
    }
    Ok(())
}

fn check_finite(at: &[f64], value: f64) -> Result<f64, ParacheckError> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ParacheckError::OracleNonFinite { at: at.to_vec(), value })
    }
}

/// Estimates `rho` from the midpoint inequality: the maximum over pairs of
/// `2 (h((x+y)/2) - h(x)/2 - h(y)/2) / |x-y|^{1+nu}`, clamped below at 0.
pub fn midpoint_rho(
    oracle: &dyn Fn(&Point) -> f64,
    domain: &SamplingDomain,
    nu: f64,
) -> Result<ParaEstimate, ParacheckError> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(ParacheckError::BadNu);
    }
    let mut ratio = |x: &[f64], y: &[f64]| -> Result<Option<f64>, ParacheckError> {
        let mid: Vec<f64> = x.iter().zip(y).map(|(a, b)| 0.5 * (a + b)).collect();
        let hx = check_finite(x, oracle(&Point::new(x.to_vec()).expect("in box")))?;
        let hy = check_finite(y, oracle(&Point::new(y.to_vec()).expect("in box")))?;
        let hm_value = oracle(&Point::new(mid.clone()).expect("in box"));
        let hm = check_finite(&mid, hm_value)?;
        let denom = euclid(x, y).powf(1.0 + nu);
        Ok(Some(2.0 * (hm - 0.5 * hx - 0.5 * hy) / denom))
    };
    let (raw, x, y) = maximize_ratio(&mut ratio, domain)?;
    Ok(ParaEstimate {
        rho_hat: raw.max(0.0),
        worst_pair: (
            Point::new(x).expect("in box"),
            Point::new(y).expect("in box"),
            0.5,
        ),
        method: EstimatorMethod::Midpoint,
    })
}

/// Estimates `rho` from the first-order inequality: the maximum over pairs
/// of `(h(x) + <zeta(x), y-x> - h(y)) / |y-x|^{1+nu}`, clamped below at 0.
/// Both orientations of every pair are scored.
pub fn subgradient_rho(
    value: &dyn Fn(&Point) -> f64,
    subgradient: &dyn Fn(&Point) -> Point,
    domain: &SamplingDomain,
    nu: f64,
) -> Result<ParaEstimate, ParacheckError> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(ParacheckError::BadNu);
    }
    let one_sided = |x: &[f64], y: &[f64]| -> Result<f64, ParacheckError> {
        let px = Point::new(x.to_vec()).expect("in box");
        let py = Point::new(y.to_vec()).expect("in box");
        let hx = check_finite(x, value(&px))?;
        let hy = check_finite(y, value(&py))?;
        let zeta = subgradient(&px);
        let inner: f64 = zeta
            .as_slice()
            .iter()
            .zip(x.iter().zip(y))
            .map(|(z, (a, b))| z * (b - a))
            .sum();
        let denom = euclid(x, y).powf(1.0 + nu);
        Ok((hx + inner - hy) / denom)
    };
    let mut ratio = |x: &[f64], y: &[f64]| -> Result<Option<f64>, ParacheckError> {
        Ok(Some(one_sided(x, y)?.max(one_sided(y, x)?)))
    };
    let (raw, x, y) = maximize_ratio(&mut ratio, domain)?;
    Ok(ParaEstimate {
        rho_hat: raw.max(0.0),
        worst_pair: (
            Point::new(x).expect("in box"),
            Point::new(y).expect("in box"),
            0.5,
        ),
        method: EstimatorMethod::Subgradient,
    })
}

/// Result of [`paramonotone_check`] / [`hessian_criterion`].
#[derive(Debug, Clone)]
pub struct CriterionReport {
    pub pass: bool,
    /// Most negative slack (paramonotone) or smallest eigenvalue seen.
    pub worst: f64,
    pub worst_at: Point,
    pub samples_checked: usize,
}

/// Checks `<zeta(y) - zeta(x), y - x> >= -C |x-y|^{1+nu}` over sampled
/// pairs, within tolerance 1e-9.
pub fn paramonotone_check(
    subgradient: &dyn Fn(&Point) -> Point,
    domain: &SamplingDomain,
    nu: f64,
    c: f64,
) -> Result<CriterionReport, ParacheckError> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(ParacheckError::BadNu);
    }
    if c < 0.0 {
        return Err(ParacheckError::BadConstant("paramonotone constant C must be nonnegative"));
    }
    let sep_min = SEP_REL * domain.diagonal();
    let mut rng = ChaCha8Rng::seed_from_u64(domain.seed);
    let mut worst = f64::INFINITY;
    let mut worst_at = vec![0.0; domain.dimension()];
    let mut checked = 0usize;
    for _ in 0..domain.pair_count {
        let x = domain.sample_point(&mut rng);
        let y = domain.sample_point(&mut rng);
        if euclid(&x, &y) < sep_min {
            continue;
        }
        let px = Point::new(x.clone()).expect("in box");
        let py = Point::new(y.clone()).expect("in box");
        let zx = subgradient(&px);
        let zy = subgradient(&py);
        let inner: f64 = zy
            .as_slice()
            .iter()
            .zip(zx.as_slice())
            .zip(y.iter().zip(&x))
            .map(|((a, b), (p, q))| (a - b) * (p - q))
            .sum();
        let slack = inner + c * euclid(&x, &y).powf(1.0 + nu);
        if slack < worst {
            worst = slack;
            worst_at = x;
        }
        checked += 1;
    }
    Ok(CriterionReport {
        pass: worst >= -1e-9,
        worst,
        worst_at: Point::new(worst_at).expect("in box"),
        samples_checked: checked,
    })
}

/// Second-order criterion: at each sampled `x != 0` the matrix
/// `H(x) + rho (1+nu) / |x|^{3-nu} * (|x|^2 I - (1-nu) x x^T)` must be
/// positive semidefinite (smallest eigenvalue above -1e-9, the symmetric
/// eigensolver noise floor at this scale). Samples inside a ball of radius
/// 1e-8 around the origin are skipped.
pub fn hessian_criterion(
    hessian: &dyn Fn(&Point) -> Array2<f64>,
    domain: &SamplingDomain,
    nu: f64,
    rho: f64,
) -> Result<CriterionReport, ParacheckError> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(ParacheckError::BadNu);
    }
    if rho < 0.0 {
        return Err(ParacheckError::BadConstant("rho must be nonnegative"));
    }
    let n = domain.dimension();
    let mut rng = ChaCha8Rng::seed_from_u64(domain.seed);
    let mut worst = f64::INFINITY;
    let mut worst_at = vec![0.0; n];
    let mut checked = 0usize;
    for _ in 0..domain.pair_count {
        let x = domain.sample_point(&mut rng);
        let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm < 1e-8 {
            continue; // the criterion excludes the origin
        }
        let px = Point::new(x.clone()).expect("in box");
        let mut matrix = hessian(&px);
        let coeff = rho * (1.0 + nu) / norm.powf(3.0 - nu);
        for i in 0..n {
            for j in 0..n {
                let correction = if i == j { norm * norm } else { 0.0 };
                matrix[[i, j]] += coeff * (correction - (1.0 - nu) * x[i] * x[j]);
            }
        }
        let lambda_min = smallest_eigenvalue(&matrix);
        if lambda_min < worst {
            worst = lambda_min;
            worst_at = x;
        }
        checked += 1;
    }
    Ok(CriterionReport {
        pass: worst >= -1e-9,
        worst,
        worst_at: Point::new(worst_at).expect("in box"),
        samples_checked: checked,
    })
}

/// A fitted Hölderian error bound `mu_hat * dist^{1/delta_hat} <= f - f*`,
/// conservative on the fitted sample by construction.
#[derive(Debug, Clone, Copy)]
pub struct HebFit {
    pub mu_hat: f64,
    pub delta_hat: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    pub sample_range: (f64, f64),
}

/// Fits `(mu, delta)` by least squares on `log(f - f*)` against
/// `log dist(x, X*)`: the slope estimates `1/delta`, and `mu_hat` is the
/// smallest observed ratio `(f - f*) / dist^{1/delta_hat}`, so the fitted
/// bound holds at every fitted sample.
pub fn heb_fit(problem: &ProblemInstance, domain: &SamplingDomain) -> Result<HebFit, ParacheckError> {
    let reference = problem.reference().ok_or(ParacheckError::MissingGroundTruth)?;
    let f_star = problem.f_star().ok_or(ParacheckError::MissingGroundTruth)?;
    if domain.dimension() != problem.dimension() {
        return Err(ParacheckError::BadDomain("domain dimension does not match problem"));
    }
    let radius = domain.radius();
    let mut rng = ChaCha8Rng::seed_from_u64(domain.seed);
    let mut log_d = Vec::new();
    let mut log_g = Vec::new();
    let mut dists = Vec::new();
    let mut gaps = Vec::new();
    for _ in 0..domain.pair_count {
        let x = Point::new(domain.sample_point(&mut rng)).expect("in box");
        let dist = distance_to_reference(&x, reference).expect("reference nonempty");
        if !(1e-6..=radius).contains(&dist) {
            continue;
        }
        let gap = check_finite(x.as_slice(), problem.value(&x))? - f_star;
        if gap <= 1e-14 {
            continue; // logarithm would be dominated by noise
        }
        log_d.push(dist.ln());
        log_g.push(gap.ln());
        dists.push(dist);
        gaps.push(gap);
    }
    if log_d.len() < 10 {
        return Err(ParacheckError::TooFewSamples { usable: log_d.len(), needed: 10 });
    }

    let n = log_d.len() as f64;
    let mean_d = log_d.iter().sum::<f64>() / n;
    let mean_g = log_g.iter().sum::<f64>() / n;
    let sxx: f64 = log_d.iter().map(|d| (d - mean_d) * (d - mean_d)).sum();
    let sxy: f64 = log_d.iter().zip(&log_g).map(|(d, g)| (d - mean_d) * (g - mean_g)).sum();
    let slope = sxy / sxx;
    let intercept = mean_g - slope * mean_d;
    let residual = (log_d
        .iter()
        .zip(&log_g)
        .map(|(d, g)| {
            let e = g - (slope * d + intercept);
            e * e
        })
        .sum::<f64>()
        / n)
        .sqrt();

    let delta_hat = (1.0 / slope).clamp(1e-6, 1.0);
    let mu_hat = dists
        .iter()
        .zip(&gaps)
        .map(|(d, g)| g / d.powf(1.0 / delta_hat))
        .fold(f64::INFINITY, f64::min);
    let (dist_min, dist_max) = dists
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &d| (lo.min(d), hi.max(d)));
    Ok(HebFit { mu_hat, delta_hat, residual, sample_range: (dist_min, dist_max) })
}

/// A value/subgradient oracle pair carrying its paraconvexity constants,
/// the unit the calculus below composes.
#[derive(Clone)]
pub struct ParaconvexOracle {
    pub value: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
    pub subgradient: Arc<dyn Fn(&Point) -> Point + Send + Sync>,
    pub nu: f64,
    pub rho: f64,
}

impl ParaconvexOracle {
    pub fn new(
        value: impl Fn(&Point) -> f64 + Send + Sync + 'static,
        subgradient: impl Fn(&Point) -> Point + Send + Sync + 'static,
        nu: f64,
        rho: f64,
    ) -> Result<Self, ParacheckError> {
        if !(nu > 0.0 && nu <= 1.0) {
            return Err(ParacheckError::BadNu);
        }
        if !(rho.is_finite() && rho >= 0.0) {
            return Err(ParacheckError::BadConstant("rho must be a finite nonnegative real"));
        }
        Ok(ParaconvexOracle { value: Arc::new(value), subgradient: Arc::new(subgradient), nu, rho })
    }
}

#[derive(Debug, Clone, Copy)]
pub enum CombineMode {
    /// Sum of the oracles; constants add.
    Sum,
    /// Positive rescale; the constant scales by the same factor.
    Scale(f64),
    /// Pointwise supremum; the constant is the supremum of the inputs'.
    /// The subgradient follows the active branch of largest index.
    Sup,
    /// Exponent downgrade `nu -> theta` on a set of diameter `K`:
    /// the constant becomes `rho * K^{nu - theta}`.
    Downgrade { theta: f64, diameter: f64 },
}

/// Composes oracles under the paraconvexity calculus, propagating
/// `(nu, rho)` per the rule for each mode.
pub fn combine(
    parts: &[ParaconvexOracle],
    mode: CombineMode,
) -> Result<ParaconvexOracle, ParacheckError> {
    match mode {
        CombineMode::Sum => {
            if parts.is_empty() {
                return Err(ParacheckError::WrongArity { mode: "sum", expected: ">= 1", got: 0 });
            }
            let nu = parts[0].nu;
            if parts.iter().any(|p| p.nu != nu) {
                return Err(ParacheckError::MismatchedNu);
            }
            let rho = parts.iter().map(|p| p.rho).sum();
            let values: Vec<_> = parts.iter().map(|p| Arc::clone(&p.value)).collect();
            let grads: Vec<_> = parts.iter().map(|p| Arc::clone(&p.subgradient)).collect();
            ParaconvexOracle::new(
                move |x: &Point| values.iter().map(|f| f(x)).sum(),
                move |x: &Point| {
                    let mut total = vec![0.0; x.len()];
                    for g in &grads {
                        for (t, v) in total.iter_mut().zip(g(x).as_slice()) {
                            *t += v;
                        }
                    }
                    Point::new(total).expect("finite")
                },
                nu,
                rho,
            )
        }
        CombineMode::Scale(factor) => {
            if parts.len() != 1 {
                return Err(ParacheckError::WrongArity {
                    mode: "scale",
                    expected: "exactly 1",
                    got: parts.len(),
                });
            }
            if !(factor.is_finite() && factor > 0.0) {
                return Err(ParacheckError::BadConstant("scale factor must be positive"));
            }
            let part = parts[0].clone();
            let value = Arc::clone(&part.value);
            let grad = Arc::clone(&part.subgradient);
            ParaconvexOracle::new(
                move |x: &Point| factor * value(x),
                move |x: &Point| {
                    Point::new(grad(x).as_slice().iter().map(|v| factor * v).collect())
                        .expect("finite")
                },
                part.nu,
                factor * part.rho,
            )
        }
        CombineMode::Sup => {
            if parts.is_empty() {
                return Err(ParacheckError::WrongArity { mode: "sup", expected: ">= 1", got: 0 });
            }
            let nu = parts[0].nu;
            if parts.iter().any(|p| p.nu != nu) {
                return Err(ParacheckError::MismatchedNu);
            }
            let rho = parts.iter().map(|p| p.rho).fold(0.0f64, f64::max);
            let values: Vec<_> = parts.iter().map(|p| Arc::clone(&p.value)).collect();
            let grads: Vec<_> = parts.iter().map(|p| Arc::clone(&p.subgradient)).collect();
            let values_for_grad = values.clone();
            ParaconvexOracle::new(
                move |x: &Point| values.iter().map(|f| f(x)).fold(f64::NEG_INFINITY, f64::max),
                move |x: &Point| {
                    // active branch of largest index
                    let mut active = 0usize;
                    let mut best = f64::NEG_INFINITY;
                    for (i, f) in values_for_grad.iter().enumerate() {
                        let v = f(x);
                        if v >= best {
                            best = v;
                            active = i;
                        }
                    }
                    grads[active](x)
                },
                nu,
                rho,
            )
        }
        CombineMode::Downgrade { theta, diameter } => {
            if parts.len() != 1 {
                return Err(ParacheckError::WrongArity {
                    mode: "downgrade",
                    expected: "exactly 1",
                    got: parts.len(),
                });
            }
            let part = parts[0].clone();
            if !(theta > 0.0 && theta < part.nu) {
                return Err(ParacheckError::BadConstant("downgrade needs 0 < theta < nu"));
            }
            if !(diameter.is_finite() && diameter > 0.0) {
                return Err(ParacheckError::BadConstant("downgrade needs a positive diameter"));
            }
            let rho = part.rho * diameter.powf(part.nu - theta);
            let value = Arc::clone(&part.value);
            let grad = Arc::clone(&part.subgradient);
            ParaconvexOracle::new(
                move |x: &Point| value(x),
                move |x: &Point| grad(x),
                theta,
                rho,
            )
        }
    }
}

/// Paraconvexity constant of a composite `phi(g(x))` with `phi` convex and
/// `L0`-Lipschitz and the Jacobian of `g` Hölder continuous of order `nu`
/// with constant `L1`: `rho = 2 L0 L1 / (nu + 1)`.
pub fn composite_rho(l0: f64, l1: f64, nu: f64) -> Result<f64, ParacheckError> {
    if !(nu > 0.0 && nu <= 1.0) {
        return Err(ParacheckError::BadNu);
    }
    if !(l0 > 0.0 && l1 > 0.0 && l0.is_finite() && l1.is_finite()) {
        return Err(ParacheckError::BadConstant("Lipschitz constants must be positive"));
    }
    Ok(2.0 * l0 * l1 / (nu + 1.0))
}
