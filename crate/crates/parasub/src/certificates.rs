//! Closed-form convergence certificates for the projected subgradient
//! method on paraconvex objectives with a Hölderian error bound.
//!
//! All arithmetic here is over the extended reals: with `rho = 0` (the
//! convex limit) the saddle-free tube is the whole space, every
//! `(mu/2rho)`-powered bound evaluates to `+inf`, and admissibility checks
//! that compare a step size against such a bound pass automatically.
//! Quantities overflowing the representable range are reported as `+inf`,
//! never NaN.
//!
//! The constants follow the symbol set of [`TheoryConstants`]: the
//! paraconvexity exponent `nu` and constant `rho`, the error-bound order
//! `delta` and modulus `mu`, the subgradient bound `L`, and the derived
//! ratio `tau = mu / L`.

use thiserror::Error;

use crate::problem::TheoryConstants;
use crate::schedule::StepSizeRule;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CertificateError {
    #[error("step too large for the constant-rate certificate: alpha {alpha} >= alpha_max {alpha_max}")]
    StepTooLarge { alpha: f64, alpha_max: f64 },
    #[error("constant-step gap bound requires 0 < alpha < {alpha_max}, got {alpha}")]
    GapBoundStep { alpha: f64, alpha_max: f64 },
    #[error("diminishing certificate requires r in (0, 1) with 1 - 2r(1 - delta) > 0")]
    DiminishingExponent,
    #[error("power-decay certificate requires 1/(1+nu) < delta < 1")]
    DecayDelta,
    #[error("geometric certificate requires delta = 1")]
    GeometricDelta,
    #[error("geometric certificate requires tau < 1, got tau = {tau}")]
    GeometricTau { tau: f64 },
    #[error("geometric certificate requires gamma in ({lo}, 0.5), got {gamma}")]
    GeometricGamma { gamma: f64, lo: f64 },
    #[error("geometric certificate requires lambda < {lambda_max}, got {lambda}")]
    GeometricLambda { lambda: f64, lambda_max: f64 },
    #[error("geometric certificate requires dist0 <= {dist0_max}, got {dist0}")]
    GeometricDist0 { dist0: f64, dist0_max: f64 },
    #[error("scaled-Polyak certificate requires sigma > 1/2, got {sigma}")]
    PolyakSigma { sigma: f64 },
    #[error("scaled-Polyak certificate requires gamma in (0, {gamma_max}), got {gamma}")]
    PolyakGamma { gamma: f64, gamma_max: f64 },
    #[error("the Q-linear scaled-Polyak rate is defined for delta = 1 only")]
    PolyakDelta,
    #[error("no closed-form rate certificate for the {rule} rule")]
    NoCertificate { rule: &'static str },
    #[error("certificate produced an out-of-range constant: {0}")]
    Internal(&'static str),
}

/// `(gamma * mu / rho) ^ (delta / (delta(1+nu) - 1))`: the radius of the
/// tube around the solution set that contains no extraneous stationary
/// points. `gamma = 1` gives the saddle-exclusion radius; `rho = 0` gives
/// an infinite tube (convex case).
pub fn tube_radius(gamma: f64, theory: &TheoryConstants) -> f64 {
    debug_assert!(gamma > 0.0 && gamma <= 1.0);
    if theory.rho() == 0.0 {
        return f64::INFINITY;
    }
    let exponent = theory.delta() / (theory.delta() * (1.0 + theory.nu()) - 1.0);
    (gamma * theory.mu() / theory.rho()).powf(exponent)
}

/// Local modulus `tau_x = tau * dist^(1/delta - 1)`, which lies in `[0, 1]`
/// for points inside the unit tube. Outside the tube the same expression is
/// still returned; values that land above 1 by at most 1e-9 (eigenvalue of
/// floating-point noise at the tube boundary) are clamped back to 1.
pub fn tau_x(theory: &TheoryConstants, dist: f64) -> f64 {
    debug_assert!(dist >= 0.0);
    let exponent = 1.0 / theory.delta() - 1.0;
    let raw = theory.tau() * dist.powf(exponent);
    if raw > 1.0 && raw <= 1.0 + 1e-9 {
        1.0
    } else {
        raw
    }
}

/// Certificate for the constant rule: `D_k = dist^2(x_k, X*)` decays
/// linearly with ratio `q` onto the plateau `D_* = (alpha/tau)^(2 delta)`,
/// enveloped by `D_k - D_* <= max(q^k (D_0 - D_*), alpha^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantCert {
    pub d_star: f64,
    /// Contraction ratio; equals 1 exactly in the convex limit `rho = 0`,
    /// where the envelope degenerates to `D_0 - D_*`.
    pub q: f64,
    /// `script_D^2 = max(D_0, alpha^2 + D_*)`, a bound on every `D_k`.
    pub script_d_sq: f64,
    pub alpha_max: f64,
}

/// Certificate for the diminishing rule `alpha_k = lambda (k+beta)^(-r)`:
/// `dist(x_k, X*) <= A / (k + beta)^(delta r)` once `beta >= beta_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiminishingCert {
    pub a: f64,
    pub beta_min: f64,
}

/// Certificate for the prescribed power-decay schedule available when
/// `delta < 1`: it fixes `r = 1/(2(1-delta))` and the matching `lambda`,
/// achieving `dist(x_k, X*) <= A / (k + beta)^(delta r)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecayCert {
    pub r: f64,
    pub a: f64,
    pub lambda: f64,
    pub beta_min: f64,
}

/// Certificate for the geometric rule `alpha_k = lambda q^k` at `delta = 1`:
/// `dist(x_k, X*) <= A q^k`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometricCert {
    pub q: f64,
    pub a: f64,
    /// Admissible open interval for `gamma`.
    pub gamma_range: (f64, f64),
    pub dist0_max: f64,
    pub lambda_max: f64,
}

/// Certificate for the scaled Polyak rule at `delta = 1`: Q-linear
/// convergence of `dist(x_k, X*)` with the stated rate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledPolyakCert {
    pub rate: f64,
    pub gamma_max: f64,
}

/// Certificate for the constant-step value gap: `f*_k - f* <= gap_bound`
/// for every `k >= k_min`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CssCert {
    pub gap_bound: f64,
    /// Iteration threshold; `+inf` in the convex limit `rho = 0`, where the
    /// tube radius bounding `dist(x_1, X*)` is unbounded.
    pub k_min: f64,
}

impl CssCert {
    /// `k_min` rounded up to an iteration count, `None` when infinite.
    pub fn k_min_iterations(&self) -> Option<u64> {
        if self.k_min.is_finite() {
            Some(self.k_min.ceil() as u64)
        } else {
            None
        }
    }
}

/// All certificates under one roof, tagged by the rule they describe.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RateCertificate {
    Constant(ConstantCert),
    Diminishing(DiminishingCert),
    Decay(DecayCert),
    Geometric(GeometricCert),
    ScaledPolyak(ScaledPolyakCert),
    Css(CssCert),
}

/// Largest admissible constant step for [`constant_certificate`].
pub fn constant_alpha_max(theory: &TheoryConstants) -> f64 {
    let tau = theory.tau();
    let delta = theory.delta();
    let denom = delta * (theory.nu() + 1.0) - 1.0;
    let ratio = half_ratio(theory); // mu / (2 rho), +inf when rho = 0
    let first = (2.0 * delta / tau) * ratio.powf((2.0 * delta - 1.0) / denom);
    let second =
        tau / (tau.powf(2.0 * delta) + 1.0).powf(1.0 / (2.0 * delta)) * ratio.powf(1.0 / denom);
    first.min(second).min(1.0)
}

/// Certificate for the constant rule. `d0` is the initial squared distance
/// `D_0 = dist^2(x_0, X*)`.
pub fn constant_certificate(
    alpha: f64,
    theory: &TheoryConstants,
    d0: f64,
) -> Result<ConstantCert, CertificateError> {
    let alpha_max = constant_alpha_max(theory);
    if !(alpha > 0.0 && alpha < alpha_max) {
        return Err(CertificateError::StepTooLarge { alpha, alpha_max });
    }
    let tau = theory.tau();
    let delta = theory.delta();
    let denom = delta * (1.0 + theory.nu()) - 1.0;
    let d_star = (alpha / tau).powf(2.0 * delta);
    let contraction = (alpha * tau / (2.0 * delta))
        * (2.0 * theory.rho() / theory.mu()).powf((2.0 * delta - 1.0) / denom);
    let q = 1.0 - contraction;
    // q rounds to 1 exactly in the convex limit rho = 0 and when the
    // contraction term falls below working precision; the envelope stays
    // valid either way because a larger q only loosens it.
    if !(q > 0.0 && q <= 1.0) {
        return Err(CertificateError::Internal("contraction ratio q outside (0, 1]"));
    }
    let script_d_sq = d0.max(alpha * alpha + d_star);
    Ok(ConstantCert { d_star, q, script_d_sq, alpha_max })
}

/// Value-gap bound for the constant rule: `f*_k - f* <= 2 L alpha` for all
/// `k >= (1/alpha^2) (mu/2rho) ^ (2 delta / (delta(1+nu) - 1))`.
pub fn css_gap_bound(alpha: f64, theory: &TheoryConstants) -> Result<CssCert, CertificateError> {
    let denom = theory.delta() * (1.0 + theory.nu()) - 1.0;
    let ratio = half_ratio(theory);
    let alpha_max = 1.0f64.min(theory.tau().min(1.0) * ratio.powf(1.0 / denom));
    if !(alpha > 0.0 && alpha < alpha_max) {
        return Err(CertificateError::GapBoundStep { alpha, alpha_max });
    }
    let gap_bound = 2.0 * theory.l() * alpha;
    let k_min = ratio.powf(2.0 * theory.delta() / denom) / (alpha * alpha);
    Ok(CssCert { gap_bound, k_min })
}

/// Certificate for a diminishing rule with the caller's `lambda` and `r`.
/// The caller's `beta` must be checked against `beta_min`; the certificate
/// reports the threshold rather than silently replacing the parameter.
pub fn diminishing_certificate(
    lambda: f64,
    r: f64,
    theory: &TheoryConstants,
) -> Result<DiminishingCert, CertificateError> {
    let tau = theory.tau();
    let delta = theory.delta();
    if !(r > 0.0 && r < 1.0) || 1.0 - 2.0 * r * (1.0 - delta) <= 0.0 {
        return Err(CertificateError::DiminishingExponent);
    }
    let a = (2.0f64).powf(r * delta)
        * ((2.0 * lambda / tau).powf(2.0 * delta) + lambda * lambda).sqrt();
    let first = (4.0 * r * delta * a.powf((2.0 * delta - 1.0) / delta) / (lambda * tau))
        .powf(1.0 / (1.0 - 2.0 * r * (1.0 - delta)));
    let denom = delta * (1.0 + theory.nu()) - 1.0;
    let second = a.powf(1.0 / (delta * r))
        * (2.0 * theory.rho() / theory.mu()).powf(1.0 / (r * denom));
    Ok(DiminishingCert { a, beta_min: first.max(second) })
}

/// Certificate for the prescribed power-decay schedule (only available for
/// `1/(1+nu) < delta < 1`). Returns the schedule parameters themselves:
/// `alpha_k = lambda (k + beta)^(-r)` with `beta >= beta_min`.
pub fn decay_certificate(theory: &TheoryConstants) -> Result<DecayCert, CertificateError> {
    let delta = theory.delta();
    if delta >= 1.0 {
        return Err(CertificateError::DecayDelta);
    }
    let tau = theory.tau();
    let r = 1.0 / (2.0 * (1.0 - delta));
    let a = (8.0 * delta * r / (tau * tau)).powf(delta * r);
    let lambda = 0.5 * tau * a.powf(1.0 / delta);
    let denom = delta * (1.0 + theory.nu()) - 1.0;
    let second = a.powf(1.0 / (delta * r))
        * (2.0 * theory.rho() / theory.mu()).powf(2.0 * (1.0 - delta) / denom);
    Ok(DecayCert { r, a, lambda, beta_min: (4.0 * delta * r).max(second) })
}

/// Certificate for the geometric rule `alpha_k = lambda q^k` with the `q`
/// prescribed by the theory: requires `delta = 1`, `tau < 1` and `gamma`
/// inside the admissible window.
pub fn geometric_certificate(
    lambda: f64,
    gamma: f64,
    theory: &TheoryConstants,
    dist0: f64,
) -> Result<GeometricCert, CertificateError> {
    if theory.delta() != 1.0 {
        return Err(CertificateError::GeometricDelta);
    }
    let tau = theory.tau();
    if tau >= 1.0 {
        return Err(CertificateError::GeometricTau { tau });
    }
    let lo = ((5.0 * tau * tau - 4.0) / (2.0 * tau * tau)).max(0.0);
    if !(gamma > lo && gamma < 0.5) {
        return Err(CertificateError::GeometricGamma { gamma, lo });
    }
    let lambda_max = 0.5 * tau * half_ratio(theory).powf(1.0 / theory.nu());
    if !(lambda > 0.0 && lambda < lambda_max) {
        return Err(CertificateError::GeometricLambda { lambda, lambda_max });
    }
    let q = (1.0 - (1.0 - 2.0 * gamma) * tau * tau / 4.0).sqrt();
    // gamma > lo guarantees tau^2 >= 4(1 - q^2), so the root is real.
    let disc = (tau * tau - 4.0 * (1.0 - q * q)).sqrt();
    let dist0_max = 2.0 * lambda / (tau - disc);
    if dist0 > dist0_max {
        return Err(CertificateError::GeometricDist0 { dist0, dist0_max });
    }
    let a = (2.0 * lambda / tau).max(dist0);
    Ok(GeometricCert { q, a, gamma_range: (lo, 0.5), dist0_max, lambda_max })
}

/// Q-linear rate certificate for the scaled Polyak rule at `delta = 1`.
pub fn scaled_polyak_certificate(
    sigma: f64,
    gamma: f64,
    theory: &TheoryConstants,
) -> Result<ScaledPolyakCert, CertificateError> {
    if sigma <= 0.5 {
        return Err(CertificateError::PolyakSigma { sigma });
    }
    let gamma_max = (2.0 * sigma - 1.0) / (2.0 * sigma);
    if !(gamma > 0.0 && gamma < gamma_max) {
        return Err(CertificateError::PolyakGamma { gamma, gamma_max });
    }
    if theory.delta() != 1.0 {
        return Err(CertificateError::PolyakDelta);
    }
    let tau = theory.tau();
    let rate = (1.0 - (2.0 * sigma * (1.0 - gamma) - 1.0) * tau * tau / (sigma * sigma)).sqrt();
    if !(0.0..1.0).contains(&rate) {
        return Err(CertificateError::Internal("Q-linear rate outside [0, 1)"));
    }
    Ok(ScaledPolyakCert { rate, gamma_max })
}

/// Dispatches a step-size rule to its certificate. `gamma` is the tube
/// parameter the run was initialized in and `dist0` the initial distance to
/// the solution set (used as `D_0 = dist0^2` for the constant rule).
pub fn rate_certificate(
    rule: &StepSizeRule,
    theory: &TheoryConstants,
    gamma: f64,
    dist0: f64,
) -> Result<RateCertificate, CertificateError> {
    match *rule {
        StepSizeRule::Constant { alpha } => {
            constant_certificate(alpha, theory, dist0 * dist0).map(RateCertificate::Constant)
        }
        StepSizeRule::Diminishing { lambda, r, .. } => {
            diminishing_certificate(lambda, r, theory).map(RateCertificate::Diminishing)
        }
        StepSizeRule::Geometric { lambda, .. } => {
            geometric_certificate(lambda, gamma, theory, dist0).map(RateCertificate::Geometric)
        }
        StepSizeRule::Polyak { .. } => {
            scaled_polyak_certificate(1.0, gamma, theory).map(RateCertificate::ScaledPolyak)
        }
        StepSizeRule::ScaledPolyak { sigma, .. } => {
            scaled_polyak_certificate(sigma, gamma, theory).map(RateCertificate::ScaledPolyak)
        }
        StepSizeRule::SquareSummable { .. } => {
            Err(CertificateError::NoCertificate { rule: "square_summable" })
        }
    }
}

/// `mu / (2 rho)` over the extended reals: `+inf` when `rho = 0`.
fn half_ratio(theory: &TheoryConstants) -> f64 {
    if theory.rho() == 0.0 {
        f64::INFINITY
    } else {
        theory.mu() / (2.0 * theory.rho())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn theory(nu: f64, rho: f64, delta: f64, mu: f64, l: f64) -> TheoryConstants {
        TheoryConstants::new(nu, rho, delta, mu, l).unwrap()
    }

    #[test]
    fn tube_radius_examples() {
        // (gamma mu / rho) ^ (delta / (delta(1+nu)-1))
        let t = theory(1.0, 1.0, 1.0, 2.0, 2.0);
        assert_eq!(tube_radius(1.0, &t), 2.0);
        let t = theory(1.0, 1.0, 1.0, 1.0, 1.0);
        assert_eq!(tube_radius(0.5, &t), 0.5);
        let convex = theory(1.0, 0.0, 1.0, 1.0, 1.0);
        assert_eq!(tube_radius(1.0, &convex), f64::INFINITY);
    }

    #[test]
    fn tau_x_examples() {
        let t = theory(1.0, 1.0, 1.0, 0.3, 1.0);
        assert_eq!(tau_x(&t, 7.0), 0.3); // delta = 1 is distance-free
        let t = theory(1.0, 1.0, 0.8, 0.5, 1.0);
        assert_eq!(tau_x(&t, 0.0), 0.0);
        let got = tau_x(&t, 0.25);
        assert!((got - 0.5 * 0.25f64.powf(0.25)).abs() < 1e-15);
        assert!((got - 0.3536).abs() < 1e-4);
    }

    #[test]
    fn constant_certificate_examples() {
        // mu = 2 rho makes the (mu/2rho)-powers equal one.
        let t = theory(1.0, 1.0, 1.0, 2.0, 4.0); // tau = 0.5
        let cert = constant_certificate(0.1, &t, 1.0).unwrap();
        assert!((cert.q - 0.975).abs() < 1e-15);
        assert!((cert.d_star - 0.04).abs() < 1e-15);

        let t1 = theory(1.0, 0.5, 1.0, 1.0, 1.0); // tau = 1, mu = 2 rho
        let cert = constant_certificate(0.01, &t1, 1.0).unwrap();
        assert!((cert.d_star - 1e-4).abs() < 1e-18);

        let am = constant_alpha_max(&t1);
        let err = constant_certificate(am * 1.01, &t1, 1.0).unwrap_err();
        assert!(matches!(err, CertificateError::StepTooLarge { .. }));
    }

    #[test]
    fn constant_certificate_convex_limit_has_q_one() {
        let t = theory(1.0, 0.0, 1.0, 1.0, 1.0);
        let cert = constant_certificate(0.01, &t, 1.0).unwrap();
        assert_eq!(cert.q, 1.0);
        assert_eq!(cert.alpha_max, 1.0);
    }

    #[test]
    fn css_gap_bound_examples() {
        let t = theory(1.0, 0.5, 1.0, 1.0, 1.0); // mu = 2 rho, L = 1
        let cert = css_gap_bound(0.01, &t).unwrap();
        assert!((cert.gap_bound - 0.02).abs() < 1e-15);
        let cert = css_gap_bound(0.1, &t).unwrap();
        assert_eq!(cert.k_min_iterations(), Some(100));
        assert!(matches!(css_gap_bound(2.0, &t), Err(CertificateError::GapBoundStep { .. })));
    }

    #[test]
    fn decay_certificate_example() {
        let t = theory(1.0, 0.5, 0.75, 1.0, 1.0);
        let cert = decay_certificate(&t).unwrap();
        assert_eq!(cert.r, 2.0);
        assert!((cert.a - 12.0f64.powf(1.5)).abs() < 1e-9);
        assert!((cert.a - 41.569).abs() < 1e-3);
    }

    #[test]
    fn geometric_certificate_example() {
        let t = theory(1.0, 0.0, 1.0, 0.5, 1.0); // tau = 0.5, convex
        let cert = geometric_certificate(0.05, 0.4, &t, 0.1).unwrap();
        assert!((cert.q - (1.0f64 - 0.2 * 0.25 / 4.0).sqrt()).abs() < 1e-15);
        assert!((cert.q - 0.99373).abs() < 1e-5);
        // tau = 1 leaves no admissible gamma
        let sharp = theory(1.0, 0.0, 1.0, 1.0, 1.0);
        assert!(matches!(
            geometric_certificate(0.05, 0.4, &sharp, 0.1),
            Err(CertificateError::GeometricTau { .. })
        ));
    }

    #[test]
    fn scaled_polyak_limit_rate() {
        let t = theory(1.0, 0.0, 1.0, 1.0, 1.0); // tau = 1
        let cert = scaled_polyak_certificate(4.0, 1e-9, &t).unwrap();
        assert!((cert.rate - 0.75).abs() < 1e-6);
        assert!(matches!(
            scaled_polyak_certificate(0.5, 0.1, &t),
            Err(CertificateError::PolyakSigma { .. })
        ));
        assert!(matches!(
            scaled_polyak_certificate(4.0, 0.9, &t),
            Err(CertificateError::PolyakGamma { .. })
        ));
    }

    #[test]
    fn rate_certificate_dispatch() {
        let t = theory(1.0, 0.0, 1.0, 0.9, 1.0);
        let rule = StepSizeRule::geometric(0.05, 0.9).unwrap();
        assert!(matches!(
            rate_certificate(&rule, &t, 0.4, 0.5),
            Ok(RateCertificate::Geometric(_))
        ));
        let rule = StepSizeRule::square_summable(1.0).unwrap();
        assert!(matches!(
            rate_certificate(&rule, &t, 0.4, 0.5),
            Err(CertificateError::NoCertificate { .. })
        ));
        let rule = StepSizeRule::polyak(0.0).unwrap();
        assert!(matches!(
            rate_certificate(&rule, &t, 0.25, 0.5),
            Ok(RateCertificate::ScaledPolyak(_))
        ));
    }

    proptest! {
        // Admissible draws keep the certified ratios inside (0, 1).
        #[test]
        fn constant_q_in_unit_interval(
            nu in 0.1..1.0f64,
            rho in 1e-3..5.0f64,
            delta_frac in 0.05..0.95f64,
            mu in 0.1..5.0f64,
            l_scale in 1.0..20.0f64,
            alpha_frac in 0.01..0.99f64,
            d0 in 0.0..10.0f64,
        ) {
            // delta strictly between 1/(1+nu) and 1
            let lo = 1.0 / (1.0 + nu);
            let delta = lo + delta_frac * (1.0 - lo);
            let l = mu * l_scale; // tau <= 1
            let t = theory(nu, rho, delta, mu, l);
            let alpha = alpha_frac * constant_alpha_max(&t).min(1e6);
            if alpha > 0.0 && alpha.is_finite() {
                let cert = constant_certificate(alpha, &t, d0).unwrap();
                // q rounds up to 1 when the contraction term falls below
                // working precision (extreme exponents), never past it
                prop_assert!(cert.q > 0.0 && cert.q <= 1.0);
                prop_assert!(cert.d_star > 0.0 && cert.d_star.is_finite());
            }
        }

        // Away from extreme exponents the contraction is strict.
        #[test]
        fn constant_q_contracts_for_moderate_constants(
            nu in 0.5..1.0f64,
            ratio in 0.5..2.0f64,
            alpha_frac in 0.1..0.9f64,
        ) {
            let mu = 1.0;
            let rho = mu / (2.0 * ratio);
            let t = theory(nu, rho, 1.0, mu, 2.0 * mu); // tau = 0.5
            let alpha = alpha_frac * constant_alpha_max(&t);
            let cert = constant_certificate(alpha, &t, 1.0).unwrap();
            prop_assert!(cert.q > 0.0 && cert.q < 1.0);
        }

        #[test]
        fn scaled_polyak_rate_in_unit_interval(
            sigma in 0.51..20.0f64,
            gamma_frac in 0.01..0.99f64,
            tau in 0.01..1.0f64,
        ) {
            let gamma = gamma_frac * (2.0 * sigma - 1.0) / (2.0 * sigma);
            let t = theory(1.0, 0.0, 1.0, tau, 1.0);
            let cert = scaled_polyak_certificate(sigma, gamma, &t).unwrap();
            prop_assert!(cert.rate > 0.0 && cert.rate < 1.0);
        }

        // tau^2 - 4(1 - q^2) stays nonnegative across the admissible gamma
        // window, so the geometric dist0 bound is always well defined.
        #[test]
        fn geometric_discriminant_nonnegative(
            tau in 0.05..0.999f64,
            gamma_frac in 0.001..0.999f64,
        ) {
            let lo = ((5.0 * tau * tau - 4.0) / (2.0 * tau * tau)).max(0.0);
            let gamma = lo + gamma_frac * (0.5 - lo);
            let t = theory(1.0, 0.0, 1.0, tau, 1.0);
            let cert = geometric_certificate(1e-3, gamma, &t, 0.0).unwrap();
            let disc = tau * tau - 4.0 * (1.0 - cert.q * cert.q);
            prop_assert!(disc >= -1e-15);
            prop_assert!(cert.q > 0.0 && cert.q < 1.0);
        }
    }
}
