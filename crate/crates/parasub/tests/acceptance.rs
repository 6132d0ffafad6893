//! Acceptance suite: one test per criterion, each printing a pass/fail
//! line (run with `cargo test --test acceptance -- --nocapture` to see all
//! of them).
//!
//! Expected values tagged as derived below were computed from independent
//! oracles (closed-form iterations, finite differences, grid maximization)
//! and frozen here.

use ndarray::Array2;
use parasub::audit::audit_with_tolerance;
use parasub::certificates::{
    constant_certificate, css_gap_bound, diminishing_certificate, geometric_certificate,
    scaled_polyak_certificate,
};
use parasub::metrics::{rate_fit_with, RateClass, RateFitOptions};
use parasub::paracheck::{heb_fit, midpoint_rho, subgradient_rho, SamplingDomain};
use parasub::point::Point;
use parasub::problem::{distance_to_reference, ProblemInstance, TheoryConstants};
use parasub::problems::{
    builtin_instance, initialize_factors, phase_oracle, rmc_oracle, synth_rmc, InitMethod,
    PhaseRetrievalInstance,
};
use parasub::schedule::StepSizeRule;
use parasub::solver::{random_box_point, random_unit_point, run, SolverConfig};
use parasub::RunHistory;

fn verdict(number: u32, name: &str, pass: bool, detail: &str) {
    println!(
        "criterion {number:02} {name}: {} ({detail})",
        if pass { "PASS" } else { "FAIL" }
    );
}

fn sharp10() -> ProblemInstance {
    builtin_instance("sharp_norm").unwrap()
}

fn run_sharp(rule: &StepSizeRule, iters: usize, seed: u64, record_points: bool) -> RunHistory {
    let problem = sharp10();
    let config = SolverConfig { max_iterations: iters, record_points, ..SolverConfig::default() };
    run(&problem, rule, random_unit_point(10, seed), &config).unwrap()
}

/// Central finite differences, the independent oracle for subgradients.
fn fd_gradient(f: &dyn Fn(&Point) -> f64, at: &Point, h: f64) -> Vec<f64> {
    (0..at.len())
        .map(|i| {
            let mut plus = at.as_slice().to_vec();
            let mut minus = at.as_slice().to_vec();
            plus[i] += h;
            minus[i] -= h;
            (f(&Point::new(plus).unwrap()) - f(&Point::new(minus).unwrap())) / (2.0 * h)
        })
        .collect()
}

#[test]
fn criterion_01_scaled_polyak_exact_rate() {
    let start = std::time::Instant::now();
    let rule = StepSizeRule::scaled_polyak(0.0, 4.0).unwrap();
    let history = run_sharp(&rule, 50, 11, false);
    assert_eq!(history.records.len(), 51, "need 51 records for 50 ratios");

    // closed-form iteration: x_{k+1} = (1 - 1/sigma) x_k, ratio 3/4
    let mut worst = 0.0f64;
    for w in 0..50 {
        let d0 = history.records[w].dist.unwrap();
        let d1 = history.records[w + 1].dist.unwrap();
        worst = worst.max((d1 / d0 - 0.75).abs());
    }
    let ratio_ok = worst <= 1e-9;

    // certificate rate in the gamma -> 0 limit equals 3/4
    let theory = *sharp10().theory().unwrap();
    let cert = scaled_polyak_certificate(4.0, 1e-9, &theory).unwrap();
    let limit_ok = (cert.rate - 0.75).abs() <= 1e-6;

    let elapsed = start.elapsed();
    let time_ok = elapsed.as_secs_f64() < 1.0;
    let pass = ratio_ok && limit_ok && time_ok;
    verdict(
        1,
        "scaled-polyak-exact-rate",
        pass,
        &format!(
            "worst ratio error {worst:.2e}, cert rate {:.9}, {elapsed:?}",
            cert.rate
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_02_scaled_polyak_value_gap_bound() {
    let rule = StepSizeRule::scaled_polyak(0.0, 4.0).unwrap();
    let history = run_sharp(&rule, 50, 11, false);
    let dist0 = history.records[0].dist.unwrap();
    let (sigma, gamma, l) = (4.0f64, 0.01f64, 1.0f64);
    let scale = sigma * l * dist0 / (2.0 * sigma * (1.0 - gamma) - 1.0).sqrt();

    let mut violations = 0usize;
    let mut best = f64::INFINITY;
    for r in history.records.iter().filter(|r| r.k >= 1) {
        best = best.min(r.f_value);
        let bound = scale / ((r.k as f64 + 1.0).sqrt());
        if best > bound {
            violations += 1;
        }
    }
    verdict(2, "scaled-polyak-value-gap", violations == 0, &format!("{violations} violations"));
    assert_eq!(violations, 0);
}

#[test]
fn criterion_03_constant_step_envelope() {
    let start = std::time::Instant::now();
    let problem = sharp10();
    let theory = *problem.theory().unwrap();
    let alpha = 0.01;
    let x0 = random_unit_point(10, 4);
    let d0 = distance_to_reference(&x0, problem.reference().unwrap()).unwrap();
    let d0_sq = d0 * d0;

    let cert = constant_certificate(alpha, &theory, d0_sq).unwrap();
    assert!((cert.d_star - 1e-4).abs() < 1e-15, "tau = 1 so D* = alpha^2");

    let config = SolverConfig { max_iterations: 2000, ..SolverConfig::default() };
    let history = run(&problem, &StepSizeRule::constant(alpha).unwrap(), x0, &config).unwrap();
    let mut worst = f64::NEG_INFINITY;
    for r in &history.records {
        let dk_sq = r.dist.unwrap().powi(2);
        let envelope = (cert.q.powi(r.k as i32) * (d0_sq - cert.d_star)).max(alpha * alpha);
        worst = worst.max(dk_sq - cert.d_star - envelope);
    }
    let elapsed = start.elapsed();
    let pass = worst <= 1e-12 && elapsed.as_secs_f64() < 1.0;
    verdict(3, "constant-step-envelope", pass, &format!("worst excess {worst:.2e}, {elapsed:?}"));
    assert!(pass);
}

#[test]
fn criterion_04_constant_step_gap_bound() {
    let problem = sharp10();
    let theory = *problem.theory().unwrap();
    let alpha = 0.01;
    let cert = css_gap_bound(alpha, &theory).unwrap();
    assert_eq!(cert.gap_bound, 2.0 * theory.l() * alpha);

    // rho = 0 puts the theorem's k_min at +inf (the tube radius bounding
    // dist(x_1, X*) is unbounded); substituting the known initial distance
    // for the tube radius in the same expression gives the finite
    // threshold k >= D_0 / alpha^2 that the proof actually uses.
    let x0 = random_unit_point(10, 4);
    let d0 = distance_to_reference(&x0, problem.reference().unwrap()).unwrap();
    let k_min = match cert.k_min_iterations() {
        Some(k) => k as usize,
        None => ((d0 * d0) / (alpha * alpha)).ceil() as usize,
    };

    let config = SolverConfig { max_iterations: k_min + 2000, ..SolverConfig::default() };
    let history = run(&problem, &StepSizeRule::constant(alpha).unwrap(), x0, &config).unwrap();
    let f_star = problem.f_star().unwrap();
    let mut best = f64::INFINITY;
    let mut violations = 0usize;
    let mut checked = 0usize;
    for r in history.records.iter().filter(|r| r.k >= 1) {
        best = best.min(r.f_value);
        if r.k >= k_min {
            checked += 1;
            if best - f_star > cert.gap_bound {
                violations += 1;
            }
        }
    }
    let pass = violations == 0 && checked > 0;
    verdict(
        4,
        "constant-step-gap-bound",
        pass,
        &format!("gap bound {}, k_min {k_min}, {checked} iterations checked", cert.gap_bound),
    );
    assert!(pass);
}

#[test]
fn criterion_05_geometric_envelope() {
    // The geometric certificate needs tau < 1; mu = 0.9 is a valid (not
    // tight) error-bound modulus for the norm objective.
    let problem = sharp10();
    let theory = TheoryConstants::new(1.0, 0.0, 1.0, 0.9, 1.0).unwrap();
    let x0 = random_unit_point(10, 4);
    let dist0 = distance_to_reference(&x0, problem.reference().unwrap()).unwrap();
    let lambda = 0.06;
    let cert = geometric_certificate(lambda, 0.4, &theory, dist0).unwrap();

    let rule = StepSizeRule::geometric(lambda, cert.q).unwrap();
    let config = SolverConfig { max_iterations: 200, ..SolverConfig::default() };
    let history = run(&problem, &rule, x0, &config).unwrap();
    let mut violations = 0usize;
    let mut worst = f64::NEG_INFINITY;
    for r in &history.records {
        let excess = r.dist.unwrap() - cert.a * cert.q.powi(r.k as i32);
        worst = worst.max(excess);
        if excess > 0.0 {
            violations += 1;
        }
    }
    verdict(
        5,
        "geometric-envelope",
        violations == 0,
        &format!("q {:.6}, A {:.4}, worst excess {worst:.2e}", cert.q, cert.a),
    );
    assert_eq!(violations, 0);
}

#[test]
fn criterion_06_diminishing_slope() {
    // Certificate-valid diminishing run surviving the whole window:
    // lambda = 3, beta = 60 >= beta_min, dist0 = 1 <= min((2 lambda)^1,
    // A beta^(-1/2)).
    let start = std::time::Instant::now();
    let problem = sharp10();
    let theory = *problem.theory().unwrap();
    let (lambda, r) = (3.0, 0.5);
    let cert = diminishing_certificate(lambda, r, &theory).unwrap();
    let beta = 60.0;
    assert!(beta >= cert.beta_min, "beta must be certificate-valid");
    let x0 = random_unit_point(10, 4);
    let dist0 = distance_to_reference(&x0, problem.reference().unwrap()).unwrap();
    assert!(dist0 <= (2.0 * lambda).min(cert.a * beta.powf(-0.5)));

    let rule = StepSizeRule::diminishing(lambda, beta, r).unwrap();
    let config = SolverConfig { max_iterations: 5000, ..SolverConfig::default() };
    let history = run(&problem, &rule, x0, &config).unwrap();

    // companion check: the certified envelope holds at every iteration
    let mut env_violations = 0usize;
    for rec in &history.records {
        if rec.dist.unwrap() > cert.a / (rec.k as f64 + beta).powf(0.5) {
            env_violations += 1;
        }
    }
    assert_eq!(env_violations, 0, "certified envelope must hold");

    // companion check: the decay ceiling has the predicted k^{-1/2} slope
    // (block maxima over the window smooth out the sawtooth dips)
    let window: Vec<f64> =
        history.records[500..=5000].iter().map(|rec| rec.dist.unwrap()).collect();
    let blocks: Vec<f64> =
        window.chunks(50).map(|c| c.iter().cloned().fold(0.0f64, f64::max)).collect();
    let log_k: Vec<f64> =
        (0..blocks.len()).map(|i| ((500 + 50 * i + 25) as f64).ln()).collect();
    let log_b: Vec<f64> = blocks.iter().map(|b| b.ln()).collect();
    let n = log_k.len() as f64;
    let mx = log_k.iter().sum::<f64>() / n;
    let my = log_b.iter().sum::<f64>() / n;
    let sxx: f64 = log_k.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = log_k.iter().zip(&log_b).map(|(x, y)| (x - mx) * (y - my)).sum();
    let ceiling_slope = sxy / sxx;
    assert!(
        (ceiling_slope + 0.5).abs() <= 0.15,
        "ceiling slope {ceiling_slope} should match -r*delta = -0.5"
    );

    // the criterion itself: a least-squares rate fit on the raw dist
    // column over the window
    let fit = rate_fit_with(
        &window,
        RateFitOptions { transient_fraction: 0.0, ..Default::default() },
    )
    .unwrap();
    let elapsed = start.elapsed();
    let (literal_pass, measured) = match fit.class {
        RateClass::Sublinear { exponent } => {
            ((exponent + 0.5).abs() <= 0.15, format!("sublinear exponent {exponent:.4}"))
        }
        RateClass::Geometric { rate } => (false, format!("geometric rate {rate:.6}")),
        RateClass::Finite => (false, "finite".to_string()),
    };
    verdict(
        6,
        "diminishing-slope",
        literal_pass && elapsed.as_secs_f64() < 5.0,
        &format!(
            "raw-dist fit: {measured} (residual {:.3}); ceiling slope {ceiling_slope:.4}; {elapsed:?}",
            fit.fit_residual
        ),
    );
    // The raw dist column of an exactly radial sharp objective has no
    // log-log slope to fit: the normalized-step recurrence locks onto the
    // step-size drift (remainders follow |dist - alpha| through repeated
    // near-cancellations), producing dips below the fitter's 1e-15 finite
    // threshold and, for most parameter choices, exact annihilation before
    // iteration 5000. The certified envelope and its slope (checked above)
    // do hold; the literal raw-sequence fit cannot return "sublinear".
    assert!(
        literal_pass,
        "raw-dist rate fit returned {measured}; the decay ceiling slope {ceiling_slope:.4} \
         matches the certified -0.5 but the raw sequence's resonance dips defeat a \
         least-squares log-log fit"
    );
}

#[test]
fn criterion_07_inequality_audit_all_rules() {
    let problem = sharp10();
    let theory = TheoryConstants::new(1.0, 0.0, 1.0, 0.9, 1.0).unwrap();
    let geo = geometric_certificate(0.06, 0.4, &theory, 1.0).unwrap();
    let rules = [
        StepSizeRule::constant(0.01).unwrap(),
        StepSizeRule::diminishing(1.0, 7.0, 0.5).unwrap(),
        StepSizeRule::square_summable(0.5).unwrap(),
        StepSizeRule::geometric(0.06, geo.q).unwrap(),
        StepSizeRule::polyak(0.0).unwrap(),
        StepSizeRule::scaled_polyak(0.0, 4.0).unwrap(),
    ];
    let mut all_pass = true;
    let mut detail = String::new();
    for rule in &rules {
        let config = SolverConfig {
            max_iterations: 400,
            record_points: true,
            ..SolverConfig::default()
        };
        let history = run(&problem, rule, random_unit_point(10, 21), &config).unwrap();
        let report = audit_with_tolerance(&history, &problem, 1e-10).unwrap();
        if !report.pass() {
            all_pass = false;
        }
        detail.push_str(&format!(
            "{}: max violation {:.1e}; ",
            rule.name(),
            report.max_violation()
        ));
    }
    verdict(7, "inequality-audit", all_pass, detail.trim_end_matches("; "));
    assert!(all_pass);
}

#[test]
fn criterion_08_paraconvexity_estimators() {
    let start = std::time::Instant::now();
    let box1 = SamplingDomain::symmetric(1.0, 1).unwrap().with_seed(7);
    let mut clauses: Vec<(String, bool)> = Vec::new();

    // rho(-x^2): midpoint sees 1/2, first-order form sees 1 (exact ratios)
    let neg_square = |x: &Point| -x[0] * x[0];
    let neg_square_grad = |x: &Point| Point::new(vec![-2.0 * x[0]]).unwrap();
    let mid = midpoint_rho(&neg_square, &box1, 1.0).unwrap().rho_hat;
    clauses.push((format!("midpoint(-x^2) = {mid:.6} in [0.49, 0.51]"), (0.49..=0.51).contains(&mid)));
    let sub = subgradient_rho(&neg_square, &neg_square_grad, &box1, 1.0).unwrap().rho_hat;
    clauses.push((format!("subgradient(-x^2) = {sub:.6} in [0.99, 1.01]"), (0.99..=1.01).contains(&sub)));

    // convex objectives must show no violation at all
    let abs = |x: &Point| x[0].abs();
    let abs_grad = |x: &Point| Point::new(vec![x[0].signum()]).unwrap();
    let square = |x: &Point| x[0] * x[0];
    let square_grad = |x: &Point| Point::new(vec![2.0 * x[0]]).unwrap();
    let mut convex_worst = 0.0f64;
    convex_worst = convex_worst.max(midpoint_rho(&abs, &box1, 1.0).unwrap().rho_hat);
    convex_worst = convex_worst.max(subgradient_rho(&abs, &abs_grad, &box1, 1.0).unwrap().rho_hat);
    convex_worst = convex_worst.max(midpoint_rho(&square, &box1, 1.0).unwrap().rho_hat);
    convex_worst =
        convex_worst.max(subgradient_rho(&square, &square_grad, &box1, 1.0).unwrap().rho_hat);
    clauses.push((format!("convex |x|, x^2 worst = {convex_worst:.2e} <= 1e-9"), convex_worst <= 1e-9));

    // the spliced power objective plus its convex perturbation
    let para1d = builtin_instance("para1d").unwrap();
    let perturbed = move |x: &Point| para1d.value(x) + x[0].abs().powf(1.5);
    let pert = midpoint_rho(&perturbed, &box1, 0.5).unwrap().rho_hat;
    clauses.push((format!("midpoint(para1d + |x|^1.5) = {pert:.2e} <= 1e-6"), pert <= 1e-6));

    // the saddle objective's first-order constant
    let saddle = builtin_instance("saddle2d").unwrap();
    let saddle2 = saddle.clone();
    let saddle_value = move |x: &Point| saddle.value(x);
    let saddle_grad = move |x: &Point| saddle2.subgradient(x).vector().clone();
    let box2 = SamplingDomain::symmetric(1.5, 2).unwrap().with_seed(7);
    let srho = subgradient_rho(&saddle_value, &saddle_grad, &box2, 1.0).unwrap().rho_hat;
    clauses.push((format!("subgradient(saddle2d) = {srho:.8} >= 2"), srho >= 2.0));

    let elapsed = start.elapsed();
    let pass = clauses.iter().all(|(_, ok)| *ok) && elapsed.as_secs_f64() < 5.0;
    let detail: Vec<String> = clauses
        .iter()
        .map(|(text, ok)| format!("{} [{}]", text, if *ok { "ok" } else { "FAIL" }))
        .collect();
    verdict(8, "paraconvexity-estimators", pass, &format!("{}; {elapsed:?}", detail.join("; ")));
    // The estimators are maxima of sampled difference quotients, hence
    // strict lower bounds on the paraconvexity constant. For the saddle
    // objective that constant is the curvature floor 2, approached
    // quadratically in the pair separation but attained by no finite pair;
    // the separation floor that keeps the convex clauses above at the
    // 1e-9 bar leaves the sampled maximum ~1e-5 short of 2.
    for (text, ok) in &clauses {
        assert!(*ok, "clause failed: {text}");
    }
    assert!(elapsed.as_secs_f64() < 5.0);
}

#[test]
fn criterion_09_heb_fit() {
    let sharp = sharp10();
    let domain = SamplingDomain::symmetric(1.0, 10).unwrap().with_seed(5);
    let fit = heb_fit(&sharp, &domain).unwrap();
    let sharp_ok = (fit.delta_hat - 1.0).abs() <= 0.02 && (fit.mu_hat - 1.0).abs() <= 0.02;

    let quad = builtin_instance("quadratic_norm").unwrap();
    let qfit = heb_fit(&quad, &domain).unwrap();
    let quad_ok = (qfit.delta_hat - 0.5).abs() <= 0.02;

    let pass = sharp_ok && quad_ok;
    verdict(
        9,
        "heb-fit",
        pass,
        &format!(
            "sharp (mu, delta) = ({:.4}, {:.4}); quadratic delta = {:.4}",
            fit.mu_hat, fit.delta_hat, qfit.delta_hat
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_10_saddle_geometry() {
    let problem = builtin_instance("saddle2d").unwrap();

    // Newton on the gradient system from a coarse grid, with a
    // finite-difference Jacobian: an independent stationary-point finder.
    let gradient = |p: &Point| problem.subgradient(p).vector().clone();
    let mut found: Vec<Vec<f64>> = Vec::new();
    for i in 0..7 {
        for j in 0..7 {
            let mut x = vec![-1.5 + 0.5 * i as f64, -1.5 + 0.5 * j as f64];
            for _ in 0..60 {
                let p = Point::new(x.clone()).unwrap();
                let g = gradient(&p);
                if g.norm() <= 1e-12 {
                    break;
                }
                // 2x2 central-difference Jacobian
                let h = 1e-6;
                let mut jac = [[0.0f64; 2]; 2];
                for c in 0..2 {
                    let mut plus = x.clone();
                    let mut minus = x.clone();
                    plus[c] += h;
                    minus[c] -= h;
                    let gp = gradient(&Point::new(plus).unwrap());
                    let gm = gradient(&Point::new(minus).unwrap());
                    for r in 0..2 {
                        jac[r][c] = (gp[r] - gm[r]) / (2.0 * h);
                    }
                }
                let det = jac[0][0] * jac[1][1] - jac[0][1] * jac[1][0];
                if det.abs() < 1e-12 {
                    break;
                }
                let dx = (jac[1][1] * g[0] - jac[0][1] * g[1]) / det;
                let dy = (jac[0][0] * g[1] - jac[1][0] * g[0]) / det;
                x[0] -= dx;
                x[1] -= dy;
            }
            let p = Point::new(x.clone()).unwrap();
            if gradient(&p).norm() <= 1e-10 && !found.iter().any(|f| {
                ((f[0] - x[0]).powi(2) + (f[1] - x[1]).powi(2)).sqrt() < 1e-4
            }) {
                found.push(x);
            }
        }
    }
    found.sort_by(|a, b| a[1].total_cmp(&b[1]));
    let expected = [[0.0, -1.0], [0.0, 0.0], [0.0, 1.0]];
    let points_ok = found.len() == 3
        && found.iter().zip(&expected).all(|(f, e)| {
            ((f[0] - e[0]).powi(2) + (f[1] - e[1]).powi(2)).sqrt() <= 1e-6
        });

    let saddle_dist =
        distance_to_reference(&Point::zeros(2), problem.reference().unwrap()).unwrap();
    let dist_ok = saddle_dist == 1.0;

    let pass = points_ok && dist_ok;
    verdict(
        10,
        "saddle-geometry",
        pass,
        &format!("stationary points {found:?}, saddle distance {saddle_dist}"),
    );
    assert!(pass);
}

#[test]
fn criterion_11_subgradient_finite_difference_check() {
    // every shipped oracle, checked at 100 random points away from kinks
    let mut failures = Vec::new();

    let check = |name: &str,
                 problem: &ProblemInstance,
                 differentiable: &dyn Fn(&Point) -> bool,
                 lo: f64,
                 hi: f64,
                 failures: &mut Vec<String>| {
        let mut checked = 0;
        let mut seed = 0u64;
        while checked < 100 {
            seed += 1;
            assert!(seed < 40_000, "{name}: could not find differentiable points");
            let x = random_box_point(problem.dimension(), lo, hi, 0xFD00 + seed);
            if !differentiable(&x) {
                continue;
            }
            let analytic = problem.subgradient(&x);
            let fd = fd_gradient(&|p| problem.value(p), &x, 1e-6);
            let err: f64 = analytic
                .vector()
                .as_slice()
                .iter()
                .zip(&fd)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt();
            let rel = err / analytic.norm().max(1.0);
            if rel > 1e-5 {
                failures.push(format!("{name} rel err {rel:.2e} at seed {seed}"));
                return;
            }
            checked += 1;
        }
    };

    let sharp = sharp10();
    check("sharp_norm", &sharp, &|x| x.norm() > 1e-2, -2.0, 2.0, &mut failures);

    let quad = builtin_instance("quadratic_norm").unwrap();
    check("quadratic_norm", &quad, &|_| true, -2.0, 2.0, &mut failures);

    let para = builtin_instance("para1d").unwrap();
    check(
        "para1d",
        &para,
        &|x| (x[0].abs() - 1.0).abs() > 1e-3,
        -2.0,
        2.0,
        &mut failures,
    );

    let saddle = builtin_instance("saddle2d").unwrap();
    check("saddle2d", &saddle, &|_| true, -1.5, 1.5, &mut failures);

    let phase_inst = PhaseRetrievalInstance::gaussian(20, 5, 3);
    let phase = phase_oracle(&phase_inst);
    let (a, b) = phase_inst.measurements();
    let phase_diff = |x: &Point| {
        (0..20).all(|i| {
            let dot: f64 = (0..5).map(|j| a[[i, j]] * x[j]).sum();
            (dot * dot - b[i]).abs() > 1e-3
        })
    };
    check("phase_retrieval", &phase, &phase_diff, -2.0, 2.0, &mut failures);

    for (name, nonneg) in [("rmc", false), ("rnmf", true)] {
        let inst = synth_rmc(6, 5, 2, 0.8, 0.0, 1.0, 9).unwrap();
        let inst = parasub::problems::RobustFactorizationInstance::new(
            inst.data().clone(),
            inst.mask().clone(),
            2,
            nonneg,
            inst.ground_truth().cloned(),
        )
        .unwrap();
        let problem = rmc_oracle(&inst);
        let shape = inst.shape();
        let data = inst.data().clone();
        let mask = inst.mask().clone();
        let differentiable = move |p: &Point| {
            let (u, v) = shape.unpack(p);
            let uv = u.dot(&v);
            mask.indexed_iter()
                .all(|((i, j), &m)| m == 0.0 || (uv[[i, j]] - data[[i, j]]).abs() > 1e-3)
        };
        // interior points only, so the orthant constraint is inactive
        check(name, &problem, &differentiable, 0.1, 1.5, &mut failures);
    }

    let pass = failures.is_empty();
    let detail =
        if pass { "7 oracles x 100 points".to_string() } else { failures.join("; ") };
    verdict(11, "finite-difference-check", pass, &detail);
    assert!(pass, "{failures:?}");
}

#[test]
fn criterion_12_synthetic_recovery() {
    let start = std::time::Instant::now();
    let seed = 0u64;
    let inst = synth_rmc(60, 50, 3, 0.7, 0.0, 1.0, seed).unwrap();
    let (u, v) =
        initialize_factors(inst.data(), inst.mask(), 3, InitMethod::Random, false, seed).unwrap();
    let problem = rmc_oracle(&inst);
    let x0 = inst.shape().pack(&u, &v).unwrap();
    let config = SolverConfig { max_iterations: 3000, ..SolverConfig::default() };

    let scaled = run(
        &problem,
        &StepSizeRule::scaled_polyak(0.0, 4.0).unwrap(),
        x0.clone(),
        &config,
    )
    .unwrap();
    let diminishing = run(
        &problem,
        &StepSizeRule::diminishing(1.0, 1.0, 0.5).unwrap(),
        x0,
        &config,
    )
    .unwrap();

    // dist column carries |X0 - UV|_F / |X0|_F for synthetic instances
    let rel_err = scaled.last().dist.unwrap();
    let ordering_ok = scaled.last().f_value <= diminishing.last().f_value;
    let elapsed = start.elapsed();
    let pass = rel_err <= 5e-2 && ordering_ok && elapsed.as_secs_f64() < 60.0;
    verdict(
        12,
        "synthetic-recovery",
        pass,
        &format!(
            "relative error {rel_err:.2e}, losses {:.3e} (scaled polyak) vs {:.3e} (diminishing), {elapsed:?}",
            scaled.last().f_value,
            diminishing.last().f_value
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_13_io_round_trips() {
    use parasub::io::csv::{read_matrix_csv, write_matrix_csv};
    use parasub::io::movielens::parse_movielens;
    use parasub::io::pgm::{read_pgm, write_pgm, PgmFormat, PgmImage};

    // CSV: shortest round-trip decimals reproduce bits
    let matrix = Array2::from_shape_fn((4, 3), |(i, j)| {
        ((i * 3 + j) as f64 / 7.0).sin() * 1e3 + 1.0 / 3.0
    });
    let mut buf = Vec::new();
    write_matrix_csv(&matrix, &mut buf).unwrap();
    let csv_ok = read_matrix_csv(buf.as_slice()).unwrap() == matrix;

    // PGM: write/read is pixel- and byte-exact in both formats
    let mut pgm_ok = true;
    for format in [PgmFormat::Ascii, PgmFormat::Binary] {
        let image = PgmImage {
            width: 5,
            height: 3,
            maxval: 255,
            pixels: vec![0, 1, 2, 3, 4, 250, 251, 252, 253, 254, 10, 20, 30, 40, 50],
            format,
        };
        let mut bytes = Vec::new();
        write_pgm(&image, &mut bytes).unwrap();
        let back = read_pgm(bytes.as_slice()).unwrap();
        let mut bytes2 = Vec::new();
        write_pgm(&back, &mut bytes2).unwrap();
        pgm_ok &= back == image && bytes == bytes2;
    }

    // MovieLens: documented format parses, malformed lines carry numbers,
    // identical seeds give identical splits
    let data = parse_movielens("196\t242\t3\t881250949\n1\t2\t5\t0\n".as_bytes()).unwrap();
    let parse_ok = data.ratings[0].user == 195 && data.ratings[0].item == 241;
    let line_ok = matches!(
        parse_movielens("196\t242\t3\t881250949\nbad line\n".as_bytes()),
        Err(parasub::io::IoError::Malformed { line: 2, .. })
    );
    let (a_train, a_test) = data.split(0.8, 99);
    let (b_train, b_test) = data.split(0.8, 99);
    let split_ok = a_train == b_train && a_test == b_test;

    let pass = csv_ok && pgm_ok && parse_ok && line_ok && split_ok;
    verdict(
        13,
        "io-round-trips",
        pass,
        &format!("csv {csv_ok}, pgm {pgm_ok}, movielens parse {parse_ok} line {line_ok} split {split_ok}"),
    );
    assert!(pass);
}
