//! The four subcommands behind the `parasub` binary: `solve`, `certify`,
//! `bench` and `recover`. Each consumes a [`RunConfig`] and writes
//! plot-ready CSV plus flat key=value reports into the output directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::audit::{audit, LSource};
use crate::certificates::{
    css_gap_bound, decay_certificate, rate_certificate, tube_radius, RateCertificate,
};
use crate::history::RunHistory;
use crate::io::config::RunConfig;
use crate::io::csv::{read_matrix_csv_path, write_matrix_csv_path};
use crate::io::movielens::parse_movielens_path;
use crate::io::pgm::{read_pgm_path, write_pgm_path, PgmImage};
use crate::io::IoError;
use crate::metrics::{psnr_snr, rmse};
use crate::paracheck::{heb_fit, midpoint_rho, subgradient_rho, SamplingDomain};
use crate::point::Point;
use crate::problem::{ProblemInstance, TheoryConstants};
use crate::problems::{
    builtin_instance, initialize_factors, rmc_oracle, synth_rmc, InitMethod,
    PhaseRetrievalInstance, RobustFactorizationInstance,
};
use crate::problems::{phase_oracle, quadratic_norm_instance, sharp_norm_instance};
use crate::schedule::StepSizeRule;
use crate::solver::{random_unit_point, run, SolverConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Solve,
    Certify,
    Bench,
    Recover,
}

impl std::str::FromStr for Command {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "solve" => Ok(Command::Solve),
            "certify" => Ok(Command::Certify),
            "bench" => Ok(Command::Bench),
            "recover" => Ok(Command::Recover),
            other => Err(format!("unknown command: {other}")),
        }
    }
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(#[from] IoError),
    #[error("{0}")]
    Problem(#[from] crate::problem::ProblemError),
    #[error("{0}")]
    Problems(#[from] crate::problems::ProblemsError),
    #[error("{0}")]
    Solver(#[from] crate::solver::SolverError),
    #[error("{0}")]
    Schedule(#[from] crate::schedule::ScheduleError),
    #[error("{0}")]
    Paracheck(#[from] crate::paracheck::ParacheckError),
    #[error("{0}")]
    Metrics(#[from] crate::metrics::MetricsError),
    #[error("config: {0}")]
    Config(String),
    #[error("write {path}: {source}")]
    Write { path: String, source: std::io::Error },
}

fn cfg_err(message: impl Into<String>) -> CliError {
    CliError::Config(message.into())
}

/// A problem plus the starting point and bookkeeping the subcommands need.
struct PreparedProblem {
    problem: ProblemInstance,
    x0: Point,
    /// For factorization problems: instance data used by `recover`.
    factorization: Option<RobustFactorizationInstance>,
    /// Held-out MovieLens ratings for test RMSE.
    test_ratings: Option<(Vec<crate::io::movielens::RatingTriple>, usize, usize)>,
    /// Original image, for PSNR/SNR and writing the reconstruction back.
    image: Option<PgmImage>,
}

/// Executes one subcommand. Returns the paths of the artifacts written.
pub fn execute(command: Command, config: &RunConfig) -> Result<Vec<PathBuf>, CliError> {
    let out_dir = config.get_path("out").unwrap_or_else(|| PathBuf::from("."));
    std::fs::create_dir_all(&out_dir)
        .map_err(|source| CliError::Write { path: out_dir.display().to_string(), source })?;
    match command {
        Command::Solve => solve(config, &out_dir),
        Command::Certify => certify(config, &out_dir),
        Command::Bench => bench(config, &out_dir),
        Command::Recover => recover(config, &out_dir),
    }
}

// ---------------------------------------------------------------- problems

fn prepare_problem(config: &RunConfig) -> Result<PreparedProblem, CliError> {
    let seed = config.get_u64("seed")?.unwrap_or(0);
    if let Some(path) = config.get_path("data") {
        return prepare_data_problem(config, &path, seed);
    }
    let name = config.get("problem").unwrap_or("sharp_norm");
    match name {
        "synth_rmc" => {
            let m = config.get_usize("m")?.unwrap_or(60);
            let n = config.get_usize("n")?.unwrap_or(50);
            let r = config.get_usize("rank")?.unwrap_or(3);
            let observed = config.get_f64("observed_fraction")?.unwrap_or(0.7);
            let outlier_fraction = config.get_f64("outlier_fraction")?.unwrap_or(0.0);
            let outlier_scale = config.get_f64("outlier_scale")?.unwrap_or(1.0);
            let instance = synth_rmc(m, n, r, observed, outlier_fraction, outlier_scale, seed)?;
            let (problem, x0) = factorization_start(config, &instance, seed)?;
            Ok(PreparedProblem {
                problem,
                x0,
                factorization: Some(instance),
                test_ratings: None,
                image: None,
            })
        }
        "phase" => {
            let n = config.get_usize("dim")?.unwrap_or(5);
            let m = config.get_usize("measurements")?.unwrap_or(4 * n);
            let instance = PhaseRetrievalInstance::gaussian(m, n, seed);
            let problem = phase_oracle(&instance);
            let x0 = random_unit_point(n, seed.wrapping_add(1));
            Ok(PreparedProblem { problem, x0, factorization: None, test_ratings: None, image: None })
        }
        "sharp_norm" | "quadratic_norm" => {
            let dim = config.get_usize("dim")?.unwrap_or(10);
            let problem = if name == "sharp_norm" {
                sharp_norm_instance(dim)
            } else {
                quadratic_norm_instance(dim)
            };
            let x0 = random_unit_point(dim, seed);
            Ok(PreparedProblem { problem, x0, factorization: None, test_ratings: None, image: None })
        }
        other => {
            let problem = builtin_instance(other)?;
            let x0 = random_unit_point(problem.dimension(), seed);
            Ok(PreparedProblem { problem, x0, factorization: None, test_ratings: None, image: None })
        }
    }
}

fn prepare_data_problem(
    config: &RunConfig,
    path: &Path,
    seed: u64,
) -> Result<PreparedProblem, CliError> {
    let format = match config.get("format") {
        Some(f) => f.to_string(),
        None => match path.extension().and_then(|e| e.to_str()) {
            Some("csv") => "csv".into(),
            Some("pgm") => "pgm".into(),
            Some("data") => "movielens".into(),
            _ => return Err(cfg_err("format: cannot infer from extension; set format=")),
        },
    };
    let r = config.get_usize("rank")?.unwrap_or(20);
    let nonnegative = config.get_bool("nonnegative")?.unwrap_or(false);

    match format.as_str() {
        "csv" => {
            let x = read_matrix_csv_path(path)?;
            let mask = match config.get_path("mask") {
                Some(mask_path) => read_matrix_csv_path(&mask_path)?,
                None => match config.get_f64("observed_fraction")? {
                    Some(fraction) => random_mask(x.dim(), fraction, seed),
                    None => Array2::ones(x.dim()),
                },
            };
            let instance = RobustFactorizationInstance::new(x, mask, r, nonnegative, None)?;
            let (problem, x0) = factorization_start(config, &instance, seed)?;
            Ok(PreparedProblem {
                problem,
                x0,
                factorization: Some(instance),
                test_ratings: None,
                image: None,
            })
        }
        "pgm" => {
            let image = read_pgm_path(path)?;
            let truth = image.to_matrix();
            let observed = config.get_f64("observed_fraction")?.unwrap_or(0.6);
            let mask = random_mask(truth.dim(), observed, seed);
            // masking and outlier corruption are independent knobs
            let outlier_fraction = config.get_f64("outlier_fraction")?.unwrap_or(0.0);
            let outlier_scale = config.get_f64("outlier_scale")?.unwrap_or(0.5);
            let mut data = truth.clone();
            if outlier_fraction > 0.0 {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6f75_746c);
                for ((i, j), &m) in mask.indexed_iter() {
                    if m == 1.0 && rng.random_range(0.0..1.0) < outlier_fraction {
                        let sign = if rng.random_range(0.0..1.0) < 0.5 { 1.0 } else { -1.0 };
                        data[[i, j]] = (data[[i, j]] + sign * outlier_scale).clamp(0.0, 1.0);
                    }
                }
            }
            let instance =
                RobustFactorizationInstance::new(data, mask, r, nonnegative, Some(truth))?;
            let (problem, x0) = factorization_start(config, &instance, seed)?;
            Ok(PreparedProblem {
                problem,
                x0,
                factorization: Some(instance),
                test_ratings: None,
                image: Some(image),
            })
        }
        "movielens" => {
            let data = parse_movielens_path(path)?;
            let train_fraction = config.get_f64("train_fraction")?.unwrap_or(0.8);
            let (train, test) = data.split(train_fraction, seed);
            let mut x = Array2::zeros((data.users, data.items));
            let mut mask = Array2::zeros((data.users, data.items));
            for t in &train {
                x[[t.user, t.item]] = t.rating;
                mask[[t.user, t.item]] = 1.0;
            }
            let instance = RobustFactorizationInstance::new(x, mask, r, nonnegative, None)?;
            let (problem, x0) = factorization_start(config, &instance, seed)?;
            Ok(PreparedProblem {
                problem,
                x0,
                factorization: Some(instance),
                test_ratings: Some((test, data.users, data.items)),
                image: None,
            })
        }
        other => Err(cfg_err(format!("format: unsupported: {other}"))),
    }
}

fn random_mask(dim: (usize, usize), observed_fraction: f64, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d61_736b);
    Array2::from_shape_fn(dim, |_| {
        if rng.random_range(0.0..1.0) < observed_fraction {
            1.0
        } else {
            0.0
        }
    })
}

fn factorization_start(
    config: &RunConfig,
    instance: &RobustFactorizationInstance,
    seed: u64,
) -> Result<(ProblemInstance, Point), CliError> {
    let method: InitMethod = config
        .get("init")
        .unwrap_or("svd")
        .parse()
        .map_err(|e: String| cfg_err(format!("init: {e}")))?;
    let (u, v) = initialize_factors(
        instance.data(),
        instance.mask(),
        instance.rank(),
        method,
        instance.nonnegative(),
        seed,
    )?;
    let problem = rmc_oracle(instance);
    let x0 = instance.shape().pack(&u, &v)?;
    Ok((problem, x0))
}

// ------------------------------------------------------------------ rules

fn build_rule(config: &RunConfig, problem: &ProblemInstance) -> Result<StepSizeRule, CliError> {
    let name = config.get("rule").unwrap_or("scaled_polyak");
    build_named_rule(name, config, problem)
}

fn build_named_rule(
    name: &str,
    config: &RunConfig,
    problem: &ProblemInstance,
) -> Result<StepSizeRule, CliError> {
    let rule = match name {
        "constant" => StepSizeRule::constant(config.get_f64("alpha")?.unwrap_or(0.01))?,
        "diminishing" => StepSizeRule::diminishing(
            config.get_f64("lambda")?.unwrap_or(1e-3),
            config.get_f64("beta")?.unwrap_or(1.0),
            config.get_f64("r")?.unwrap_or(0.5),
        )?,
        "square_summable" => {
            StepSizeRule::square_summable(config.get_f64("lambda")?.unwrap_or(1.0))?
        }
        "geometric" => StepSizeRule::geometric(
            config.get_f64("lambda")?.unwrap_or(1e-3),
            config.get_f64("q")?.unwrap_or(0.95),
        )?,
        "polyak" => StepSizeRule::polyak(polyak_target(config, problem)?)?,
        "scaled_polyak" => StepSizeRule::scaled_polyak(
            polyak_target(config, problem)?,
            config.get_f64("sigma")?.unwrap_or(4.0),
        )?,
        other => return Err(cfg_err(format!("rule: unknown rule: {other}"))),
    };
    Ok(rule)
}

/// Resolves the Polyak target: an explicit number, or `known` for the
/// problem's optimal value (surrogate or not).
fn polyak_target(config: &RunConfig, problem: &ProblemInstance) -> Result<f64, CliError> {
    match config.get("f_target") {
        None | Some("known") => problem
            .f_star()
            .ok_or_else(|| cfg_err("f_target: problem has no known optimum; set a value")),
        Some(text) => text
            .parse::<f64>()
            .map_err(|e| cfg_err(format!("f_target: not a number ({e})"))),
    }
}

fn solver_config(config: &RunConfig) -> Result<SolverConfig, CliError> {
    let mut solver = SolverConfig {
        max_iterations: config.get_usize("max_iter")?.unwrap_or(1000),
        seed: config.get_u64("seed")?.unwrap_or(0),
        ..SolverConfig::default()
    };
    if let Some(tol) = config.get_f64("stationary_tol")? {
        solver.stationary_tolerance = tol;
    }
    solver.target_gap = config.get_f64("target_gap")?;
    if let Some(flag) = config.get_bool("record_points")? {
        solver.record_points = flag;
    }
    if config.get_bool("audit")?.unwrap_or(false) {
        solver.record_points = true;
    }
    if let Some(flag) = config.get_bool("record_distances")? {
        solver.record_distances = flag;
    }
    Ok(solver)
}

/// Theory constants from the config overrides (rho/delta/mu/l, with nu
/// shared with the estimators), or from the problem when no override is
/// given.
fn resolve_theory(
    config: &RunConfig,
    problem: &ProblemInstance,
) -> Result<Option<TheoryConstants>, CliError> {
    let overrides = [
        config.get_f64("rho")?,
        config.get_f64("delta")?,
        config.get_f64("mu")?,
        config.get_f64("l")?,
    ];
    if overrides.iter().all(Option::is_none) {
        return Ok(problem.theory().copied());
    }
    let base = problem.theory().copied();
    let pick = |index: usize, fallback: fn(&TheoryConstants) -> f64, name: &str| {
        overrides[index]
            .or_else(|| base.as_ref().map(fallback))
            .ok_or_else(|| cfg_err(format!("{name}: required (no problem theory to fall back on)")))
    };
    let rho = pick(0, TheoryConstants::rho, "rho")?;
    let delta = pick(1, TheoryConstants::delta, "delta")?;
    let mu = pick(2, TheoryConstants::mu, "mu")?;
    let l = pick(3, TheoryConstants::l, "l")?;
    let nu = config
        .get_f64("nu")?
        .or_else(|| base.as_ref().map(TheoryConstants::nu))
        .unwrap_or(1.0);
    Ok(Some(TheoryConstants::new(nu, rho, delta, mu, l)?))
}

// ------------------------------------------------------------------ report

/// Ordered key=value report writer.
#[derive(Default)]
struct Report {
    lines: Vec<(String, String)>,
}

impl Report {
    fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.lines.push((key.to_string(), value.to_string()));
    }

    fn write(&self, path: &Path) -> Result<(), CliError> {
        let mut text = String::new();
        for (k, v) in &self.lines {
            let _ = writeln!(text, "{k}={v}");
        }
        std::fs::write(path, text)
            .map_err(|source| CliError::Write { path: path.display().to_string(), source })
    }
}

fn write_history_csv(history: &RunHistory, path: &Path) -> Result<(), CliError> {
    let mut text = String::from("k,f,f_best,alpha,grad_norm,dist\n");
    for r in &history.records {
        let dist = r.dist.map(|d| format!("{d}")).unwrap_or_default();
        let _ = writeln!(
            text,
            "{},{},{},{},{},{}",
            r.k, r.f_value, r.f_best, r.alpha, r.grad_norm, dist
        );
    }
    std::fs::write(path, text)
        .map_err(|source| CliError::Write { path: path.display().to_string(), source })
}

fn summarize_run(report: &mut Report, history: &RunHistory, problem: &ProblemInstance) {
    let last = history.last();
    report.push("iterations", last.k);
    report.push("termination", history.termination);
    report.push("f_final", last.f_value);
    report.push("f_best", last.f_best);
    report.push("grad_norm_final", last.grad_norm);
    if let Some(d) = last.dist {
        report.push(
            if history.dist_is_surrogate { "relative_error_final" } else { "dist_final" },
            d,
        );
    }
    if problem.has_surrogate_target() {
        report.push("f_star_surrogate", "true");
    }
}

// ------------------------------------------------------------------ solve

fn solve(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let prepared = prepare_problem(config)?;
    let rule = build_rule(config, &prepared.problem)?;
    let solver = solver_config(config)?;
    let history = run(&prepared.problem, &rule, prepared.x0.clone(), &solver)?;

    let history_path = out_dir.join("history.csv");
    write_history_csv(&history, &history_path)?;

    let mut report = Report::default();
    report.push("command", "solve");
    report.push("problem", prepared.problem.name());
    report.push("rule", rule.name());
    report.push("seed", solver.seed);
    summarize_run(&mut report, &history, &prepared.problem);

    if config.get_bool("audit")?.unwrap_or(false) {
        match audit(&history, &prepared.problem) {
            Ok(audit_report) => {
                report.push("audit_pass", audit_report.pass());
                report.push("audit_max_violation", audit_report.max_violation());
                report.push(
                    "audit_l_source",
                    match audit_report.l_source {
                        LSource::Theory => "theory",
                        LSource::EmpiricalL => "empirical-L",
                    },
                );
                for check in &audit_report.checks {
                    report.push(&format!("audit_{}", check.name), check.pass);
                }
            }
            Err(e) => report.push("audit_error", e),
        }
    }

    let summary_path = out_dir.join("summary.txt");
    report.write(&summary_path)?;
    Ok(vec![history_path, summary_path])
}

// ---------------------------------------------------------------- certify

fn certify(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let prepared = prepare_problem(config)?;
    let problem = &prepared.problem;
    let nu = config.get_f64("nu")?.unwrap_or(1.0);
    let half_width = config.get_f64("half_width")?.unwrap_or(1.5);
    let pair_count = config.get_usize("pair_count")?.unwrap_or(2000);
    let seed = config.get_u64("seed")?.unwrap_or(0);
    let domain = SamplingDomain::symmetric(half_width, problem.dimension())?
        .with_pair_count(pair_count)
        .with_seed(seed);

    let mut report = Report::default();
    report.push("command", "certify");
    report.push("problem", problem.name());
    report.push("nu", nu);
    report.push("half_width", half_width);
    report.push("pair_count", pair_count);

    let value_problem = problem.clone();
    let value = move |x: &Point| value_problem.value(x);
    let grad_problem = problem.clone();
    let grad = move |x: &Point| grad_problem.subgradient(x).vector().clone();

    let mid = midpoint_rho(&value, &domain, nu)?;
    report.push("midpoint_rho_hat", mid.rho_hat);
    let sub = subgradient_rho(&value, &grad, &domain, nu)?;
    report.push("subgradient_rho_hat", sub.rho_hat);

    let pairs_path = out_dir.join("worst_pairs.csv");
    {
        let mut text = String::from("method,coordinate,x,y\n");
        for (label, est) in [("midpoint", &mid), ("subgradient", &sub)] {
            for i in 0..est.worst_pair.0.len() {
                let _ = writeln!(
                    text,
                    "{label},{i},{},{}",
                    est.worst_pair.0[i], est.worst_pair.1[i]
                );
            }
        }
        std::fs::write(&pairs_path, text)
            .map_err(|source| CliError::Write { path: pairs_path.display().to_string(), source })?;
    }

    let fitted = match heb_fit(problem, &domain) {
        Ok(fit) => {
            report.push("heb_mu_hat", fit.mu_hat);
            report.push("heb_delta_hat", fit.delta_hat);
            report.push("heb_residual", fit.residual);
            report.push("heb_dist_min", fit.sample_range.0);
            report.push("heb_dist_max", fit.sample_range.1);
            Some(fit)
        }
        Err(e) => {
            report.push("heb_fit_error", e);
            None
        }
    };

    let mut theory = resolve_theory(config, problem)?;
    if theory.is_none() {
        // fall back to estimated constants: the fitted error bound, the
        // first-order rho estimate, and the largest sampled subgradient
        // norm as L
        if let Some(fit) = fitted {
            let l_hat = estimate_subgradient_bound(problem, &domain);
            match TheoryConstants::new(nu, sub.rho_hat, fit.delta_hat, fit.mu_hat, l_hat) {
                Ok(estimated) => {
                    report.push("theory_source", "estimated");
                    theory = Some(estimated);
                }
                Err(e) => report.push("theory_estimate_error", e),
            }
        }
    } else {
        report.push("theory_source", "supplied");
    }

    if let Some(theory) = theory {
        report.push("tau", theory.tau());
        report.push("tube_radius_full", tube_radius(1.0, &theory));
        report.push("tube_radius_half", tube_radius(0.5, &theory));
        let gamma = config.get_f64("gamma")?.unwrap_or(0.25);
        let dist0 = problem.progress(&prepared.x0).unwrap_or(1.0);
        let rule = build_rule(config, problem)?;
        match rate_certificate(&rule, &theory, gamma, dist0) {
            Ok(cert) => describe_certificate(&mut report, &cert),
            Err(e) => report.push("certificate_error", e),
        }
        if let StepSizeRule::Constant { alpha } = rule {
            match css_gap_bound(alpha, &theory) {
                Ok(c) => {
                    report.push("css_gap_bound", c.gap_bound);
                    report.push("css_k_min", c.k_min);
                }
                Err(e) => report.push("css_error", e),
            }
        }
        if theory.delta() < 1.0 {
            match decay_certificate(&theory) {
                Ok(c) => {
                    report.push("decay_r", c.r);
                    report.push("decay_a", c.a);
                    report.push("decay_lambda", c.lambda);
                    report.push("decay_beta_min", c.beta_min);
                }
                Err(e) => report.push("decay_error", e),
            }
        }
    } else {
        report.push("theory", "none (set nu/rho/delta/mu/l to certify rates)");
    }

    let report_path = out_dir.join("certify.txt");
    report.write(&report_path)?;
    Ok(vec![report_path, pairs_path])
}

/// Largest subgradient norm over the sampling box, the `L` stand-in when
/// no theory constants are supplied.
fn estimate_subgradient_bound(problem: &ProblemInstance, domain: &SamplingDomain) -> f64 {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x4c_68_61_74);
    let mut l = f64::MIN_POSITIVE;
    for _ in 0..domain.pair_count().min(2000) {
        let x = Point::new(domain.sample_point(&mut rng)).expect("finite");
        l = l.max(problem.subgradient(&x).norm());
    }
    l
}

fn describe_certificate(report: &mut Report, cert: &RateCertificate) {
    match cert {
        RateCertificate::Constant(c) => {
            report.push("certificate", "constant");
            report.push("cert_d_star", c.d_star);
            report.push("cert_q", c.q);
            report.push("cert_script_d_sq", c.script_d_sq);
            report.push("cert_alpha_max", c.alpha_max);
        }
        RateCertificate::Diminishing(c) => {
            report.push("certificate", "diminishing");
            report.push("cert_a", c.a);
            report.push("cert_beta_min", c.beta_min);
        }
        RateCertificate::Decay(c) => {
            report.push("certificate", "decay");
            report.push("cert_r", c.r);
            report.push("cert_a", c.a);
            report.push("cert_lambda", c.lambda);
            report.push("cert_beta_min", c.beta_min);
        }
        RateCertificate::Geometric(c) => {
            report.push("certificate", "geometric");
            report.push("cert_q", c.q);
            report.push("cert_a", c.a);
            report.push("cert_gamma_lo", c.gamma_range.0);
            report.push("cert_gamma_hi", c.gamma_range.1);
            report.push("cert_dist0_max", c.dist0_max);
        }
        RateCertificate::ScaledPolyak(c) => {
            report.push("certificate", "scaled_polyak");
            report.push("cert_rate", c.rate);
            report.push("cert_gamma_max", c.gamma_max);
        }
        RateCertificate::Css(c) => {
            report.push("certificate", "css");
            report.push("cert_gap_bound", c.gap_bound);
            report.push("cert_k_min", c.k_min);
        }
    }
}

// ------------------------------------------------------------------ bench

/// The four strategies compared in the recovery experiments: Polyak,
/// scaled Polyak, diminishing `lambda/sqrt(k+1)` and geometric decay.
fn bench(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let prepared = prepare_problem(config)?;
    let problem = &prepared.problem;
    let solver = solver_config(config)?;
    let lambda = config.get_f64("lambda")?.unwrap_or(1e-3);
    let q = config.get_f64("q")?.unwrap_or(0.95);
    let sigma = config.get_f64("sigma")?.unwrap_or(4.0);
    let target = polyak_target(config, problem)?;

    let rules = [
        StepSizeRule::polyak(target)?,
        StepSizeRule::scaled_polyak(target, sigma)?,
        StepSizeRule::diminishing(lambda, 1.0, 0.5)?,
        StepSizeRule::geometric(lambda, q)?,
    ];

    // independent runs, one thread each
    let results: Vec<Result<RunHistory, crate::solver::SolverError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = rules
            .iter()
            .map(|rule| {
                let x0 = prepared.x0.clone();
                scope.spawn(move || run(problem, rule, x0, &solver))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("bench thread panicked")).collect()
    });

    let bench_path = out_dir.join("bench.csv");
    let mut text = String::from("rule,iterations,termination,f_final,f_best,dist_final\n");
    for (rule, result) in rules.iter().zip(results) {
        let history = result?;
        let last = history.last();
        let dist = last.dist.map(|d| format!("{d}")).unwrap_or_default();
        let _ = writeln!(
            text,
            "{},{},{},{},{},{}",
            rule.name(),
            last.k,
            history.termination,
            last.f_value,
            last.f_best,
            dist
        );
    }
    std::fs::write(&bench_path, text)
        .map_err(|source| CliError::Write { path: bench_path.display().to_string(), source })?;
    Ok(vec![bench_path])
}

// ---------------------------------------------------------------- recover

fn recover(config: &RunConfig, out_dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let prepared = prepare_problem(config)?;
    let instance = prepared
        .factorization
        .as_ref()
        .ok_or_else(|| cfg_err("recover needs a matrix problem (data= or problem=synth_rmc)"))?;
    let rule = build_rule(config, &prepared.problem)?;
    let solver = solver_config(config)?;
    let history = run(&prepared.problem, &rule, prepared.x0.clone(), &solver)?;

    let shape = instance.shape();
    let (u, v) = shape.unpack(&history.final_point);
    let reconstruction = u.dot(&v);

    let mut report = Report::default();
    report.push("command", "recover");
    report.push("problem", prepared.problem.name());
    report.push("rule", rule.name());
    report.push("rank", instance.rank());
    summarize_run(&mut report, &history, &prepared.problem);

    report.push("rmse_observed", rmse(&reconstruction, instance.data(), instance.mask())?);

    if let Some((test, users, items)) = &prepared.test_ratings {
        let mut truth = Array2::zeros((*users, *items));
        let mut mask = Array2::zeros((*users, *items));
        for t in test {
            truth[[t.user, t.item]] = t.rating;
            mask[[t.user, t.item]] = 1.0;
        }
        report.push("rmse_test", rmse(&reconstruction, &truth, &mask)?);
    }

    if let Some(truth) = instance.ground_truth() {
        let ones = Array2::ones(truth.dim());
        report.push("rmse_ground_truth", rmse(&reconstruction, truth, &ones)?);
        let err: f64 = (&reconstruction - truth).iter().map(|e| e * e).sum::<f64>().sqrt();
        let scale: f64 = truth.iter().map(|e| e * e).sum::<f64>().sqrt();
        report.push("relative_error", err / scale.max(f64::MIN_POSITIVE));
        let max_value = if prepared.image.is_some() { 1.0 } else { truth.iter().fold(0.0f64, |m, v| m.max(v.abs())) };
        let (psnr, snr) = psnr_snr(&reconstruction, truth, max_value)?;
        report.push("psnr_db", psnr);
        report.push("snr_db", snr);
    }

    let mut artifacts = Vec::new();
    let history_path = out_dir.join("history.csv");
    write_history_csv(&history, &history_path)?;
    artifacts.push(history_path);

    if let Some(image) = &prepared.image {
        let out_image = PgmImage::from_matrix(&reconstruction, image.maxval, image.format)?;
        let image_path = out_dir.join("recovered.pgm");
        write_pgm_path(&out_image, &image_path)?;
        artifacts.push(image_path);
    } else {
        let matrix_path = out_dir.join("recovered.csv");
        write_matrix_csv_path(&reconstruction, &matrix_path)?;
        artifacts.push(matrix_path);
    }

    let report_path = out_dir.join("recover.txt");
    report.write(&report_path)?;
    artifacts.push(report_path);
    Ok(artifacts)
}
