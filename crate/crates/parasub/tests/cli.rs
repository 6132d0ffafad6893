//! End-to-end checks of the four subcommands through `cli::execute`.

use parasub::cli::{execute, Command};
use parasub::io::RunConfig;

fn config(pairs: &[(&str, &str)]) -> RunConfig {
    let mut config = RunConfig::new();
    for (key, value) in pairs {
        config.set(key, value).unwrap();
    }
    config
}

fn read(path: &std::path::Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

#[test]
fn solve_emits_the_closed_form_distance_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(&[
        ("problem", "sharp_norm"),
        ("rule", "scaled_polyak"),
        ("sigma", "4"),
        ("f_target", "0"),
        ("max_iter", "30"),
        ("seed", "5"),
        ("out", dir.path().to_str().unwrap()),
    ]);
    let artifacts = execute(Command::Solve, &cfg).unwrap();
    let history = read(&artifacts[0]);
    let mut lines = history.lines();
    assert_eq!(lines.next().unwrap(), "k,f,f_best,alpha,grad_norm,dist");
    // dist column follows 0.75^k from a unit start
    for (k, line) in lines.enumerate() {
        let dist: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        let expected = 0.75f64.powi(k as i32);
        assert!(
            (dist - expected).abs() <= 1e-9 * expected.max(1e-12),
            "k={k}: dist {dist} vs {expected}"
        );
    }
    let summary = read(&artifacts[1]);
    assert!(summary.contains("rule=scaled_polyak"));
    assert!(summary.contains("termination=max_iterations"));
}

#[test]
fn solve_with_audit_reports_inequalities() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(&[
        ("problem", "sharp_norm"),
        ("rule", "constant"),
        ("alpha", "0.01"),
        ("max_iter", "100"),
        ("audit", "true"),
        ("out", dir.path().to_str().unwrap()),
    ]);
    let artifacts = execute(Command::Solve, &cfg).unwrap();
    let summary = read(&artifacts[1]);
    assert!(summary.contains("audit_pass=true"), "{summary}");
    assert!(summary.contains("audit_dist_recurrence_value=true"));
}

#[test]
fn certify_para1d_reports_rho_and_tube() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(&[
        ("problem", "para1d"),
        ("nu", "0.5"),
        ("half_width", "1.5"),
        ("out", dir.path().to_str().unwrap()),
    ]);
    let artifacts = execute(Command::Certify, &cfg).unwrap();
    let report = read(&artifacts[0]);
    assert!(report.contains("midpoint_rho_hat="), "{report}");
    assert!(report.contains("subgradient_rho_hat="), "{report}");
    assert!(report.contains("tube_radius_full="), "{report}");
    assert!(report.contains("tube_radius_half="), "{report}");
    assert!(report.contains("heb_delta_hat="), "{report}");
}

#[test]
fn bench_emits_one_row_per_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config(&[
        ("problem", "synth_rmc"),
        ("m", "20"),
        ("n", "15"),
        ("rank", "2"),
        ("observed_fraction", "0.8"),
        ("f_target", "0"),
        ("max_iter", "200"),
        ("out", dir.path().to_str().unwrap()),
    ]);
    let artifacts = execute(Command::Bench, &cfg).unwrap();
    let table = read(&artifacts[0]);
    let lines: Vec<&str> = table.lines().collect();
    assert_eq!(lines.len(), 5, "header + 4 strategies: {table}");
    assert_eq!(lines[0], "rule,iterations,termination,f_final,f_best,dist_final");
    for (line, rule) in lines[1..]
        .iter()
        .zip(["polyak", "scaled_polyak", "diminishing", "geometric"])
    {
        assert!(line.starts_with(rule), "{line}");
    }
}

#[test]
fn recover_round_trips_a_pgm_image() {
    use parasub::io::pgm::{write_pgm_path, PgmFormat, PgmImage};
    let dir = tempfile::tempdir().unwrap();
    // a rank-1-ish separable gradient image recovers well at small rank
    let (h, w) = (24, 18);
    let pixels: Vec<u16> = (0..h)
        .flat_map(|i| (0..w).map(move |j| ((i * 10 + j) % 256) as u16))
        .collect();
    let image = PgmImage { width: w, height: h, maxval: 255, pixels, format: PgmFormat::Binary };
    let input = dir.path().join("input.pgm");
    write_pgm_path(&image, &input).unwrap();

    let cfg = config(&[
        ("data", input.to_str().unwrap()),
        ("rank", "4"),
        ("observed_fraction", "0.8"),
        ("rule", "scaled_polyak"),
        ("f_target", "0"),
        ("max_iter", "400"),
        ("out", dir.path().to_str().unwrap()),
    ]);
    let artifacts = execute(Command::Recover, &cfg).unwrap();
    let report = read(artifacts.last().unwrap());
    assert!(report.contains("psnr_db="), "{report}");
    assert!(report.contains("snr_db="), "{report}");
    assert!(dir.path().join("recovered.pgm").exists());
}

#[test]
fn recover_pgm_with_outlier_corruption() {
    use parasub::io::pgm::{write_pgm_path, PgmFormat, PgmImage};
    let dir = tempfile::tempdir().unwrap();
    let pixels: Vec<u16> = (0..20 * 16).map(|i| (i % 200) as u16).collect();
    let image =
        PgmImage { width: 16, height: 20, maxval: 255, pixels, format: PgmFormat::Ascii };
    let input = dir.path().join("input.pgm");
    write_pgm_path(&image, &input).unwrap();

    let cfg = config(&[
        ("data", input.to_str().unwrap()),
        ("rank", "3"),
        ("observed_fraction", "0.85"),
        ("outlier_fraction", "0.1"),
        ("outlier_scale", "0.5"),
        ("rule", "scaled_polyak"),
        ("f_target", "0"),
        ("max_iter", "300"),
        ("out", dir.path().to_str().unwrap()),
    ]);
    let artifacts = execute(Command::Recover, &cfg).unwrap();
    let report = read(artifacts.last().unwrap());
    // the corrupted observations make the zero target a surrogate
    assert!(report.contains("f_star_surrogate=true"), "{report}");
    assert!(report.contains("psnr_db="), "{report}");
}

#[test]
fn recover_movielens_reports_test_rmse() {
    let dir = tempfile::tempdir().unwrap();
    // tiny synthetic ratings file in u.data format
    let mut text = String::new();
    for user in 1..=12 {
        for item in 1..=10 {
            let rating = 1 + (user * item) % 5;
            text.push_str(&format!("{user}\t{item}\t{rating}\t0\n"));
        }
    }
    let path = dir.path().join("u.data");
    std::fs::write(&path, text).unwrap();

    let cfg = config(&[
        ("data", path.to_str().unwrap()),
        ("format", "movielens"),
        ("rank", "3"),
        ("rule", "scaled_polyak"),
        ("f_target", "0"),
        ("max_iter", "300"),
        ("out", dir.path().to_str().unwrap()),
    ]);
    let artifacts = execute(Command::Recover, &cfg).unwrap();
    let report = read(artifacts.last().unwrap());
    assert!(report.contains("rmse_observed="), "{report}");
    assert!(report.contains("rmse_test="), "{report}");
}

#[test]
fn unknown_config_keys_are_rejected_by_name() {
    let mut cfg = RunConfig::new();
    let err = cfg.set("stepsize", "0.1").unwrap_err();
    assert!(err.to_string().contains("stepsize"));
}

#[test]
fn outputs_are_deterministic_under_fixed_seed() {
    let run_once = || {
        let dir = tempfile::tempdir().unwrap();
        let cfg = config(&[
            ("problem", "synth_rmc"),
            ("m", "15"),
            ("n", "12"),
            ("rank", "2"),
            ("seed", "9"),
            ("f_target", "0"),
            ("max_iter", "150"),
            ("out", dir.path().to_str().unwrap()),
        ]);
        let artifacts = execute(Command::Solve, &cfg).unwrap();
        read(&artifacts[0])
    };
    assert_eq!(run_once(), run_once());
}
