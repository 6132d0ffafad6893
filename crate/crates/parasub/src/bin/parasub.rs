use std::path::PathBuf;

use clap::Parser;

use parasub::cli::{execute, Command};
use parasub::io::RunConfig;

/// Projected subgradient methods for paraconvex objectives: solve runs,
/// rate certification, step-size benchmarks and robust matrix recovery.
#[derive(Parser, Debug)]
#[command(name = "parasub", version, about)]
struct Args {
    /// Subcommand: solve, certify, bench or recover
    command: Command,

    /// key=value config file (flags below override it)
    #[arg(long)]
    config: Option<PathBuf>,

    /// RNG seed
    #[arg(long)]
    seed: Option<u64>,

    /// Output directory for CSV and report artifacts
    #[arg(long)]
    out: Option<PathBuf>,

    /// Iteration budget
    #[arg(long)]
    max_iter: Option<usize>,

    /// Step-size rule name
    #[arg(long)]
    rule: Option<String>,

    /// Problem name (or use --data for a file-backed problem)
    #[arg(long)]
    problem: Option<String>,

    /// Input data file (CSV matrix, PGM image, or MovieLens u.data)
    #[arg(long)]
    data: Option<PathBuf>,

    /// Factorization rank
    #[arg(long)]
    rank: Option<usize>,

    /// Constant rule step size
    #[arg(long)]
    alpha: Option<f64>,

    /// Diminishing / square-summable / geometric scale
    #[arg(long)]
    lambda: Option<f64>,

    /// Diminishing rule offset
    #[arg(long)]
    beta: Option<f64>,

    /// Diminishing rule exponent
    #[arg(long)]
    r: Option<f64>,

    /// Geometric rule ratio
    #[arg(long)]
    q: Option<f64>,

    /// Scaled Polyak divisor
    #[arg(long)]
    sigma: Option<f64>,

    /// Polyak target value, or "known"
    #[arg(long)]
    f_target: Option<String>,

    /// Additional key=value overrides (repeatable)
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

fn build_config(args: &Args) -> Result<RunConfig, String> {
    let mut config = match &args.config {
        Some(path) => RunConfig::from_path(path).map_err(|e| e.to_string())?,
        None => RunConfig::new(),
    };
    let mut put = |key: &str, value: Option<String>| -> Result<(), String> {
        if let Some(v) = value {
            config.set(key, &v).map_err(|e| e.to_string())?;
        }
        Ok(())
    };
    put("seed", args.seed.map(|v| v.to_string()))?;
    put("out", args.out.as_ref().map(|p| p.display().to_string()))?;
    put("max_iter", args.max_iter.map(|v| v.to_string()))?;
    put("rule", args.rule.clone())?;
    put("problem", args.problem.clone())?;
    put("data", args.data.as_ref().map(|p| p.display().to_string()))?;
    put("rank", args.rank.map(|v| v.to_string()))?;
    put("alpha", args.alpha.map(|v| v.to_string()))?;
    put("lambda", args.lambda.map(|v| v.to_string()))?;
    put("beta", args.beta.map(|v| v.to_string()))?;
    put("r", args.r.map(|v| v.to_string()))?;
    put("q", args.q.map(|v| v.to_string()))?;
    put("sigma", args.sigma.map(|v| v.to_string()))?;
    put("f_target", args.f_target.clone())?;
    for pair in &args.set {
        let (key, value) = pair
            .split_once('=')
            .ok_or_else(|| format!("--set expects KEY=VALUE, got {pair:?}"))?;
        config.set(key, value).map_err(|e| e.to_string())?;
    }
    config.check_files().map_err(|e| e.to_string())?;
    Ok(config)
}

fn main() {
    let args = Args::parse();
    let config = match build_config(&args) {
        Ok(config) => config,
        Err(message) => {
            eprintln!("error: {message}");
            std::process::exit(2);
        }
    };
    match execute(args.command, &config) {
        Ok(artifacts) => {
            for path in artifacts {
                println!("wrote {}", path.display());
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(1);
        }
    }
}
