//! Flat key=value run configuration.
//!
//! The format is one `key=value` pair per line; `#` starts a comment.
//! Keys are validated against the documented list below so a typo is
//! rejected by name, and every referenced file must exist at load time.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::{Path, PathBuf};

use super::IoError;

/// Every key the CLI understands, with its meaning.
pub const KNOWN_KEYS: &[(&str, &str)] = &[
    ("problem", "builtin name (sharp_norm, quadratic_norm, para1d, saddle2d), synth_rmc, or phase"),
    ("data", "path to a CSV matrix, PGM image, or MovieLens u.data file"),
    ("format", "data format: csv, pgm, or movielens (inferred from extension when absent)"),
    ("mask", "path to a CSV 0/1 mask matching the data matrix"),
    ("rank", "factorization rank r"),
    ("nonnegative", "constrain factors to the nonnegative orthant (true/false)"),
    ("dim", "dimension for norm builtins"),
    ("m", "synthetic instance rows"),
    ("n", "synthetic instance columns"),
    ("observed_fraction", "fraction of entries observed (synthetic or image masking)"),
    ("outlier_fraction", "fraction of observed entries spiked with outliers"),
    ("outlier_scale", "outlier magnitude"),
    ("measurements", "phase retrieval measurement count m"),
    ("rule", "constant | diminishing | square_summable | geometric | polyak | scaled_polyak"),
    ("alpha", "constant rule step size"),
    ("lambda", "diminishing / square-summable / geometric scale"),
    ("beta", "diminishing rule offset"),
    ("r", "diminishing rule exponent"),
    ("q", "geometric rule ratio"),
    ("sigma", "scaled Polyak divisor"),
    ("f_target", "Polyak target value, or 'known' to use the problem optimum"),
    ("max_iter", "iteration budget"),
    ("seed", "RNG seed"),
    ("stationary_tol", "subgradient-norm stopping threshold"),
    ("target_gap", "stop when f_best - f_star reaches this gap"),
    ("record_points", "store iterates for auditing (true/false)"),
    ("record_distances", "record the dist column (true/false)"),
    ("audit", "run the inequality audit after solving (true/false)"),
    ("init", "factor initializer: svd or random"),
    ("gamma", "tube parameter for certificates"),
    ("nu", "theory override: paraconvexity exponent"),
    ("rho", "theory override: paraconvexity constant"),
    ("delta", "theory override: error-bound order"),
    ("mu", "theory override: error-bound modulus"),
    ("l", "theory override: subgradient bound"),
    ("pair_count", "sample pairs for the certify estimators"),
    ("half_width", "sampling box half width for certify"),
    ("train_fraction", "MovieLens train split fraction"),
    ("out", "output directory"),
];

#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    values: BTreeMap<String, String>,
}

impl RunConfig {
    pub fn new() -> Self {
        RunConfig::default()
    }

    pub fn from_reader(reader: impl BufRead) -> Result<Self, IoError> {
        let mut config = RunConfig::new();
        for (idx, line) in reader.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let (key, value) = trimmed.split_once('=').ok_or_else(|| IoError::Malformed {
                line: idx + 1,
                message: format!("expected key=value, got {trimmed:?}"),
            })?;
            config.set(key.trim(), value.trim())?;
        }
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self, IoError> {
        let file = std::fs::File::open(path)?;
        let config = Self::from_reader(std::io::BufReader::new(file))?;
        config.check_files()?;
        Ok(config)
    }

    pub fn set(&mut self, key: &str, value: &str) -> Result<(), IoError> {
        if !KNOWN_KEYS.iter().any(|(k, _)| *k == key) {
            return Err(IoError::Config(format!("{key}: unknown key")));
        }
        self.values.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Referenced files must exist when the config is loaded.
    pub fn check_files(&self) -> Result<(), IoError> {
        for key in ["data", "mask"] {
            if let Some(path) = self.values.get(key) {
                if !Path::new(path).exists() {
                    return Err(IoError::Config(format!("{key}: file not found: {path}")));
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn get_f64(&self, key: &str) -> Result<Option<f64>, IoError> {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<f64>()
                    .map_err(|e| IoError::Config(format!("{key}: not a number ({e})")))
            })
            .transpose()
    }

    pub fn get_usize(&self, key: &str) -> Result<Option<usize>, IoError> {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<usize>()
                    .map_err(|e| IoError::Config(format!("{key}: not a count ({e})")))
            })
            .transpose()
    }

    pub fn get_u64(&self, key: &str) -> Result<Option<u64>, IoError> {
        self.values
            .get(key)
            .map(|v| {
                v.parse::<u64>()
                    .map_err(|e| IoError::Config(format!("{key}: not an integer ({e})")))
            })
            .transpose()
    }

    pub fn get_bool(&self, key: &str) -> Result<Option<bool>, IoError> {
        self.values
            .get(key)
            .map(|v| match v.as_str() {
                "true" | "1" | "yes" => Ok(true),
                "false" | "0" | "no" => Ok(false),
                other => Err(IoError::Config(format!("{key}: not a boolean: {other:?}"))),
            })
            .transpose()
    }

    pub fn get_path(&self, key: &str) -> Option<PathBuf> {
        self.values.get(key).map(PathBuf::from)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.values.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }
}

impl std::fmt::Display for RunConfig {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for (k, v) in &self.values {
            writeln!(f, "{k}={v}")?;
        }
        Ok(())
    }
}
