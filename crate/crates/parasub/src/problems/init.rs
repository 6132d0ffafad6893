//! Factor initializers for matrix recovery runs.

use ndarray::Array2;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::linalg::truncated_svd_factors;
use crate::problems::ProblemsError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitMethod {
    /// Truncated SVD of the mask-filled data (unobserved entries replaced
    /// by the observed mean), split as `U_r S^{1/2}` and `S^{1/2} V_r^T`.
    Svd,
    /// Entries uniform in `[0, scale)` with
    /// `scale = sqrt(mean(|X_observed|) / r)`, sized so the initial product
    /// matches the observed magnitude.
    Random,
}

impl std::str::FromStr for InitMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "svd" => Ok(InitMethod::Svd),
            "random" => Ok(InitMethod::Random),
            other => Err(format!("unknown init method: {other}")),
        }
    }
}

/// Produces starting factors `(U, V)` for `X ~ U V` at rank `r`.
/// Deterministic for a fixed seed; the nonnegative flag clamps negative
/// entries to zero after either method.
pub fn initialize_factors(
    x: &Array2<f64>,
    mask: &Array2<f64>,
    r: usize,
    method: InitMethod,
    nonnegative: bool,
    seed: u64,
) -> Result<(Array2<f64>, Array2<f64>), ProblemsError> {
    let (m, n) = x.dim();
    if mask.dim() != (m, n) {
        return Err(ProblemsError::ShapeMismatch(format!(
            "mask {:?} does not match data {:?}",
            mask.dim(),
            x.dim()
        )));
    }
    if r == 0 || r > m.min(n) {
        return Err(ProblemsError::RankTooLarge { r, limit: m.min(n) });
    }
    let observed: Vec<f64> = mask
        .indexed_iter()
        .filter(|(_, &v)| v == 1.0)
        .map(|(idx, _)| x[idx])
        .collect();
    if observed.is_empty() {
        return Err(ProblemsError::AllUnobserved);
    }

    let (mut u, mut v) = match method {
        InitMethod::Svd => {
            let mean = observed.iter().sum::<f64>() / observed.len() as f64;
            let filled = Array2::from_shape_fn((m, n), |(i, j)| {
                if mask[[i, j]] == 1.0 {
                    x[[i, j]]
                } else {
                    mean
                }
            });
            truncated_svd_factors(&filled, r, seed)
        }
        InitMethod::Random => {
            let mean_abs = observed.iter().map(|e| e.abs()).sum::<f64>() / observed.len() as f64;
            let scale = (mean_abs / r as f64).sqrt();
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let u = Array2::from_shape_fn((m, r), |_| rng.random_range(0.0..1.0) * scale);
            let v = Array2::from_shape_fn((r, n), |_| rng.random_range(0.0..1.0) * scale);
            (u, v)
        }
    };

    if nonnegative {
        u.mapv_inplace(|e| e.max(0.0));
        v.mapv_inplace(|e| e.max(0.0));
    }
    Ok((u, v))
}
