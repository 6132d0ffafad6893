//! Seeded synthetic generator for robust matrix recovery instances.

use ndarray::Array2;
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::problems::{ProblemsError, RobustFactorizationInstance};

/// Generates a rank-`r` ground truth `X0 = U0 V0` with standard-normal
/// factors, observes each entry independently with probability
/// `observed_fraction`, and replaces a fraction `outlier_fraction` of the
/// observed entries with `+-outlier_scale` spikes added to the clean value.
/// Bit-identical output for identical arguments.
pub fn synth_rmc(
    m: usize,
    n: usize,
    r: usize,
    observed_fraction: f64,
    outlier_fraction: f64,
    outlier_scale: f64,
    seed: u64,
) -> Result<RobustFactorizationInstance, ProblemsError> {
    if !(0.0..=1.0).contains(&observed_fraction) {
        return Err(ProblemsError::BadFraction { name: "observed_fraction", value: observed_fraction });
    }
    if !(0.0..=1.0).contains(&outlier_fraction) {
        return Err(ProblemsError::BadFraction { name: "outlier_fraction", value: outlier_fraction });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let u0 = Array2::from_shape_fn((m, r), |_| rng.sample::<f64, _>(StandardNormal));
    let v0 = Array2::from_shape_fn((r, n), |_| rng.sample::<f64, _>(StandardNormal));
    let truth = u0.dot(&v0);

    let mask = Array2::from_shape_fn((m, n), |_| {
        if rng.random_range(0.0..1.0) < observed_fraction {
            1.0
        } else {
            0.0
        }
    });

    let mut x = truth.clone();
    let mut observed: Vec<(usize, usize)> = mask
        .indexed_iter()
        .filter(|(_, &v)| v == 1.0)
        .map(|(idx, _)| idx)
        .collect();
    let outliers = (outlier_fraction * observed.len() as f64).round() as usize;
    observed.shuffle(&mut rng);
    for &(i, j) in observed.iter().take(outliers) {
        let sign = if rng.random_range(0.0..1.0) < 0.5 { 1.0 } else { -1.0 };
        x[[i, j]] += sign * outlier_scale;
    }

    RobustFactorizationInstance::new(x, mask, r, false, Some(truth))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_clean_observation_reproduces_ground_truth() {
        let inst = synth_rmc(8, 6, 2, 1.0, 0.0, 5.0, 3).unwrap();
        assert!(inst.mask().iter().all(|&m| m == 1.0));
        assert_eq!(inst.data(), inst.ground_truth().unwrap());
        assert!(inst.is_realizable());
    }

    #[test]
    fn mask_density_concentrates() {
        let inst = synth_rmc(50, 50, 3, 0.7, 0.0, 1.0, 11).unwrap();
        let density = inst.observed_count() as f64 / 2500.0;
        assert!((density - 0.7).abs() <= 0.03, "density {density}");
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let a = synth_rmc(12, 9, 2, 0.6, 0.1, 3.0, 42).unwrap();
        let b = synth_rmc(12, 9, 2, 0.6, 0.1, 3.0, 42).unwrap();
        assert_eq!(a.data(), b.data());
        assert_eq!(a.mask(), b.mask());
        assert_eq!(a.ground_truth(), b.ground_truth());
    }

    #[test]
    fn outliers_break_realizability() {
        let inst = synth_rmc(20, 20, 2, 0.9, 0.2, 10.0, 5).unwrap();
        assert!(!inst.is_realizable());
        let spiked = inst
            .mask()
            .indexed_iter()
            .filter(|&((i, j), &m)| m == 1.0 && inst.data()[[i, j]] != inst.ground_truth().unwrap()[[i, j]])
            .count();
        let expected = (0.2 * inst.observed_count() as f64).round() as usize;
        assert_eq!(spiked, expected);
    }

    #[test]
    fn bad_fractions_rejected() {
        assert!(synth_rmc(4, 4, 1, 1.5, 0.0, 1.0, 0).is_err());
        assert!(synth_rmc(4, 4, 1, 0.5, -0.1, 1.0, 0).is_err());
    }
}
