//! Real phase retrieval with the L1 objective
//! `f(x) = (1/m) * | (A x)^2 - b |_1`, a 1-paraconvex composite objective
//! whose solutions are determined only up to sign.

use std::sync::Arc;

use ndarray::{Array1, Array2};

use crate::point::Point;
use crate::problem::{ProblemInstance, ReferenceSolution, SubgradientSample};
use crate::problems::ProblemsError;

#[derive(Debug, Clone)]
pub struct PhaseRetrievalInstance {
    a: Array2<f64>,
    b: Array1<f64>,
    ground_truth: Option<Point>,
}

impl PhaseRetrievalInstance {
    pub fn new(
        a: Array2<f64>,
        b: Array1<f64>,
        ground_truth: Option<Point>,
    ) -> Result<Self, ProblemsError> {
        let (m, n) = a.dim();
        if b.len() != m {
            return Err(ProblemsError::ShapeMismatch(format!(
                "A is {m}x{n} but b has {} entries",
                b.len()
            )));
        }
        for (index, &value) in b.iter().enumerate() {
            if !(value.is_finite() && value >= 0.0) {
                return Err(ProblemsError::NegativeMeasurement { index, value });
            }
        }
        if let Some(truth) = &ground_truth {
            if truth.len() != n {
                return Err(ProblemsError::ShapeMismatch(format!(
                    "ground truth has {} entries, expected {n}",
                    truth.len()
                )));
            }
            // realizable instances must satisfy b = (A x*)^2 entrywise
            for i in 0..m {
                let dot: f64 = (0..n).map(|j| a[[i, j]] * truth[j]).sum();
                if (dot * dot - b[i]).abs() > 1e-9 * b[i].abs().max(1.0) {
                    return Err(ProblemsError::UnrealizableMeasurement { index: i });
                }
            }
        }
        Ok(PhaseRetrievalInstance { a, b, ground_truth })
    }

    /// A realizable instance with seeded Gaussian measurement rows and a
    /// seeded ground-truth signal.
    pub fn gaussian(m: usize, n: usize, seed: u64) -> Self {
        use rand::Rng;
        use rand::SeedableRng;
        use rand_distr::StandardNormal;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let a = Array2::from_shape_fn((m, n), |_| rng.sample::<f64, _>(StandardNormal));
        let truth: Vec<f64> = (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let b = Array1::from_iter((0..m).map(|i| {
            let dot: f64 = (0..n).map(|j| a[[i, j]] * truth[j]).sum();
            dot * dot
        }));
        PhaseRetrievalInstance::new(a, b, Some(Point::new(truth).expect("finite")))
            .expect("construction is realizable")
    }

    pub fn measurements(&self) -> (&Array2<f64>, &Array1<f64>) {
        (&self.a, &self.b)
    }
}

/// Builds the solver-facing problem. The subgradient uses the chain-rule
/// selection `(2/m) * sum_i sign(<a_i, x>^2 - b_i) <a_i, x> a_i` with
/// `sign(0) = 0`.
pub fn phase_oracle(instance: &PhaseRetrievalInstance) -> ProblemInstance {
    let (m, n) = instance.a.dim();
    let a = Arc::new(instance.a.clone());
    let b = Arc::new(instance.b.clone());

    let value = {
        let a = Arc::clone(&a);
        let b = Arc::clone(&b);
        move |x: &Point| {
            let mut total = 0.0;
            for i in 0..m {
                let dot: f64 = (0..n).map(|j| a[[i, j]] * x[j]).sum();
                total += (dot * dot - b[i]).abs();
            }
            total / m as f64
        }
    };

    let subgradient = {
        let a = Arc::clone(&a);
        let b = Arc::clone(&b);
        move |x: &Point| {
            let mut g = vec![0.0; n];
            for i in 0..m {
                let dot: f64 = (0..n).map(|j| a[[i, j]] * x[j]).sum();
                let resid = dot * dot - b[i];
                let s = if resid > 0.0 {
                    1.0
                } else if resid < 0.0 {
                    -1.0
                } else {
                    0.0
                };
                if s != 0.0 {
                    let w = 2.0 / m as f64 * s * dot;
                    for j in 0..n {
                        g[j] += w * a[[i, j]];
                    }
                }
            }
            SubgradientSample::new(Point::new(g).expect("finite"))
        }
    };

    let mut builder = ProblemInstance::builder("phase_retrieval", n)
        .value(value)
        .subgradient(subgradient);
    if let Some(truth) = &instance.ground_truth {
        builder = builder
            .reference(ReferenceSolution::SignSymmetric(truth.clone()))
            .f_star(0.0);
    }
    builder.build().expect("oracle closures are total")
}
