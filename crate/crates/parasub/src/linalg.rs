//! Small dense linear-algebra kernels: a cyclic Jacobi eigensolver for
//! symmetric matrices and a randomized truncated SVD built on it.
//!
//! Problem sizes here are desk scale (factors of rank up to ~100), so a
//! dependency-free Jacobi sweep is plenty and keeps results bit-stable
//! across platforms.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Eigenvalues (ascending) and matching eigenvectors (columns) of a
/// symmetric matrix, via cyclic Jacobi rotations.
pub fn symmetric_eigen(matrix: &Array2<f64>) -> (Array1<f64>, Array2<f64>) {
    let n = matrix.nrows();
    assert_eq!(n, matrix.ncols(), "matrix must be square");
    let mut a = matrix.clone();
    let mut v = Array2::eye(n);

    let scale = a.iter().fold(0.0f64, |m, x| m.max(x.abs())).max(1.0);
    let tol = 1e-14 * scale;
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(a[[p, q]].abs());
            }
        }
        if off <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq.abs() <= tol * 1e-2 {
                    continue;
                }
                let theta = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..n {
                    let aip = a[[i, p]];
                    let aiq = a[[i, q]];
                    a[[i, p]] = c * aip - s * aiq;
                    a[[i, q]] = s * aip + c * aiq;
                }
                for j in 0..n {
                    let apj = a[[p, j]];
                    let aqj = a[[q, j]];
                    a[[p, j]] = c * apj - s * aqj;
                    a[[q, j]] = s * apj + c * aqj;
                }
                for i in 0..n {
                    let vip = v[[i, p]];
                    let viq = v[[i, q]];
                    v[[i, p]] = c * vip - s * viq;
                    v[[i, q]] = s * vip + c * viq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].total_cmp(&a[[j, j]]));
    let eigenvalues = Array1::from_iter(order.iter().map(|&i| a[[i, i]]));
    let mut eigenvectors = Array2::zeros((n, n));
    for (col, &i) in order.iter().enumerate() {
        for row in 0..n {
            eigenvectors[[row, col]] = v[[row, i]];
        }
    }
    (eigenvalues, eigenvectors)
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn smallest_eigenvalue(matrix: &Array2<f64>) -> f64 {
    symmetric_eigen(matrix).0[0]
}

/// Rank-`r` truncated SVD factors of `x`, returned as
/// `(u_scaled, v_scaled)` with `u_scaled = U_r S_r^{1/2}` (m x r) and
/// `v_scaled = S_r^{1/2} V_r^T` (r x n), so `u_scaled @ v_scaled`
/// approximates `x`.
///
/// Uses a seeded randomized range finder with power iterations; for a
/// matrix of exact rank <= r the factorization is exact to rounding.
pub fn truncated_svd_factors(x: &Array2<f64>, r: usize, seed: u64) -> (Array2<f64>, Array2<f64>) {
    let (m, n) = x.dim();
    let r = r.min(m).min(n);
    let oversample = 8.min(m.min(n).saturating_sub(r));
    let k = r + oversample;

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let omega = Array2::from_shape_fn((n, k), |_| rng.sample::<f64, _>(StandardNormal));

    // Range finder with two power iterations, re-orthonormalized each pass.
    let mut q = orthonormal_columns(x.dot(&omega));
    for _ in 0..2 {
        q = orthonormal_columns(x.t().dot(&q));
        q = orthonormal_columns(x.dot(&q));
    }

    // Project: b = q^T x (k x n); SVD of b via the k x k Gram matrix.
    let b = q.t().dot(x);
    let gram = b.dot(&b.t());
    let (eigenvalues, eigenvectors) = symmetric_eigen(&gram);

    // Take the r largest (eigenvalues come back ascending).
    let kk = gram.nrows();
    let mut u_scaled = Array2::zeros((m, r));
    let mut v_scaled = Array2::zeros((r, n));
    let qw = q.dot(&eigenvectors); // m x kk, columns are left singular vectors
    for j in 0..r {
        let col = kk - 1 - j;
        let sigma_sq = eigenvalues[col].max(0.0);
        let sigma = sigma_sq.sqrt();
        let root = sigma.sqrt();
        if sigma <= 1e-300 {
            continue; // rank-deficient: leave zero factors
        }
        // right singular vector: b^T w / sigma
        for row in 0..m {
            u_scaled[[row, j]] = qw[[row, col]] * root;
        }
        for cn in 0..n {
            let mut acc = 0.0;
            for i in 0..kk {
                acc += b[[i, cn]] * eigenvectors[[i, col]];
            }
            v_scaled[[j, cn]] = acc / sigma * root;
        }
    }
    (u_scaled, v_scaled)
}

/// Gram-Schmidt orthonormalization of the columns (two passes for
/// stability). Zero columns are dropped to the trailing positions.
fn orthonormal_columns(mut a: Array2<f64>) -> Array2<f64> {
    let (m, k) = a.dim();
    for j in 0..k {
        for _ in 0..2 {
            for i in 0..j {
                let mut dot = 0.0;
                for row in 0..m {
                    dot += a[[row, i]] * a[[row, j]];
                }
                for row in 0..m {
                    a[[row, j]] -= dot * a[[row, i]];
                }
            }
        }
        let norm = (0..m).map(|row| a[[row, j]] * a[[row, j]]).sum::<f64>().sqrt();
        if norm > 1e-12 {
            for row in 0..m {
                a[[row, j]] /= norm;
            }
        } else {
            for row in 0..m {
                a[[row, j]] = 0.0;
            }
        }
    }
    a
}
