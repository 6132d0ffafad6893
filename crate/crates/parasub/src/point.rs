//! Dense points in `R^n` with construction-time finiteness checks.
//!
//! Every quantity that crosses an oracle boundary is a [`Point`]; rejecting
//! NaN and infinity at construction keeps failures at the boundary where
//! they are attributable to a specific oracle and iteration.
//!
//! Factorized problems flatten a pair `(U, V)` into one point: `U` in
//! row-major order first, then `V` in row-major order. See
//! [`crate::problems::factorization::FactorShape`] for the pack/unpack
//! helpers that own this layout.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PointError {
    #[error("point entry {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },
    #[error("point has dimension {actual}, expected {expected}")]
    DimensionMismatch { expected: usize, actual: usize },
}

/// An element of `R^n`. All entries are finite.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    /// Wraps a coordinate vector, rejecting NaN and infinite entries.
    pub fn new(values: Vec<f64>) -> Result<Self, PointError> {
        for (index, &value) in values.iter().enumerate() {
            if !value.is_finite() {
                return Err(PointError::NonFinite { index, value });
            }
        }
        Ok(Point(values))
    }

    pub fn zeros(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    /// Euclidean norm.
    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    /// Euclidean distance to `other`.
    pub fn distance(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    /// Returns `self + scale * dir` without validating finiteness; callers
    /// that may produce overflow should go through [`Point::new`].
    pub(crate) fn add_scaled_unchecked(&self, scale: f64, dir: &[f64]) -> Vec<f64> {
        debug_assert_eq!(self.len(), dir.len());
        self.0
            .iter()
            .zip(dir)
            .map(|(a, d)| a + scale * d)
            .collect()
    }
}

impl std::ops::Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl TryFrom<Vec<f64>> for Point {
    type Error = PointError;
    fn try_from(values: Vec<f64>) -> Result<Self, PointError> {
        Point::new(values)
    }
}

impl AsRef<[f64]> for Point {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_nan_and_infinity() {
        assert!(matches!(
            Point::new(vec![0.0, f64::NAN]),
            Err(PointError::NonFinite { index: 1, .. })
        ));
        assert!(Point::new(vec![1.0, f64::INFINITY]).is_err());
        assert!(Point::new(vec![1.0, -2.5]).is_ok());
    }

    #[test]
    fn norm_and_distance() {
        let a = Point::new(vec![3.0, 4.0]).unwrap();
        let b = Point::zeros(2);
        assert_eq!(a.norm(), 5.0);
        assert_eq!(a.distance(&b), 5.0);
        assert_eq!(b.distance(&a), 5.0);
    }
}
