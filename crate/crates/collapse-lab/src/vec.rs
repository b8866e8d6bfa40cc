//! Dimension-generic Euclidean vectors.
//!
//! The spatial dimension is runtime data (the command line sweeps over it), so
//! vectors are thin wrappers over a boxed slice of `f64` components with the
//! single structural invariant `dim ≥ 2`, checked at construction. Arithmetic
//! between vectors of different dimensions is a programming error and panics
//! with a clear message; fallible validation belongs to the constructors.

use crate::error::{Error, Result};
use crate::tol::UNIT_TOL;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Index, Mul, Neg, Sub};

/// A vector in `dim ≥ 2` dimensional Euclidean space.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VecD(Box<[f64]>);

impl VecD {
    /// Builds a vector from its components. Fails if fewer than 2 are given.
    pub fn new(components: impl Into<Vec<f64>>) -> Result<Self> {
        let components = components.into();
        if components.len() < 2 {
            return Err(Error::InvalidDimension(components.len()));
        }
        Ok(VecD(components.into_boxed_slice()))
    }

    /// The zero vector of the given dimension.
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidDimension(dim));
        }
        Ok(VecD(vec![0.0; dim].into_boxed_slice()))
    }

    /// The `i`-th standard basis vector of the given dimension.
    pub fn basis(dim: usize, i: usize) -> Result<Self> {
        let mut v = Self::zeros(dim)?;
        if i >= dim {
            return Err(Error::InvalidArgument(format!(
                "basis index {i} out of range for dimension {dim}"
            )));
        }
        v.0[i] = 1.0;
        Ok(v)
    }

    /// Spatial dimension (number of components).
    #[inline]
    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// Components as a slice.
    #[inline]
    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    /// Euclidean inner product. Panics on dimension mismatch.
    #[inline]
    pub fn dot(&self, other: &VecD) -> f64 {
        assert_eq!(
            self.dim(),
            other.dim(),
            "dot product of vectors with different dimensions"
        );
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| a * b)
            .sum()
    }

    /// Squared Euclidean norm.
    #[inline]
    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    /// Euclidean norm.
    #[inline]
    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// In-place `self += t · other`, the workhorse of free flight and
    /// impulse application. Panics on dimension mismatch.
    pub fn axpy(&mut self, t: f64, other: &VecD) {
        assert_eq!(self.dim(), other.dim(), "axpy with different dimensions");
        for (a, b) in self.0.iter_mut().zip(other.0.iter()) {
            *a += t * b;
        }
    }

    /// Scalar multiple.
    pub fn scale(&self, s: f64) -> VecD {
        VecD(self.0.iter().map(|a| a * s).collect())
    }

    /// Returns the vector scaled to unit norm. Fails on (numerically) zero input.
    pub fn normalized(&self) -> Result<VecD> {
        let n = self.norm();
        if n == 0.0 || !n.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "cannot normalize a vector with norm {n}"
            )));
        }
        Ok(self.scale(1.0 / n))
    }

    /// Whether the norm is within `tol` of 1.
    #[inline]
    pub fn is_unit(&self, tol: f64) -> bool {
        (self.norm() - 1.0).abs() <= tol
    }

    /// Validates unit length against the crate-wide direction tolerance.
    pub fn check_unit(&self) -> Result<()> {
        let norm = self.norm();
        if (norm - 1.0).abs() <= UNIT_TOL {
            Ok(())
        } else {
            Err(Error::NonUnitVector {
                norm,
                tol: UNIT_TOL,
            })
        }
    }

    /// Distance to another vector. Panics on dimension mismatch.
    #[inline]
    pub fn distance(&self, other: &VecD) -> f64 {
        (self - other).norm()
    }

    /// Component of `self` orthogonal to the unit vector `omega`:
    /// `self − (self·ω) ω`. Panics on dimension mismatch.
    pub fn reject_from_unit(&self, omega: &VecD) -> VecD {
        let mut out = self.clone();
        out.axpy(-self.dot(omega), omega);
        out
    }
}

impl fmt::Debug for VecD {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "VecD{:?}", self.as_slice())
    }
}

impl Index<usize> for VecD {
    type Output = f64;
    #[inline]
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &VecD {
    type Output = VecD;
    fn add(self, rhs: &VecD) -> VecD {
        let mut out = self.clone();
        out.axpy(1.0, rhs);
        out
    }
}

impl Sub for &VecD {
    type Output = VecD;
    fn sub(self, rhs: &VecD) -> VecD {
        let mut out = self.clone();
        out.axpy(-1.0, rhs);
        out
    }
}

impl Mul<f64> for &VecD {
    type Output = VecD;
    fn mul(self, s: f64) -> VecD {
        self.scale(s)
    }
}

impl Neg for &VecD {
    type Output = VecD;
    fn neg(self) -> VecD {
        self.scale(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_dimension_below_two() {
        assert!(matches!(
            VecD::new(vec![1.0]),
            Err(Error::InvalidDimension(1))
        ));
        assert!(matches!(VecD::zeros(0), Err(Error::InvalidDimension(0))));
    }

    #[test]
    fn dot_and_norm() {
        let a = VecD::new(vec![3.0, 4.0]).unwrap();
        assert_eq!(a.norm(), 5.0);
        let b = VecD::new(vec![-4.0, 3.0]).unwrap();
        assert_eq!(a.dot(&b), 0.0);
    }

    #[test]
    fn basis_vectors_are_orthonormal() {
        for dim in 2..=5 {
            for i in 0..dim {
                let e_i = VecD::basis(dim, i).unwrap();
                assert!(e_i.is_unit(0.0));
                for j in 0..dim {
                    let e_j = VecD::basis(dim, j).unwrap();
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert_eq!(e_i.dot(&e_j), expected);
                }
            }
        }
    }

    #[test]
    fn rejection_is_orthogonal() {
        let omega = VecD::new(vec![1.0, 0.0, 0.0]).unwrap();
        let w = VecD::new(vec![2.0, -1.5, 0.25]).unwrap();
        let perp = w.reject_from_unit(&omega);
        assert_eq!(perp.dot(&omega), 0.0);
        assert_eq!(perp.as_slice(), &[0.0, -1.5, 0.25]);
    }

    #[test]
    fn normalized_rejects_zero() {
        let z = VecD::zeros(3).unwrap();
        assert!(z.normalized().is_err());
    }

    #[test]
    #[should_panic(expected = "different dimensions")]
    fn dimension_mismatch_panics() {
        let a = VecD::zeros(2).unwrap();
        let b = VecD::zeros(3).unwrap();
        let _ = a.dot(&b);
    }
}
