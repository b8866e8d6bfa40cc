//! Minimal complex scalar for eigenvalue reporting.
//!
//! The spectral analyses only ever need to *report* eigenvalues, compare
//! their moduli, and check polynomial residuals, so a small value type beats
//! pulling in a numerics crate.

use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Mul, Sub};

/// A complex number `re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Complex {
    pub re: f64,
    pub im: f64,
}

impl Complex {
    pub const ZERO: Complex = Complex { re: 0.0, im: 0.0 };

    #[inline]
    pub fn new(re: f64, im: f64) -> Complex {
        Complex { re, im }
    }

    #[inline]
    pub fn real(re: f64) -> Complex {
        Complex { re, im: 0.0 }
    }

    #[inline]
    pub fn conj(self) -> Complex {
        Complex::new(self.re, -self.im)
    }

    #[inline]
    pub fn modulus_sq(self) -> f64 {
        self.re * self.re + self.im * self.im
    }

    #[inline]
    pub fn modulus(self) -> f64 {
        self.re.hypot(self.im)
    }

    #[inline]
    pub fn is_real(self, tol: f64) -> bool {
        self.im.abs() <= tol
    }

    /// Horner evaluation of a real-coefficient polynomial at `self`.
    /// Coefficients are ordered highest degree first.
    pub fn eval_poly(self, coeffs: &[f64]) -> Complex {
        coeffs
            .iter()
            .fold(Complex::ZERO, |acc, &c| acc * self + Complex::real(c))
    }
}

impl Add for Complex {
    type Output = Complex;
    #[inline]
    fn add(self, rhs: Complex) -> Complex {
        Complex::new(self.re + rhs.re, self.im + rhs.im)
    }
}

impl Sub for Complex {
    type Output = Complex;
    #[inline]
    fn sub(self, rhs: Complex) -> Complex {
        Complex::new(self.re - rhs.re, self.im - rhs.im)
    }
}

impl Mul for Complex {
    type Output = Complex;
    #[inline]
    fn mul(self, rhs: Complex) -> Complex {
        Complex::new(
            self.re * rhs.re - self.im * rhs.im,
            self.re * rhs.im + self.im * rhs.re,
        )
    }
}

impl Mul<f64> for Complex {
    type Output = Complex;
    #[inline]
    fn mul(self, rhs: f64) -> Complex {
        Complex::new(self.re * rhs, self.im * rhs)
    }
}

impl fmt::Display for Complex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im >= 0.0 {
            write!(f, "{}+{}i", self.re, self.im)
        } else {
            write!(f, "{}{}i", self.re, self.im)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_modulus() {
        let a = Complex::new(1.0, 2.0);
        let b = Complex::new(3.0, -1.0);
        let p = a * b;
        assert_eq!(p, Complex::new(5.0, 5.0));
        assert!((p.modulus() - 50f64.sqrt()).abs() < 1e-15);
        assert_eq!(a.conj(), Complex::new(1.0, -2.0));
    }

    #[test]
    fn polynomial_evaluation_at_known_root() {
        // z² - 2z + 5 has roots 1 ± 2i.
        let root = Complex::new(1.0, 2.0);
        let val = root.eval_poly(&[1.0, -2.0, 5.0]);
        assert!(val.modulus() < 1e-14);
    }
}
