use std::fmt;

use super::{C64, ONE, ZERO};
use crate::error::{Error, Result};

/// Polynomial with complex coefficients, stored in ascending degree.
///
/// Trailing zero coefficients are trimmed on construction, so `degree()` is
/// `len - 1` and the leading coefficient is nonzero unless the polynomial is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly {
    coeffs: Vec<C64>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<C64>) -> Self {
        while coeffs.len() > 1 && coeffs.last() == Some(&ZERO) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(ZERO);
        }
        Self { coeffs }
    }

    pub fn from_real(coeffs: &[f64]) -> Self {
        Self::new(coeffs.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn constant(value: C64) -> Self {
        Self::new(vec![value])
    }

    pub fn zero() -> Self {
        Self::constant(ZERO)
    }

    /// `prod_j (z - roots[j])`.
    pub fn from_roots(roots: &[C64]) -> Self {
        roots
            .iter()
            .fold(Self::constant(ONE), |acc, &r| acc.mul(&Self::new(vec![-r, ONE])))
    }

    pub fn coeffs(&self) -> &[C64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.len() == 1 && self.coeffs[0] == ZERO
    }

    pub fn leading(&self) -> C64 {
        self.coeffs[self.degree()]
    }

    /// Horner evaluation.
    pub fn eval(&self, z: C64) -> C64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &a| acc * z + a)
    }

    /// Value and first derivative in one Horner pass.
    pub fn eval_with_derivative(&self, z: C64) -> (C64, C64) {
        let mut value = ZERO;
        let mut slope = ZERO;
        for &a in self.coeffs.iter().rev() {
            slope = slope * z + value;
            value = value * z + a;
        }
        (value, slope)
    }

    /// `sum |a_i| |z|^i`, the natural scale for the rounding error of `eval(z)`.
    pub fn magnitude_at(&self, z: C64) -> f64 {
        let r = z.norm();
        self.coeffs.iter().rev().fold(0.0, |acc, a| acc * r + a.norm())
    }

    pub fn derivative(&self) -> Self {
        if self.degree() == 0 {
            return Self::zero();
        }
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &a)| a * i as f64)
                .collect(),
        )
    }

    pub fn scale(&self, factor: C64) -> Self {
        Self::new(self.coeffs.iter().map(|&a| a * factor).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Self, i: usize| p.coeffs.get(i).copied().unwrap_or(ZERO);
        Self::new((0..n).map(|i| get(self, i) + get(other, i)).collect())
    }

    /// Divides by `(z - root)` and returns the quotient.
    ///
    /// The remainder must be below `tol * magnitude_at(root)`; it is discarded.
    pub fn synthetic_division(&self, root: C64, tol: f64) -> Result<Self> {
        let (quotient, remainder) = self.divide_linear(root);
        let scale = self.magnitude_at(root).max(f64::MIN_POSITIVE);
        if remainder.norm() > tol * scale {
            return Err(Error::NotARoot { residual: remainder.norm(), tol: tol * scale });
        }
        Ok(quotient)
    }

    /// Quotient and remainder of division by `(z - root)`.
    pub fn divide_linear(&self, root: C64) -> (Self, C64) {
        let n = self.degree();
        if n == 0 {
            return (Self::zero(), self.coeffs[0]);
        }
        let mut quotient = vec![ZERO; n];
        let mut carry = self.coeffs[n];
        for i in (0..n).rev() {
            quotient[i] = carry;
            carry = self.coeffs[i] + root * carry;
        }
        (Self::new(quotient), carry)
    }

    /// First `len` Taylor coefficients at the origin of `self / den`.
    pub fn series_quotient(&self, den: &Self, len: usize) -> Result<Vec<C64>> {
        let d0 = den.coeffs[0];
        if d0 == ZERO {
            return Err(Error::Domain("series quotient: denominator vanishes at 0".into()));
        }
        let mut out = vec![ZERO; len];
        for n in 0..len {
            let mut acc = self.coeffs.get(n).copied().unwrap_or(ZERO);
            for (k, &dk) in den.coeffs.iter().enumerate().skip(1).take(n) {
                acc -= dk * out[n - k];
            }
            out[n] = acc / d0;
        }
        Ok(out)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, a) in self.coeffs.iter().enumerate().rev() {
            if *a == ZERO && !self.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "({a})")?,
                1 => write!(f, "({a})z")?,
                _ => write!(f, "({a})z^{i}")?,
            }
        }
        Ok(())
    }
}
