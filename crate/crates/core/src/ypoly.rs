//! Dense univariate polynomials in `y` with exact rational coefficients.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{Signed, Zero};

use crate::rational::{int, to_f64, Rational};

/// `c[0] + c[1] y + ... + c[d] y^d`, trailing zeros trimmed so the leading
/// coefficient is nonzero (or the vector is empty for the zero polynomial).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct YPolynomial {
    coeffs: Vec<Rational>,
}

impl YPolynomial {
    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// `c * y^degree`
    pub fn monomial(c: Rational, degree: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    /// The polynomial `y`.
    pub fn y() -> Self {
        Self::monomial(int(1), 1)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    /// Coefficient of `y^k`; zero beyond the degree.
    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_else(Rational::zero)
    }

    /// Degree, with the zero polynomial at -1.
    pub fn degree(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * int(k as i64))
                .collect(),
        )
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|c| c * factor).collect())
    }

    /// Multiplies by `y`.
    pub fn shift_up(&self) -> Self {
        if self.is_zero() {
            return Self::zero();
        }
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        coeffs.extend(self.coeffs.iter().cloned());
        Self { coeffs }
    }

    pub fn eval(&self, y: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * y + c)
    }

    pub fn eval_f64(&self, y: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * y + to_f64(c))
    }
}

impl Add for &YPolynomial {
    type Output = YPolynomial;

    fn add(self, rhs: &YPolynomial) -> YPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        YPolynomial::from_coeffs((0..len).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &YPolynomial {
    type Output = YPolynomial;

    fn sub(self, rhs: &YPolynomial) -> YPolynomial {
        let len = self.coeffs.len().max(rhs.coeffs.len());
        YPolynomial::from_coeffs((0..len).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Neg for &YPolynomial {
    type Output = YPolynomial;

    fn neg(self) -> YPolynomial {
        YPolynomial {
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Mul<&Rational> for &YPolynomial {
    type Output = YPolynomial;

    fn mul(self, rhs: &Rational) -> YPolynomial {
        self.scale(rhs)
    }
}

impl fmt::Display for YPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let magnitude = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if c.is_negative() { '-' } else { '+' })?;
            }
            first = false;
            let unit = magnitude == int(1);
            match (k, unit) {
                (0, _) => write!(f, "{magnitude}")?,
                (1, true) => write!(f, "y")?,
                (1, false) => write!(f, "{magnitude}*y")?,
                (_, true) => write!(f, "y^{k}")?,
                (_, false) => write!(f, "{magnitude}*y^{k}")?,
            }
        }
        Ok(())
    }
}
