//! Sparse polynomials in `(y, z)` with exact rational coefficients.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use num::{Signed, Zero};

use crate::error::DivisionByZError;
use crate::rational::{int, to_f64, Rational};
use crate::ypoly::YPolynomial;

/// Map from `(y_degree, z_degree)` to a nonzero coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BivariatePolynomial {
    terms: BTreeMap<(usize, usize), Rational>,
}

impl BivariatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(c: Rational, y_degree: usize, z_degree: usize) -> Self {
        let mut p = Self::zero();
        p.add_term(y_degree, z_degree, c);
        p
    }

    /// `f(y) * z^z_degree`
    pub fn from_y_poly(f: &YPolynomial, z_degree: usize) -> Self {
        let mut p = Self::zero();
        for (a, c) in f.coeffs().iter().enumerate() {
            p.add_term(a, z_degree, c.clone());
        }
        p
    }

    /// Accumulates `c * y^a z^b`, dropping the entry if it cancels to zero.
    pub fn add_term(&mut self, a: usize, b: usize, c: Rational) {
        if c.is_zero() {
            return;
        }
        let key = (a, b);
        let sum = match self.terms.remove(&key) {
            Some(existing) => existing + c,
            None => c,
        };
        if !sum.is_zero() {
            self.terms.insert(key, sum);
        }
    }

    pub fn coeff(&self, y_degree: usize, z_degree: usize) -> Rational {
        self.terms
            .get(&(y_degree, z_degree))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&(usize, usize), &Rational)> {
        self.terms.iter()
    }

    /// Number of stored (nonzero) monomials.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_empty(&self) -> bool {
        self.is_zero()
    }

    /// Smallest z-degree present, `None` for the zero polynomial.
    pub fn min_z_degree(&self) -> Option<usize> {
        self.terms.keys().map(|&(_, b)| b).min()
    }

    /// Coefficient of `z^b` as a polynomial in `y`.
    pub fn z_slice(&self, b: usize) -> YPolynomial {
        let deg = self
            .terms
            .keys()
            .filter(|&&(_, zb)| zb == b)
            .map(|&(a, _)| a)
            .max();
        match deg {
            None => YPolynomial::zero(),
            Some(d) => YPolynomial::from_coeffs((0..=d).map(|a| self.coeff(a, b)).collect()),
        }
    }

    fn map_terms(
        &self,
        f: impl Fn(usize, usize, &Rational) -> Option<(usize, usize, Rational)>,
    ) -> Self {
        let mut out = Self::zero();
        for (&(a, b), c) in &self.terms {
            if let Some((na, nb, nc)) = f(a, b, c) {
                out.add_term(na, nb, nc);
            }
        }
        out
    }

    pub fn scale(&self, factor: &Rational) -> Self {
        self.map_terms(|a, b, c| Some((a, b, c * factor)))
    }

    pub fn d_y(&self) -> Self {
        self.map_terms(|a, b, c| (a > 0).then(|| (a - 1, b, c * int(a as i64))))
    }

    pub fn d_z(&self) -> Self {
        self.map_terms(|a, b, c| (b > 0).then(|| (a, b - 1, c * int(b as i64))))
    }

    /// Multiplies by `y^dy z^dz`.
    pub fn shift(&self, dy: usize, dz: usize) -> Self {
        self.map_terms(|a, b, c| Some((a + dy, b + dz, c.clone())))
    }

    /// `∫_0^z p dz`: each `y^a z^b` becomes `y^a z^(b+1) / (b+1)`.
    pub fn integrate_z(&self) -> Self {
        self.map_terms(|a, b, c| Some((a, b + 1, c / int(b as i64 + 1))))
    }

    /// Lowers every z-degree by one; fails on any monomial free of `z`.
    pub fn divide_by_z(&self) -> Result<Self, DivisionByZError> {
        if let Some(&(a, _)) = self.terms.keys().find(|&&(_, b)| b == 0) {
            return Err(DivisionByZError { y_degree: a });
        }
        Ok(self.map_terms(|a, b, c| Some((a, b - 1, c.clone()))))
    }

    pub fn eval(&self, y: &Rational, z: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (&(a, b), c) in &self.terms {
            acc += c * pow(y, a) * pow(z, b);
        }
        acc
    }

    pub fn eval_f64(&self, y: f64, z: f64) -> f64 {
        self.terms
            .iter()
            .map(|(&(a, b), c)| to_f64(c) * y.powi(a as i32) * z.powi(b as i32))
            .sum()
    }

    /// Largest numerator bit length over all coefficients; 0 when zero.
    pub fn max_numerator_bits(&self) -> u64 {
        self.terms
            .values()
            .map(crate::rational::numerator_bits)
            .max()
            .unwrap_or(0)
    }
}

fn pow(x: &Rational, e: usize) -> Rational {
    num::pow(x.clone(), e)
}

impl Add for &BivariatePolynomial {
    type Output = BivariatePolynomial;

    fn add(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, c.clone());
        }
        out
    }
}

impl Sub for &BivariatePolynomial {
    type Output = BivariatePolynomial;

    fn sub(self, rhs: &BivariatePolynomial) -> BivariatePolynomial {
        let mut out = self.clone();
        for (&(a, b), c) in &rhs.terms {
            out.add_term(a, b, -c);
        }
        out
    }
}

impl Neg for &BivariatePolynomial {
    type Output = BivariatePolynomial;

    fn neg(self) -> BivariatePolynomial {
        self.scale(&int(-1))
    }
}

impl fmt::Display for BivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (i, (&(a, b), c)) in self.terms.iter().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            write!(f, "{}", c.abs())?;
            match a {
                0 => {}
                1 => write!(f, "*y")?,
                _ => write!(f, "*y^{a}")?,
            }
            match b {
                0 => {}
                1 => write!(f, "*z")?,
                _ => write!(f, "*z^{b}")?,
            }
        }
        Ok(())
    }
}
