//! Exact check of the integral (decomposition-method) form of the recurrence.
//!
//! With `u_n(y, z) = f_n(y) z^n`, each Taylor term must satisfy
//!
//! ```text
//! u_n = (1/z) ∫_0^z [2 ∂y² u_n + y ∂y u_n + 2(k1-1) z ∂y u_{n-1} - 2 k2 z² u_{n-2}] dz
//! ```
//!
//! This module rebuilds the right-hand side symbolically for every order of a
//! [`SeriesSolution`] and compares it with `u_n` coefficient by coefficient.

use serde::{Deserialize, Serialize};

use crate::bivariate::BivariatePolynomial;
use crate::error::DivisionByZError;
use crate::rational::int;
use crate::series::{ParamSet, SeriesSolution};

/// `u_n = f_n(y) z^n`; every monomial of `value` has z-degree `order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdmTerm {
    pub order: usize,
    pub value: BivariatePolynomial,
}

impl AdmTerm {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            value: BivariatePolynomial::zero(),
        }
    }
}

pub fn lift(s: &SeriesSolution) -> Vec<AdmTerm> {
    s.terms()
        .iter()
        .enumerate()
        .map(|(j, f)| AdmTerm {
            order: j,
            value: BivariatePolynomial::from_y_poly(f, j),
        })
        .collect()
}

pub fn integrate_z(p: &BivariatePolynomial) -> BivariatePolynomial {
    p.integrate_z()
}

pub fn divide_by_z(p: &BivariatePolynomial) -> Result<BivariatePolynomial, DivisionByZError> {
    p.divide_by_z()
}

/// `(1/z) ∫_0^z [2 ∂y² u_n + y ∂y u_n + 2(k1-1) z ∂y u_{n-1} - 2 k2 z² u_{n-2}] dz`.
///
/// Missing lower orders are passed as zero terms.
pub fn adm_rhs(
    u_n: &AdmTerm,
    u_prev: &AdmTerm,
    u_prev2: &AdmTerm,
    params: &ParamSet,
) -> Result<BivariatePolynomial, DivisionByZError> {
    let un_y = u_n.value.d_y();
    let integrand = &(&(&un_y.d_y().scale(&int(2)) + &un_y.shift(1, 0))
        + &u_prev
            .value
            .d_y()
            .shift(0, 1)
            .scale(&(params.drift() * int(2))))
        - &u_prev2.value.shift(0, 2).scale(&(&params.k2 * int(2)));
    divide_by_z(&integrate_z(&integrand))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderCheck {
    pub n: usize,
    pub pass: bool,
    /// Bit length of the largest defect numerator; 0 when the order passes.
    pub max_abs_defect_numerator_bits: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdmReport {
    pub orders: Vec<OrderCheck>,
    pub pass: bool,
}

impl AdmReport {
    pub fn failing_orders(&self) -> Vec<usize> {
        self.orders
            .iter()
            .filter(|o| !o.pass)
            .map(|o| o.n)
            .collect()
    }
}

/// Compares `adm_rhs` against `u_n` for every order `0..=N`.
pub fn adm_identity_check(s: &SeriesSolution) -> AdmReport {
    let terms = lift(s);
    let term_at = |k: isize| -> AdmTerm {
        if k < 0 {
            AdmTerm::zero(0)
        } else {
            terms[k as usize].clone()
        }
    };
    let orders: Vec<OrderCheck> = (0..terms.len())
        .map(|n| {
            let u_n = &terms[n];
            let defect = match adm_rhs(
                u_n,
                &term_at(n as isize - 1),
                &term_at(n as isize - 2),
                s.params(),
            ) {
                Ok(rhs) => &rhs - &u_n.value,
                // Unreachable for lifted terms: the integral always carries a factor z.
                Err(_) => u_n.value.clone(),
            };
            OrderCheck {
                n,
                pass: defect.is_zero(),
                max_abs_defect_numerator_bits: defect.max_numerator_bits(),
            }
        })
        .collect();
    let pass = orders.iter().all(|o| o.pass);
    AdmReport { orders, pass }
}
