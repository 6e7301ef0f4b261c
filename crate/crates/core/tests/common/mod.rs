//! Test-only oracles, kept independent of the library's polynomial types.
#![allow(dead_code)]

use std::collections::BTreeMap;

use bsseries::rational::{factorial, int};
use bsseries::{Rational, YPolynomial};
use num::Zero;

/// Minimal polynomial in (y, z): (y-degree, z-degree) -> coefficient.
#[derive(Clone, Default, PartialEq, Debug)]
struct Poly(BTreeMap<(u32, u32), Rational>);

impl Poly {
    fn term(c: Rational, a: u32, b: u32) -> Self {
        let mut p = Poly::default();
        p.add(a, b, c);
        p
    }

    fn add(&mut self, a: u32, b: u32, c: Rational) {
        let e = self.0.entry((a, b)).or_insert_with(Rational::zero);
        *e += c;
        if e.is_zero() {
            self.0.remove(&(a, b));
        }
    }

    fn plus(&self, other: &Poly, factor: &Rational) -> Poly {
        let mut out = self.clone();
        for (&(a, b), c) in &other.0 {
            out.add(a, b, c * factor);
        }
        out
    }

    fn times_monomial(&self, c: &Rational, a: u32, b: u32) -> Poly {
        let mut out = Poly::default();
        for (&(x, y), v) in &self.0 {
            out.add(x + a, y + b, v * c);
        }
        out
    }

    fn dy(&self) -> Poly {
        let mut out = Poly::default();
        for (&(a, b), c) in &self.0 {
            if a > 0 {
                out.add(a - 1, b, c * int(a as i64));
            }
        }
        out
    }

    fn dz(&self) -> Poly {
        let mut out = Poly::default();
        for (&(a, b), c) in &self.0 {
            if b > 0 {
                out.add(a, b - 1, c * int(b as i64));
            }
        }
        out
    }
}

/// Substitutes `u = (y + c z) exp(-k2 z²)` into
/// `∂z(z u) = 2 u_yy + y u_y + 2(k1-1) z u_y - 2 k2 z² u`.
///
/// Every term is a polynomial times `E = exp(-k2 z²)` with `E_z = -2 k2 z E`,
/// so the identity holds iff the polynomial prefactors agree.
pub fn candidate_satisfies_pde(k1: &Rational, k2: &Rational, c: &Rational) -> bool {
    let one = int(1);
    let p = Poly::term(one.clone(), 1, 0).plus(&Poly::term(c.clone(), 0, 1), &one);
    let zp = p.times_monomial(&one, 0, 1);
    // ∂z(z P E) = (∂z(zP) - 2 k2 z · zP) E
    let lhs = zp
        .dz()
        .plus(&zp.times_monomial(&(k2 * int(-2)), 0, 1), &one);
    let py = p.dy();
    let rhs = py
        .dy()
        .times_monomial(&int(2), 0, 0)
        .plus(&py.times_monomial(&one, 1, 0), &one)
        .plus(&py.times_monomial(&((k1 - int(1)) * int(2)), 0, 1), &one)
        .plus(&p.times_monomial(&(k2 * int(-2)), 0, 2), &one);
    lhs.plus(&rhs, &int(-1)).0.is_empty()
}

pub fn closed_form_satisfies_pde(k1: &Rational, k2: &Rational) -> bool {
    candidate_satisfies_pde(k1, k2, &(k1 - int(1)))
}

/// Coefficient of `z^n` in `(y + (k1-1) z) Σ (-k2 z²)^m / m!`.
pub fn closed_form_taylor_coefficient(n: usize, k1: &Rational, k2: &Rational) -> YPolynomial {
    let m = n / 2;
    let c = num::pow(-k2.clone(), m) / Rational::from_integer(factorial(m as u32));
    if n.is_multiple_of(2) {
        YPolynomial::monomial(c, 1)
    } else {
        YPolynomial::constant(c * (k1 - int(1)))
    }
}

/// Deterministic small rationals `p/q` with `|p| <= 9`, `1 <= q <= 9`.
pub fn random_params(count: usize, seed: u64) -> Vec<(Rational, Rational)> {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut draw = || bsseries::rational::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=9));
    (0..count).map(|_| (draw(), draw())).collect()
}
