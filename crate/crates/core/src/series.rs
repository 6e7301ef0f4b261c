//! Exact Taylor coefficients of the transformed Black-Scholes equation
//!
//! ```text
//! ∂z[z u] = 2 u_yy + y u_y + 2(k1 - 1) z u_y - 2 k2 z² u
//! ```
//!
//! expanded as `u(y, z) = Σ f_n(y) z^n`. Matching powers of `z` gives, for each
//! order, the linear problem
//!
//! ```text
//! L_n[f_n] = g_n,   L_n[f] = 2 f'' + y f' - (n + 1) f,
//! g_n = -2(k1 - 1) f_{n-1}' + 2 k2 f_{n-2},   f_{-1} = f_{-2} = 0.
//! ```
//!
//! `L_n` maps `y^m` to `(m - n - 1) y^m + 2m(m - 1) y^(m-2)`, so on dense
//! coefficient vectors it is upper triangular and is inverted by
//! back-substitution from the top degree. The diagonal vanishes only at
//! `m = n + 1`; there the kernel direction is left at zero and a nonzero
//! obstruction is reported as [`SeriesError::Resonance`].

use num::Zero;
use serde::{Deserialize, Serialize};

use crate::bivariate::BivariatePolynomial;
use crate::error::{FormatError, SeriesError};
use crate::rational::{format_rational, int, parse_rational, serde_rational, Rational};
use crate::ypoly::YPolynomial;

/// The model constants `k1`, `k2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ParamSet {
    #[serde(with = "serde_rational")]
    pub k1: Rational,
    #[serde(with = "serde_rational")]
    pub k2: Rational,
}

impl ParamSet {
    pub fn new(k1: Rational, k2: Rational) -> Self {
        Self { k1, k2 }
    }

    /// `k1 - 1`, the drift shift that multiplies `z u_y`.
    pub fn drift(&self) -> Rational {
        &self.k1 - int(1)
    }

    pub fn k1_f64(&self) -> f64 {
        crate::rational::to_f64(&self.k1)
    }

    pub fn k2_f64(&self) -> f64 {
        crate::rational::to_f64(&self.k2)
    }
}

/// `2 p'' + y p' - (n + 1) p`.
pub fn apply_l(n: usize, p: &YPolynomial) -> YPolynomial {
    let d1 = p.derivative();
    let d2 = d1.derivative();
    let n1 = int(n as i64 + 1);
    &(&d2.scale(&int(2)) + &d1.shift_up()) - &p.scale(&n1)
}

/// `g_n = -2(k1 - 1) f_{n-1}' + 2 k2 f_{n-2}` for `n >= 1`; at `n = 1` the
/// caller passes the zero polynomial for `f_{-1}`.
pub fn forcing_term(
    n: usize,
    f_prev: &YPolynomial,
    f_prev2: &YPolynomial,
    params: &ParamSet,
) -> YPolynomial {
    debug_assert!(n >= 1, "forcing is defined for n >= 1");
    debug_assert!(n > 1 || f_prev2.is_zero(), "f_{{-1}} must be zero");
    let drift = f_prev.derivative().scale(&(params.drift() * int(-2)));
    let decay = f_prev2.scale(&(&params.k2 * int(2)));
    &drift + &decay
}

/// Minimal polynomial `f` with `L_n[f] = g`.
///
/// Coefficients above `deg g` are zero. Working downward, the coefficient at
/// degree `m` is `(g_m - 2(m+2)(m+1) f_{m+2}) / (m - n - 1)`; at `m = n + 1`
/// the numerator must vanish and the kernel component is set to zero.
pub fn solve_order(n: usize, g: &YPolynomial) -> Result<YPolynomial, SeriesError> {
    if g.is_zero() {
        return Ok(YPolynomial::zero());
    }
    let top = g.degree() as usize;
    let mut f = vec![Rational::zero(); top + 1];
    for m in (0..=top).rev() {
        let mut rhs = g.coeff(m);
        if m + 2 <= top {
            let coupling = int(2 * (m as i64 + 2) * (m as i64 + 1));
            rhs -= coupling * &f[m + 2];
        }
        let diag = m as i64 - n as i64 - 1;
        if diag == 0 {
            if !rhs.is_zero() {
                return Err(SeriesError::Resonance {
                    order: n,
                    degree: m,
                });
            }
        } else {
            f[m] = rhs / int(diag);
        }
    }
    Ok(YPolynomial::from_coeffs(f))
}

/// Order-0 residual `L_0[f0]`; zero exactly when `f0` is a multiple of `y`.
pub fn validate_initial(f0: &YPolynomial) -> YPolynomial {
    apply_l(0, f0)
}

/// Truncated expansion `f_0 .. f_N` together with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesSolution {
    params: ParamSet,
    terms: Vec<YPolynomial>,
}

/// Computes `f_0 .. f_order` from an admissible initial profile.
pub fn expand(
    f0: &YPolynomial,
    order: usize,
    params: &ParamSet,
) -> Result<SeriesSolution, SeriesError> {
    let residual = validate_initial(f0);
    if !residual.is_zero() {
        return Err(SeriesError::InadmissibleInitial { residual });
    }
    let mut terms = Vec::with_capacity(order + 1);
    terms.push(f0.clone());
    let zero = YPolynomial::zero();
    for n in 1..=order {
        let prev = &terms[n - 1];
        let prev2 = if n >= 2 { &terms[n - 2] } else { &zero };
        let g = forcing_term(n, prev, prev2, params);
        terms.push(solve_order(n, &g)?);
    }
    Ok(SeriesSolution {
        params: params.clone(),
        terms,
    })
}

impl SeriesSolution {
    /// Assembles a series from raw terms without checking the recurrence.
    /// Use [`SeriesSolution::recurrence_defects`] to audit the result.
    ///
    /// Panics if `terms` is empty.
    pub fn from_terms(params: ParamSet, terms: Vec<YPolynomial>) -> Self {
        assert!(!terms.is_empty(), "a series needs at least f_0");
        Self { params, terms }
    }

    pub fn params(&self) -> &ParamSet {
        &self.params
    }

    pub fn terms(&self) -> &[YPolynomial] {
        &self.terms
    }

    /// Truncation order `N`.
    pub fn order(&self) -> usize {
        self.terms.len() - 1
    }

    /// `f_n`, with zero standing in for negative orders and orders past `N`.
    pub fn term(&self, n: isize) -> YPolynomial {
        if n < 0 {
            return YPolynomial::zero();
        }
        self.terms
            .get(n as usize)
            .cloned()
            .unwrap_or_else(YPolynomial::zero)
    }

    /// Replaces `f_n`. Intended for perturbation experiments.
    pub fn with_term(mut self, n: usize, f: YPolynomial) -> Self {
        self.terms[n] = f;
        self
    }

    pub fn truncate(&self, order: usize) -> Self {
        Self {
            params: self.params.clone(),
            terms: self.terms[..=order.min(self.order())].to_vec(),
        }
    }

    /// `Σ f_j(y) z^j` by Horner's scheme in `z`, exactly.
    pub fn evaluate(&self, y: &Rational, z: &Rational) -> Rational {
        self.terms
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, f| acc * z + f.eval(y))
    }

    pub fn evaluate_f64(&self, y: f64, z: f64) -> f64 {
        self.terms
            .iter()
            .rev()
            .fold(0.0, |acc, f| acc * z + f.eval_f64(y))
    }

    /// Per-order defect `(n+1) f_n - [2 f_n'' + y f_n' + 2(k1-1) f_{n-1}' - 2 k2 f_{n-2}]`.
    /// Every entry is zero for a series produced by [`expand`].
    pub fn recurrence_defects(&self) -> Vec<YPolynomial> {
        (0..=self.order())
            .map(|n| {
                let f = &self.terms[n];
                let prev = self.term(n as isize - 1);
                let prev2 = self.term(n as isize - 2);
                let n1 = int(n as i64 + 1);
                let d1 = f.derivative();
                let rhs = &(&(&d1.derivative().scale(&int(2)) + &d1.shift_up())
                    + &prev.derivative().scale(&(self.params.drift() * int(2))))
                    - &prev2.scale(&(&self.params.k2 * int(2)));
                &f.scale(&n1) - &rhs
            })
            .collect()
    }

    /// The truncated sum `u_N` as a polynomial in `(y, z)`.
    pub fn to_bivariate(&self) -> BivariatePolynomial {
        let mut u = BivariatePolynomial::zero();
        for (j, f) in self.terms.iter().enumerate() {
            u = &u + &BivariatePolynomial::from_y_poly(f, j);
        }
        u
    }

    /// `∂z(z u_N) - [2 ∂y² u_N + y ∂y u_N + 2(k1-1) z ∂y u_N - 2 k2 z² u_N]`.
    pub fn pde_residual(&self) -> BivariatePolynomial {
        let u = self.to_bivariate();
        let lhs = u.shift(0, 1).d_z();
        let u_y = u.d_y();
        let rhs = &(&(&u_y.d_y().scale(&int(2)) + &u_y.shift(1, 0))
            + &u_y.shift(0, 1).scale(&(self.params.drift() * int(2))))
            - &u.shift(0, 2).scale(&(&self.params.k2 * int(2)));
        &lhs - &rhs
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&SeriesFile::from(self)).expect("series serialization is infallible")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&SeriesFile::from(self))
            .expect("series serialization is infallible")
    }

    pub fn from_json(text: &str) -> Result<Self, FormatError> {
        let file: SeriesFile = serde_json::from_str(text)?;
        file.try_into()
    }
}

/// On-disk form: `{"k1": "p/q", "k2": "p/q", "order": N, "terms": [["p/q", ...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SeriesFile {
    pub k1: String,
    pub k2: String,
    pub order: usize,
    pub terms: Vec<Vec<String>>,
}

impl From<&SeriesSolution> for SeriesFile {
    fn from(s: &SeriesSolution) -> Self {
        Self {
            k1: format_rational(&s.params.k1),
            k2: format_rational(&s.params.k2),
            order: s.order(),
            terms: s
                .terms
                .iter()
                .map(|f| f.coeffs().iter().map(format_rational).collect())
                .collect(),
        }
    }
}

impl TryFrom<SeriesFile> for SeriesSolution {
    type Error = FormatError;

    fn try_from(file: SeriesFile) -> Result<Self, FormatError> {
        if file.terms.len() != file.order + 1 {
            return Err(FormatError::Inconsistent(format!(
                "order {} needs {} terms, found {}",
                file.order,
                file.order + 1,
                file.terms.len()
            )));
        }
        let params = ParamSet::new(parse_rational(&file.k1)?, parse_rational(&file.k2)?);
        let terms = file
            .terms
            .iter()
            .map(|cs| {
                cs.iter()
                    .map(|c| parse_rational(c))
                    .collect::<Result<Vec<_>, _>>()
                    .map(YPolynomial::from_coeffs)
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(SeriesSolution { params, terms })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn golden_params() -> ParamSet {
        ParamSet::new(ratio(3, 2), ratio(1, 2))
    }

    #[test]
    fn apply_l_examples() {
        assert!(apply_l(0, &YPolynomial::y()).is_zero());
        assert_eq!(
            apply_l(1, &YPolynomial::constant(int(1))),
            YPolynomial::constant(int(-2))
        );
        for n in 0..5 {
            assert!(apply_l(n, &YPolynomial::zero()).is_zero());
        }
        // monomial rule: y^4 at n = 1 -> 2 y^4 + 24 y^2
        let got = apply_l(1, &YPolynomial::monomial(int(1), 4));
        assert_eq!(
            got,
            YPolynomial::from_coeffs(vec![int(0), int(0), int(24), int(0), int(2)])
        );
    }

    #[test]
    fn forcing_examples() {
        let p = ParamSet::new(ratio(3, 2), ratio(7, 3));
        let g1 = forcing_term(1, &YPolynomial::y(), &YPolynomial::zero(), &p);
        assert_eq!(g1, YPolynomial::constant(int(-1)));
        let f1 = YPolynomial::constant(p.drift());
        let g2 = forcing_term(2, &f1, &YPolynomial::y(), &golden_params());
        assert_eq!(g2, YPolynomial::y());
        assert!(forcing_term(1, &YPolynomial::zero(), &YPolynomial::zero(), &p).is_zero());
    }

    #[test]
    fn solve_order_examples() {
        let k1 = ratio(5, 7);
        let a = &k1 - int(1);
        let f = solve_order(1, &YPolynomial::constant(&a * int(-2))).unwrap();
        assert_eq!(f, YPolynomial::constant(a));
        let k2 = ratio(-4, 9);
        let f = solve_order(2, &YPolynomial::monomial(&k2 * int(2), 1)).unwrap();
        assert_eq!(f, YPolynomial::monomial(-k2, 1));
        assert!(solve_order(3, &YPolynomial::zero()).unwrap().is_zero());
    }

    #[test]
    fn resonance_is_reported() {
        // L_0 cannot reach y: its degree-1 diagonal is zero.
        assert_eq!(
            solve_order(0, &YPolynomial::y()),
            Err(SeriesError::Resonance {
                order: 0,
                degree: 1
            })
        );
        // y^4 at n = 1: degree-2 row needs g_2 - 24 f_4 = 0.
        let g = YPolynomial::monomial(int(1), 4);
        let err = solve_order(1, &g).unwrap_err();
        assert_eq!(
            err,
            SeriesError::Resonance {
                order: 1,
                degree: 2
            }
        );
        // ...but y^4 + 12 y^2 is reachable (L_1[y^4/2] = y^4 + 12 y^2).
        let g = YPolynomial::from_coeffs(vec![int(0), int(0), int(12), int(0), int(1)]);
        let f = solve_order(1, &g).unwrap();
        assert_eq!(apply_l(1, &f), g);
        assert_eq!(f.coeff(2), int(0));
    }

    #[test]
    fn validate_initial_examples() {
        assert!(validate_initial(&YPolynomial::y()).is_zero());
        assert!(validate_initial(&YPolynomial::monomial(int(5), 1)).is_zero());
        assert_eq!(
            validate_initial(&YPolynomial::constant(int(1))),
            YPolynomial::constant(int(-1))
        );
    }

    #[test]
    fn expand_examples() {
        let s = expand(&YPolynomial::y(), 2, &golden_params()).unwrap();
        assert_eq!(
            s.terms(),
            &[
                YPolynomial::y(),
                YPolynomial::constant(ratio(1, 2)),
                YPolynomial::monomial(ratio(-1, 2), 1)
            ]
        );
        let p = ParamSet::new(ratio(-2, 5), ratio(3, 11));
        let s = expand(&YPolynomial::y(), 4, &p).unwrap();
        let a = p.drift();
        assert_eq!(s.terms()[3], YPolynomial::constant(-(&p.k2 * &a)));
        assert_eq!(
            s.terms()[4],
            YPolynomial::monomial(&p.k2 * &p.k2 / int(2), 1)
        );

        let zero = expand(&YPolynomial::zero(), 5, &p).unwrap();
        assert_eq!(zero.order(), 5);
        assert!(zero.terms().iter().all(YPolynomial::is_zero));

        let err = expand(&YPolynomial::constant(int(1)), 3, &p).unwrap_err();
        assert!(matches!(err, SeriesError::InadmissibleInitial { .. }));
    }

    #[test]
    fn evaluate_examples() {
        let s = expand(&YPolynomial::y(), 2, &golden_params()).unwrap();
        assert_eq!(s.evaluate(&int(2), &int(1)), ratio(3, 2));
        assert_eq!(s.evaluate(&ratio(7, 3), &int(0)), ratio(7, 3));
        assert!((s.evaluate_f64(2.0, 1.0) - 1.5).abs() < 1e-15);
    }

    #[test]
    fn residual_examples() {
        let p = golden_params();
        let s = expand(&YPolynomial::y(), 2, &p).unwrap();
        let k2 = &p.k2;
        let mut expected = BivariatePolynomial::monomial(int(4) * k2 * p.drift(), 0, 3);
        expected.add_term(1, 4, int(-2) * k2 * k2);
        assert_eq!(s.pde_residual(), expected);

        let zero = expand(&YPolynomial::zero(), 4, &p).unwrap();
        assert!(zero.pde_residual().is_zero());

        let bumped = s
            .clone()
            .with_term(1, &s.terms()[1] + &YPolynomial::constant(int(1)));
        assert!(!bumped.pde_residual().z_slice(1).is_zero());
    }

    #[test]
    fn json_is_exact() {
        let s = expand(
            &YPolynomial::y(),
            6,
            &ParamSet::new(ratio(13, 7), ratio(-5, 3)),
        )
        .unwrap();
        let text = s.to_json();
        assert!(text.starts_with(r#"{"k1":"13/7","k2":"-5/3","order":6,"terms":[["0/1","1/1"]"#));
        assert_eq!(SeriesSolution::from_json(&text).unwrap(), s);
        let bad = r#"{"k1":"1/1","k2":"1/1","order":2,"terms":[["0/1","1/1"]]}"#;
        assert!(matches!(
            SeriesSolution::from_json(bad),
            Err(FormatError::Inconsistent(_))
        ));
        let extra = r#"{"k1":"1/1","k2":"1/1","order":0,"terms":[[]],"x":1}"#;
        assert!(SeriesSolution::from_json(extra).is_err());
    }
}
