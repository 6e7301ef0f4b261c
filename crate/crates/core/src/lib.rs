//! Exact power-series solutions of the transformed Black-Scholes equation
//!
//! ```text
//! ∂z[z u] = 2 u_yy + y u_y + 2(k1 - 1) z u_y - 2 k2 z² u
//! ```
//!
//! together with an exact checker for the integral (decomposition-method)
//! form of the coefficient recurrence and a Crank-Nicolson oracle used to
//! measure where truncated series stay accurate.
//!
//! - [`series`]: Taylor coefficients `f_n(y)` in exact rational arithmetic.
//! - [`adm`]: per-order verification of the integral identity.
//! - [`oracle`]: finite-difference solver, error metrics and sweeps.

pub mod adm;
pub mod bivariate;
pub mod error;
pub mod oracle;
pub mod rational;
pub mod series;
pub mod tridiag;
pub mod ypoly;

pub use adm::{adm_identity_check, AdmReport, AdmTerm};
pub use bivariate::BivariatePolynomial;
pub use error::{DivisionByZError, FormatError, GridError, ParseRationalError, SeriesError};
pub use oracle::{ErrorMetrics, FdOptions, FloatParams, Grid, GridSolution};
pub use rational::Rational;
pub use series::{expand, ParamSet, SeriesSolution};
pub use ypoly::YPolynomial;
