use thiserror::Error;

use crate::ypoly::YPolynomial;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed rational {0:?}: expected \"p/q\" or an integer with nonzero q")]
pub struct ParseRationalError(pub String);

/// Failures of the exact series engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    /// `f0` is not in the polynomial kernel of the order-0 operator.
    #[error("initial profile is inadmissible: order-0 residual is {residual}")]
    InadmissibleInitial { residual: YPolynomial },
    /// The order-`order` forcing has a component the triangular solve cannot
    /// absorb at `degree = order + 1`.
    #[error("resonant forcing at order {order}: no polynomial solution (obstruction at degree {degree})")]
    Resonance { order: usize, degree: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot divide by z: monomial y^{y_degree} has z-degree 0")]
pub struct DivisionByZError {
    pub y_degree: usize,
}

/// Failures of the finite-difference oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GridError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("evolution form is singular at z = {z} (requires z > 0)")]
    SingularTime { z: f64 },
    #[error("non-finite value at step {step} (z = {z})")]
    Instability { step: usize, z: f64 },
    #[error("initial slice has {got} values, grid has {expected} points")]
    LengthMismatch { expected: usize, got: usize },
    #[error("z = {z} lies outside the solved range [{z_start}, {z_end}]")]
    OutOfRange { z: f64, z_start: f64, z_end: f64 },
    #[error("{0}")]
    Precondition(String),
}

#[derive(Debug, Error)]
pub enum FormatError {
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Rational(#[from] ParseRationalError),
    #[error("series file is inconsistent: {0}")]
    Inconsistent(String),
}
