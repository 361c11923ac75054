//! Coefficient-ring abstraction.
//!
//! Grassmann elements are generic over the ring their monomial coefficients
//! live in. Two rings are used in practice: plain complex scalars (algebra
//! tables, constant supernumbers) and truncated Taylor jets (superfields).
//! Jets carry a base point and an order, so ring values are not
//! interchangeable across contexts; `zero_like`/`one_like` produce neutral
//! elements in the context of an existing value and `compatible` guards
//! binary operations.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RingError {
    #[error("reciprocal or negative power of an element with zero body")]
    SingularBody,
    #[error("non-integer power of a non-positive real body")]
    BranchCut,
    #[error("logarithm of a non-positive real body")]
    LogBranch,
    #[error("operands live in incompatible ring contexts (order or base point)")]
    Incompatible,
}

/// Ring operations needed by the Grassmann layer.
///
/// `max_abs` is the magnitude used for tolerance pruning and residual
/// reports. The `try_*` functions are the scalar analytic operations that
/// nilpotent series reduce to; they fail on branch cuts and singular bodies.
pub trait Ring: Clone + std::fmt::Debug {
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn add(&self, rhs: &Self) -> Self;
    fn sub(&self, rhs: &Self) -> Self;
    fn mul(&self, rhs: &Self) -> Self;
    fn neg(&self) -> Self;
    /// Multiply by a complex scalar.
    fn scale(&self, s: Complex64) -> Self;
    /// Largest coefficient magnitude.
    fn max_abs(&self) -> f64;
    /// True when binary operations between the two values are meaningful.
    fn compatible(&self, rhs: &Self) -> bool;
    fn try_exp(&self) -> Result<Self, RingError>;
    fn try_recip(&self) -> Result<Self, RingError>;
    fn try_powf(&self, r: f64) -> Result<Self, RingError>;
    fn try_ln(&self) -> Result<Self, RingError>;
    /// Short human-readable form for reports.
    fn fmt_coeff(&self) -> String;

    fn is_zero(&self, tol: f64) -> bool {
        self.max_abs() <= tol
    }
    fn approx_eq(&self, rhs: &Self, tol: f64) -> bool {
        self.sub(rhs).max_abs() <= tol
    }
}

pub(crate) const REAL_AXIS_TOL: f64 = 1e-12;

pub(crate) fn is_integer(r: f64) -> bool {
    r.fract() == 0.0 && r.abs() < 1e9
}

/// Principal-branch power with exact handling of integer exponents.
pub(crate) fn scalar_powf(b: Complex64, r: f64) -> Result<Complex64, RingError> {
    if is_integer(r) {
        let n = r as i32;
        if n < 0 && b.norm() == 0.0 {
            return Err(RingError::SingularBody);
        }
        return Ok(b.powi(n));
    }
    if b.norm() == 0.0 {
        return Err(RingError::SingularBody);
    }
    if b.im.abs() <= REAL_AXIS_TOL * b.re.abs().max(1.0) && b.re <= 0.0 {
        return Err(RingError::BranchCut);
    }
    Ok(b.powf(r))
}

impl Ring for Complex64 {
    fn zero_like(&self) -> Self {
        Complex64::new(0.0, 0.0)
    }
    fn one_like(&self) -> Self {
        Complex64::new(1.0, 0.0)
    }
    fn add(&self, rhs: &Self) -> Self {
        self + rhs
    }
    fn sub(&self, rhs: &Self) -> Self {
        self - rhs
    }
    fn mul(&self, rhs: &Self) -> Self {
        self * rhs
    }
    fn neg(&self) -> Self {
        -self
    }
    fn scale(&self, s: Complex64) -> Self {
        self * s
    }
    fn max_abs(&self) -> f64 {
        self.norm()
    }
    fn compatible(&self, _rhs: &Self) -> bool {
        true
    }
    fn try_exp(&self) -> Result<Self, RingError> {
        Ok(self.exp())
    }
    fn try_recip(&self) -> Result<Self, RingError> {
        if self.norm() == 0.0 {
            return Err(RingError::SingularBody);
        }
        Ok(Complex64::new(1.0, 0.0) / self)
    }
    fn try_powf(&self, r: f64) -> Result<Self, RingError> {
        scalar_powf(*self, r)
    }
    fn try_ln(&self) -> Result<Self, RingError> {
        if self.norm() == 0.0 {
            return Err(RingError::SingularBody);
        }
        if self.im.abs() <= REAL_AXIS_TOL * self.re.abs().max(1.0) && self.re <= 0.0 {
            return Err(RingError::LogBranch);
        }
        Ok(self.ln())
    }
    fn fmt_coeff(&self) -> String {
        if self.im == 0.0 {
            format!("{:.6}", self.re)
        } else if self.im > 0.0 {
            format!("{:.6}+{:.6}i", self.re, self.im)
        } else {
            format!("{:.6}-{:.6}i", self.re, -self.im)
        }
    }
}
