//! Floating-point scalar abstraction used by the fractional machinery.
//!
//! Colorings, multilinear extensions and the LP walk are written against
//! [`Scalar`] so they run in `f32` or `f64`. Each implementation carries the
//! numerical tolerances that make sense at its precision.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive, ToPrimitive};

pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + Debug + Display + Default + Send + Sync + 'static
{
    /// Entries within this distance of 0 or 1 count as integral.
    fn integral_tol() -> Self;
    /// Allowed drift of a row sum away from 1.
    fn row_tol() -> Self;
    /// Pivot threshold for column-pivoted elimination.
    fn pivot_tol() -> Self;
    /// Feasibility residual `‖Ax − b‖_∞` tolerated by the LP routines.
    fn residual_tol() -> Self;
    /// Tolerance on extension values that must be preserved exactly.
    fn value_tol() -> Self;

    /// Lossy conversion from `f64`; every literal in this crate fits.
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn integral_tol() -> Self {
        1e-9
    }
    fn row_tol() -> Self {
        1e-9
    }
    fn pivot_tol() -> Self {
        1e-10
    }
    fn residual_tol() -> Self {
        1e-7
    }
    fn value_tol() -> Self {
        1e-6
    }
}

impl Scalar for f32 {
    fn integral_tol() -> Self {
        1e-5
    }
    fn row_tol() -> Self {
        1e-5
    }
    fn pivot_tol() -> Self {
        1e-5
    }
    fn residual_tol() -> Self {
        1e-3
    }
    fn value_tol() -> Self {
        1e-2
    }
}
