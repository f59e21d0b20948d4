//! Scalar abstraction for the polynomial and quadrature layer.

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, NumAssignOps};

/// Floating point type usable by the polynomial/quadrature kernels.
pub trait Scalar: Float + FloatConst + NumAssignOps + Debug + Display + Default + Send + Sync + 'static {
    /// Conversion from an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from(x).unwrap()
    }

    #[inline]
    fn from_usize(n: usize) -> Self {
        Self::from(n).unwrap()
    }

    #[inline]
    fn two() -> Self {
        Self::lit(2.0)
    }

    #[inline]
    fn half() -> Self {
        Self::lit(0.5)
    }

    /// Newton tolerance used for node computations at this precision.
    fn newton_tol() -> Self;
}

impl Scalar for f32 {
    fn newton_tol() -> Self {
        4.0 * f32::EPSILON
    }
}

impl Scalar for f64 {
    fn newton_tol() -> Self {
        1e-15
    }
}

/// A point of the plane.
pub type Point<T = f64> = [T; 2];
