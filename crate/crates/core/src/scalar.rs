//! Scalar abstraction shared by every numeric routine in the crate.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};
use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, DivAssign, MulAssign, SubAssign};

/// Floating point type the geometry and the LP machinery run over: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + Sum
    + AddAssign
    + SubAssign
    + MulAssign
    + DivAssign
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Absolute tolerance used for feasibility and comparison checks.
    fn default_tolerance() -> Self;

    /// Tolerance for exact-arithmetic identities (row sums, partitions of unity).
    fn tight_tolerance() -> Self;

    /// Converts an `f64` literal. Panics only for values the type cannot hold at all.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("literal out of range for scalar type")
    }

    #[inline]
    fn from_usize_lossy(x: usize) -> Self {
        Self::from_usize(x).expect("count out of range for scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for f64 {
    fn default_tolerance() -> Self {
        1e-9
    }

    fn tight_tolerance() -> Self {
        1e-12
    }
}

impl Scalar for f32 {
    fn default_tolerance() -> Self {
        1e-4
    }

    fn tight_tolerance() -> Self {
        1e-5
    }
}

/// `|a - b| <= tol * max(1, |a|, |b|)`.
pub fn approx_eq<T: Scalar>(a: T, b: T, tol: T) -> bool {
    let scale = T::one().max(a.abs()).max(b.abs());
    (a - b).abs() <= tol * scale
}
