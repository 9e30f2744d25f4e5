use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// A point `(x1, x2)` of the upper half-plane, `x2 > 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HyperbolicPoint<T> {
    x1: T,
    x2: T,
}

impl<T: Scalar> HyperbolicPoint<T> {
    pub fn new(x1: T, x2: T) -> Result<Self> {
        if !(x2 > T::zero()) || !x2.is_finite() || !x1.is_finite() {
            return Err(Error::NonpositiveHeight(x2.as_f64()));
        }
        Ok(HyperbolicPoint { x1, x2 })
    }

    #[inline]
    pub fn x1(&self) -> T {
        self.x1
    }

    #[inline]
    pub fn x2(&self) -> T {
        self.x2
    }

    pub fn euclidean_distance(&self, other: &Self) -> T {
        (self.x1 - other.x1).hypot(self.x2 - other.x2)
    }

    pub fn rho(&self, other: &Self) -> T {
        hyperbolic_rho(self, other)
    }

    pub fn rho0(&self, other: &Self) -> T {
        hyperbolic_rho0(self, other)
    }
}

/// Hyperbolic distance: `arcosh(1 + |x - y|^2 / (2 x2 y2))`.
pub fn hyperbolic_rho<T: Scalar>(x: &HyperbolicPoint<T>, y: &HyperbolicPoint<T>) -> T {
    let d1 = x.x1 - y.x1;
    let d2 = x.x2 - y.x2;
    // u = cosh(rho) - 1, clamped at 0 against rounding
    let u = ((d1 * d1 + d2 * d2) / (T::lit(2.0) * x.x2 * y.x2)).max(T::zero());
    // arcosh(1 + u) = log(1 + u + sqrt(u (u + 2)))
    (u + (u * (u + T::lit(2.0))).sqrt()).ln_1p()
}

/// Comparison gauge `max_i log(1 + |x_i - y_i| / min(x2, y2))`. Not a metric in general.
pub fn hyperbolic_rho0<T: Scalar>(x: &HyperbolicPoint<T>, y: &HyperbolicPoint<T>) -> T {
    let h = x.x2.min(y.x2);
    let m = (x.x1 - y.x1).abs().max((x.x2 - y.x2).abs());
    (m / h).ln_1p()
}
