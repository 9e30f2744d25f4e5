//! Concrete space generators.

mod hyperbolic;
mod lattice;
mod tree;

pub use hyperbolic::{hyperbolic_rho, hyperbolic_rho0, HyperbolicPoint};
pub use lattice::{build_r_lattice, Lattice};
pub use tree::{pad_to_tk, tree_distance, truncated_tk, RootedTree, TkPadding};

use crate::error::{Error, Result};
use crate::metric::{cartesian_indices, FiniteMetricSpace};
use crate::scalar::Scalar;

/// The discrete cube `Z^n ∩ [-l, l]^n` with the `l^1` distance.
///
/// Points are ordered lexicographically (last coordinate fastest) and labelled by
/// their coordinate tuple.
pub fn grid_l1<T: Scalar>(n: usize, l: usize, cap: usize) -> Result<FiniteMetricSpace<T>> {
    if n == 0 || l == 0 {
        return Err(Error::Input("grid_l1 needs n >= 1 and l >= 1".into()));
    }
    let side = 2 * l + 1;
    let size = (0..n).try_fold(1usize, |acc, _| acc.checked_mul(side)).unwrap_or(usize::MAX);
    if size > cap {
        return Err(Error::ProductTooLarge { size, cap });
    }
    let coords: Vec<Vec<i64>> = cartesian_indices(&vec![side; n])
        .into_iter()
        .map(|t| t.into_iter().map(|i| i as i64 - l as i64).collect())
        .collect();
    let labels =
        coords.iter().map(|c| format!("({})", c.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))).collect();
    Ok(FiniteMetricSpace::from_fn_unchecked(labels, |a, b| {
        let d: i64 = coords[a].iter().zip(&coords[b]).map(|(x, y)| (x - y).abs()).sum();
        T::from_i64(d).expect("small integer")
    }))
}

/// Evenly spaced points `-1, -1 + h, ..., 1` of the real line.
pub fn interval_grid<T: Scalar>(h: T) -> Result<FiniteMetricSpace<T>> {
    if !(h > T::zero()) {
        return Err(Error::Input("grid step must be positive".into()));
    }
    let steps = (T::lit(2.0) / h).round();
    let count = steps.to_usize().ok_or_else(|| Error::Input("grid step too small".into()))? + 1;
    let xs: Vec<T> = (0..count).map(|i| -T::one() + T::lit(2.0) * T::from_usize_lossy(i) / steps).collect();
    let labels = xs.iter().map(|x| format!("{x}")).collect();
    Ok(FiniteMetricSpace::from_fn_unchecked(labels, |a, b| (xs[a] - xs[b]).abs()))
}
