//! Linear and nonlinear extension operators `Lip(S) -> Lip(F)` and their norms.

mod averaging;
mod mcshane;
mod projection;
mod whitney;

pub use averaging::{
    averaging_operator, doubling_constants, nearest_point_map, DoublingConstants, MeasureFamily, MeasureMode,
    NearestPointMap,
};
pub use mcshane::mcshane_extend;
pub use projection::{metric_projection_extend, projection_operator, ConvexBody, HalfSpace};
pub use whitney::{
    default_local_operators, whitney_extend, whitney_extend_glued, whitney_operator, whitney_partition,
    whitney_partition_for_centers, LocalOperator, PartitionOfUnity,
};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::free_norm::free_norm_of_weights;
use crate::lp::SolverOptions;
use crate::metric::{check_index_set, pairs, FiniteMetricSpace, ScalarField};
use crate::scalar::Scalar;

/// A linear operator `Lip(S) -> Lip(F)` stored as an `|F| x |S|` matrix.
///
/// Rows sum to one and the row of every point of `S` is the indicator of that point,
/// so `Ef` restricts to `f` on `S`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMatrix<T> {
    source: Vec<usize>,
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> WeightMatrix<T> {
    /// Validates the row-sum and extension conditions with the scalar's tight tolerance.
    pub fn new(target_len: usize, source: Vec<usize>, rows: Vec<Vec<T>>) -> Result<Self> {
        if source.is_empty() {
            return Err(Error::EmptySource);
        }
        check_index_set(target_len, &source)?;
        if rows.len() != target_len {
            return Err(Error::LengthMismatch { expected: target_len, got: rows.len() });
        }
        let tol = T::tight_tolerance();
        for (m, row) in rows.iter().enumerate() {
            if row.len() != source.len() {
                return Err(Error::LengthMismatch { expected: source.len(), got: row.len() });
            }
            if row.iter().any(|x| !x.is_finite()) {
                return Err(Error::NotAnExtension(format!("row {m} has a non-finite weight")));
            }
            let sum: T = row.iter().copied().sum();
            if (sum - T::one()).abs() > tol {
                return Err(Error::NotAnExtension(format!("row {m} sums to {sum}")));
            }
        }
        for (k, &s) in source.iter().enumerate() {
            let ok = rows[s]
                .iter()
                .enumerate()
                .all(|(j, &x)| if j == k { (x - T::one()).abs() <= tol } else { x.abs() <= tol });
            if !ok {
                return Err(Error::NotAnExtension(format!("row {s} is not the indicator of a source point")));
            }
        }
        Ok(WeightMatrix { source, rows })
    }

    /// The identity on a whole space (`S = F`).
    pub fn identity(n: usize) -> Self {
        let rows = (0..n).map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect();
        WeightMatrix { source: (0..n).collect(), rows }
    }

    /// Indices of the source points `S` in the target, in column order.
    pub fn source(&self) -> &[usize] {
        &self.source
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    pub fn row(&self, m: usize) -> &[T] {
        &self.rows[m]
    }

    pub fn target_len(&self) -> usize {
        self.rows.len()
    }

    pub fn source_len(&self) -> usize {
        self.source.len()
    }

    /// `Ef` for `f` given by its values on the source points, in column order.
    pub fn apply(&self, f: &[T]) -> Result<ScalarField<T>> {
        if f.len() != self.source.len() {
            return Err(Error::LengthMismatch { expected: self.source.len(), got: f.len() });
        }
        Ok(ScalarField::new(self.rows.iter().map(|row| row.iter().zip(f).map(|(&w, &v)| w * v).sum()).collect()))
    }

    /// Smallest entry of the matrix; nonnegative operators are averaging operators.
    pub fn min_weight(&self) -> T {
        self.rows.iter().flatten().copied().fold(T::infinity(), T::min)
    }
}

/// Exact operator norm of `E: Lip(S) -> Lip(F)` together with a pair attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatorNorm<T> {
    pub norm: T,
    /// Lexicographically smallest pair of target points attaining the norm.
    pub attained_at: Option<(usize, usize)>,
}

/// `max_{m != m'} |row_m - row_m'|_free / d(m, m')`, with the free norm taken on `S`.
///
/// Pairs are evaluated in parallel; the result does not depend on scheduling.
pub fn operator_norm<T: Scalar>(space: &FiniteMetricSpace<T>, op: &WeightMatrix<T>) -> Result<T> {
    operator_norm_attained(space, op).map(|r| r.norm)
}

pub fn operator_norm_attained<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    op: &WeightMatrix<T>,
) -> Result<OperatorNorm<T>> {
    if op.target_len() != space.len() {
        return Err(Error::LengthMismatch { expected: space.len(), got: op.target_len() });
    }
    let sub = space.restrict(op.source())?;
    let opts = SolverOptions::default();
    let all: Vec<(usize, usize)> = pairs(space.len()).collect();
    let ratios: Vec<T> = all
        .par_iter()
        .map(|&(a, b)| {
            let (ra, rb) = (op.row(a), op.row(b));
            if ra == rb {
                return Ok(T::zero());
            }
            let diff: Vec<T> = ra.iter().zip(rb).map(|(&x, &y)| x - y).collect();
            Ok(free_norm_of_weights(&sub, &diff, &opts)? / space.dist(a, b))
        })
        .collect::<Result<_>>()?;
    let mut best = OperatorNorm { norm: T::zero(), attained_at: None };
    for (&p, &r) in all.iter().zip(&ratios) {
        if r > best.norm {
            best = OperatorNorm { norm: r, attained_at: Some(p) };
        }
    }
    Ok(best)
}

/// Extends `f` by its value at `basepoint` off the source set.
///
/// When the source is separated from the rest of the space by at least its own
/// diameter this operator has norm exactly one.
pub fn basepoint_extension<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    source: Vec<usize>,
    basepoint: usize,
) -> Result<WeightMatrix<T>> {
    check_index_set(space.len(), &source)?;
    let base = source.iter().position(|&s| s == basepoint).ok_or(Error::BasepointNotInSubspace(basepoint))?;
    let mut rows = vec![vec![T::zero(); source.len()]; space.len()];
    for (m, row) in rows.iter_mut().enumerate() {
        row[source.iter().position(|&s| s == m).unwrap_or(base)] = T::one();
    }
    WeightMatrix::new(space.len(), source, rows)
}
