use serde::{Deserialize, Serialize};

use super::WeightMatrix;
use crate::error::{Error, Result};
use crate::metric::FiniteMetricSpace;
use crate::scalar::Scalar;

const DYKSTRA_STOP: f64 = 1e-10;
const DYKSTRA_MAX_SWEEPS: usize = 200_000;

/// `{x : <normal, x> <= offset}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HalfSpace<T> {
    pub normal: Vec<T>,
    pub offset: T,
}

/// Closed convex bodies with a computable Euclidean projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ConvexBody<T> {
    Box { lower: Vec<T>, upper: Vec<T> },
    Ball { center: Vec<T>, radius: T },
    Polyhedron { halfspaces: Vec<HalfSpace<T>> },
}

impl<T: Scalar> ConvexBody<T> {
    /// Ambient dimension, after checking the body is well formed.
    pub fn dim(&self) -> Result<usize> {
        let bad = |msg: &str| Err(Error::UnsupportedBody(msg.to_string()));
        match self {
            ConvexBody::Box { lower, upper } => {
                if lower.len() != upper.len() || lower.is_empty() {
                    return bad("box bounds must be nonempty and of equal length");
                }
                if lower.iter().zip(upper).any(|(l, u)| !(l <= u) || !l.is_finite() || !u.is_finite()) {
                    return bad("box needs finite bounds with lower <= upper");
                }
                Ok(lower.len())
            }
            ConvexBody::Ball { center, radius } => {
                if center.is_empty() || center.iter().any(|c| !c.is_finite()) {
                    return bad("ball center must be a finite nonempty vector");
                }
                if !(*radius > T::zero()) || !radius.is_finite() {
                    return bad("ball radius must be positive");
                }
                Ok(center.len())
            }
            ConvexBody::Polyhedron { halfspaces } => {
                let Some(first) = halfspaces.first() else {
                    return bad("polyhedron needs at least one half-space");
                };
                let d = first.normal.len();
                for h in halfspaces {
                    if h.normal.len() != d || d == 0 {
                        return bad("half-space normals must share a positive dimension");
                    }
                    if h.normal.iter().all(|x| x.is_zero()) || !h.offset.is_finite() {
                        return bad("half-space needs a nonzero normal and finite offset");
                    }
                }
                Ok(d)
            }
        }
    }

    /// Euclidean nearest point of the body.
    pub fn project(&self, x: &[T]) -> Result<Vec<T>> {
        let d = self.dim()?;
        if x.len() != d {
            return Err(Error::LengthMismatch { expected: d, got: x.len() });
        }
        match self {
            ConvexBody::Box { lower, upper } => {
                Ok(x.iter().zip(lower.iter().zip(upper)).map(|(&v, (&l, &u))| v.max(l).min(u)).collect())
            }
            ConvexBody::Ball { center, radius } => {
                let norm = euclid(x, center);
                if norm <= *radius {
                    return Ok(x.to_vec());
                }
                Ok(x.iter().zip(center).map(|(&v, &c)| c + (v - c) * *radius / norm).collect())
            }
            ConvexBody::Polyhedron { halfspaces } => dykstra(halfspaces, x),
        }
    }

    pub fn contains(&self, x: &[T], tol: T) -> Result<bool> {
        let p = self.project(x)?;
        Ok(euclid(&p, x) <= tol)
    }
}

fn euclid<T: Scalar>(x: &[T], y: &[T]) -> T {
    x.iter().zip(y).map(|(&a, &b)| (a - b) * (a - b)).sum::<T>().sqrt()
}

fn project_halfspace<T: Scalar>(h: &HalfSpace<T>, x: &[T]) -> Vec<T> {
    let excess: T = h.normal.iter().zip(x).map(|(&a, &v)| a * v).sum::<T>() - h.offset;
    if excess <= T::zero() {
        return x.to_vec();
    }
    let nn: T = h.normal.iter().map(|&a| a * a).sum();
    x.iter().zip(&h.normal).map(|(&v, &a)| v - excess / nn * a).collect()
}

/// Dykstra's alternating projections onto an intersection of half-spaces.
fn dykstra<T: Scalar>(halfspaces: &[HalfSpace<T>], x0: &[T]) -> Result<Vec<T>> {
    if halfspaces.len() == 1 {
        return Ok(project_halfspace(&halfspaces[0], x0));
    }
    let stop = T::lit(DYKSTRA_STOP);
    let mut x = x0.to_vec();
    let mut increments = vec![vec![T::zero(); x0.len()]; halfspaces.len()];
    for _ in 0..DYKSTRA_MAX_SWEEPS {
        let start = x.clone();
        for (h, inc) in halfspaces.iter().zip(increments.iter_mut()) {
            let shifted: Vec<T> = x.iter().zip(inc.iter()).map(|(&a, &b)| a + b).collect();
            let y = project_halfspace(h, &shifted);
            for ((i, s), v) in inc.iter_mut().zip(&shifted).zip(&y) {
                *i = *s - *v;
            }
            x = y;
        }
        let moved = x.iter().zip(&start).map(|(&a, &b)| (a - b).abs()).fold(T::zero(), T::max);
        if moved <= stop {
            return Ok(x);
        }
    }
    Err(Error::SolverFailure("alternating projections did not settle; the intersection may be empty".into()))
}

fn nearest_sample<T: Scalar>(sample: &[Vec<T>], p: &[T]) -> usize {
    let mut best = 0;
    let mut best_d = euclid(&sample[0], p);
    for (k, s) in sample.iter().enumerate().skip(1) {
        let d = euclid(s, p);
        if d < best_d {
            best = k;
            best_d = d;
        }
    }
    best
}

fn check_sample<T: Scalar>(body: &ConvexBody<T>, sample: &[Vec<T>], f_len: Option<usize>) -> Result<usize> {
    let d = body.dim()?;
    if sample.is_empty() {
        return Err(Error::EmptySample);
    }
    if let Some(k) = f_len {
        if k != sample.len() {
            return Err(Error::LengthMismatch { expected: sample.len(), got: k });
        }
    }
    if let Some(bad) = sample.iter().find(|s| s.len() != d) {
        return Err(Error::LengthMismatch { expected: d, got: bad.len() });
    }
    Ok(d)
}

/// `Ef(x) = f(s)` where `s` is the sample point nearest to the projection of `x` onto
/// the body (first in sample order on ties). `f` holds one value per sample point.
pub fn metric_projection_extend<T: Scalar>(
    body: &ConvexBody<T>,
    sample: &[Vec<T>],
    f: &[T],
    queries: &[Vec<T>],
) -> Result<Vec<T>> {
    check_sample(body, sample, Some(f.len()))?;
    queries
        .iter()
        .map(|x| {
            let p = body.project(x)?;
            Ok(f[nearest_sample(sample, &p)])
        })
        .collect()
}

/// The projection extension as a matrix on the Euclidean space formed by the sample
/// followed by the queries; the sample is the source.
pub fn projection_operator<T: Scalar>(
    body: &ConvexBody<T>,
    sample: &[Vec<T>],
    queries: &[Vec<T>],
) -> Result<(FiniteMetricSpace<T>, WeightMatrix<T>)> {
    check_sample(body, sample, None)?;
    let points: Vec<Vec<T>> = sample.iter().chain(queries).cloned().collect();
    let space = FiniteMetricSpace::euclidean_lp(&points, T::lit(2.0))?;
    let k = sample.len();
    let mut rows = Vec::with_capacity(points.len());
    for (m, x) in points.iter().enumerate() {
        let mut row = vec![T::zero(); k];
        let target = if m < k { m } else { nearest_sample(sample, &body.project(x)?) };
        row[target] = T::one();
        rows.push(row);
    }
    let op = WeightMatrix::new(points.len(), (0..k).collect(), rows)?;
    Ok((space, op))
}
