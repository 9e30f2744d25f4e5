//! Finite metric spaces, pointed subspaces, scalar fields and Lipschitz seminorms.

use crate::error::{Error, Result, Violation};
use crate::scalar::Scalar;

/// Default cap on the number of points a generated space may have.
pub const DEFAULT_PRODUCT_CAP: usize = 4096;

/// A finite metric space: labelled points with a validated distance matrix.
///
/// Values are immutable after construction. The matrix is stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace<T> {
    labels: Vec<String>,
    n: usize,
    dist: Vec<T>,
}

impl<T: Scalar> FiniteMetricSpace<T> {
    /// Validates `matrix` and attaches `labels` (defaults to `"0"`, `"1"`, ...).
    pub fn new(labels: Option<Vec<String>>, matrix: &[Vec<T>]) -> Result<Self> {
        let mut space = validate_metric(matrix)?;
        if let Some(labels) = labels {
            if labels.len() != space.n {
                return Err(Error::LengthMismatch { expected: space.n, got: labels.len() });
            }
            space.labels = labels;
        }
        Ok(space)
    }

    /// Builds a space without checking the axioms. Callers guarantee them by construction.
    pub(crate) fn from_parts_unchecked(labels: Vec<String>, dist: Vec<T>) -> Self {
        let n = labels.len();
        debug_assert_eq!(dist.len(), n * n);
        FiniteMetricSpace { labels, n, dist }
    }

    /// Builds the metric induced by a distance function on `n` labelled points.
    /// The function must itself be a metric on distinct points.
    pub(crate) fn from_fn_unchecked(labels: Vec<String>, d: impl Fn(usize, usize) -> T) -> Self {
        let n = labels.len();
        let mut dist = vec![T::zero(); n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let v = d(i, j);
                dist[i * n + j] = v;
                dist[j * n + i] = v;
            }
        }
        FiniteMetricSpace { labels, n, dist }
    }

    /// Single-point space.
    pub fn singleton(label: impl Into<String>) -> Self {
        FiniteMetricSpace { labels: vec![label.into()], n: 1, dist: vec![T::zero()] }
    }

    /// Points `xs` of the real line with `|x - y|`. Points must be distinct.
    pub fn line(xs: &[T]) -> Result<Self> {
        let matrix: Vec<Vec<T>> = xs.iter().map(|&x| xs.iter().map(|&y| (x - y).abs()).collect()).collect();
        let labels = xs.iter().map(|x| format!("{x}")).collect();
        Self::new(Some(labels), &matrix)
    }

    /// Points of `R^d` with the `l^p` distance (`p = inf` gives the max metric).
    pub fn euclidean_lp(points: &[Vec<T>], p: T) -> Result<Self> {
        let matrix: Vec<Vec<T>> =
            points.iter().map(|x| points.iter().map(|y| lp_distance(x, y, p)).collect()).collect();
        Self::new(None, &matrix)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dist(&self, i: usize, j: usize) -> T {
        self.dist[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn to_matrix(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn diameter(&self) -> T {
        self.dist.iter().fold(T::zero(), |m, &d| m.max(d))
    }

    /// Sorted distinct positive distances.
    pub fn distinct_distances(&self) -> Vec<T> {
        let tol = T::tight_tolerance();
        let mut ds: Vec<T> = pairs(self.n).map(|(i, j)| self.dist(i, j)).collect();
        ds.sort_by(|a, b| a.partial_cmp(b).expect("finite distances"));
        ds.dedup_by(|a, b| (*a - *b).abs() <= tol * T::one().max(b.abs()));
        ds
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index < self.n {
            Ok(())
        } else {
            Err(Error::InvalidIndex { index, len: self.n })
        }
    }

    /// The subspace on `indices` (in the given order) as a metric space of its own.
    pub fn restrict(&self, indices: &[usize]) -> Result<Self> {
        check_index_set(self.n, indices)?;
        let labels = indices.iter().map(|&i| self.labels[i].clone()).collect();
        let k = indices.len();
        let mut dist = Vec::with_capacity(k * k);
        for &i in indices {
            for &j in indices {
                dist.push(self.dist(i, j));
            }
        }
        Ok(Self::from_parts_unchecked(labels, dist))
    }

    /// Reorders the points: point `i` of the result is point `perm[i]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::LengthMismatch { expected: self.n, got: perm.len() });
        }
        self.restrict(perm)
    }

    /// Multiplies every distance by `c > 0`.
    pub fn scale(&self, c: T) -> Result<Self> {
        scale_metric(self, c)
    }

    /// Indices of points in the open ball `B_r(center)`.
    pub fn open_ball(&self, center: usize, r: T) -> Vec<usize> {
        (0..self.n).filter(|&j| self.dist(center, j) < r).collect()
    }
}

/// Checks the four metric axioms and returns the space, or every violation found.
pub fn validate_metric<T: Scalar>(matrix: &[Vec<T>]) -> Result<FiniteMetricSpace<T>> {
    let n = matrix.len();
    for (row, r) in matrix.iter().enumerate() {
        if r.len() != n {
            return Err(Error::NotSquare { rows: n, row, len: r.len() });
        }
    }
    let tol = T::default_tolerance();
    let slack = |x: T| tol * T::one().max(x.abs());
    let mut violations = Vec::new();
    let mut finite = true;
    for i in 0..n {
        for j in 0..n {
            if !matrix[i][j].is_finite() {
                violations.push(Violation::NonFinite { i, j });
                finite = false;
            }
        }
    }
    if finite {
        for i in 0..n {
            if matrix[i][i] != T::zero() {
                violations.push(Violation::NonzeroDiagonal { i });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if i != j && matrix[i][j] < T::zero() {
                    violations.push(Violation::NegativeDistance { i, j });
                }
            }
        }
        for (i, j) in pairs(n) {
            let (a, b) = (matrix[i][j], matrix[j][i]);
            if (a - b).abs() > slack(a.max(b)) {
                violations.push(Violation::Asymmetry { i, j });
            } else if a == T::zero() || b == T::zero() {
                violations.push(Violation::DuplicatePoints { i, j });
            }
        }
        for (i, j) in pairs(n) {
            let dij = matrix[i][j];
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                let through = matrix[i][k] + matrix[k][j];
                if dij > through + slack(dij) {
                    violations.push(Violation::TriangleViolation { i, j, via: k });
                }
            }
        }
    }
    if !violations.is_empty() {
        return Err(Error::InvalidMetric(violations));
    }
    let labels = (0..n).map(|i| i.to_string()).collect();
    let mut dist = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            // symmetrize away sub-tolerance noise
            let v = if i < j { matrix[i][j] } else { matrix[j][i] };
            dist.push(if i == j { T::zero() } else { v });
        }
    }
    Ok(FiniteMetricSpace::from_parts_unchecked(labels, dist))
}

/// Unordered pairs `(i, j)` with `i < j < n`.
pub fn pairs(n: usize) -> impl Iterator<Item = (usize, usize)> + Clone {
    (0..n).flat_map(move |i| ((i + 1)..n).map(move |j| (i, j)))
}

pub(crate) fn check_index_set(n: usize, indices: &[usize]) -> Result<()> {
    let mut seen = vec![false; n];
    for &i in indices {
        if i >= n {
            return Err(Error::InvalidIndex { index: i, len: n });
        }
        if std::mem::replace(&mut seen[i], true) {
            return Err(Error::DuplicateIndex(i));
        }
    }
    Ok(())
}

pub(crate) fn lp_distance<T: Scalar>(x: &[T], y: &[T], p: T) -> T {
    let diffs = x.iter().zip(y).map(|(&a, &b)| (a - b).abs());
    if p.is_infinite() {
        diffs.fold(T::zero(), T::max)
    } else if p == T::one() {
        diffs.sum()
    } else {
        diffs.map(|d| d.powf(p)).sum::<T>().powf(p.recip())
    }
}

/// A pointed subspace `(S, m*)` of a finite metric space.
#[derive(Debug, Clone)]
pub struct PointedSubspace<'a, T> {
    parent: &'a FiniteMetricSpace<T>,
    indices: Vec<usize>,
    basepoint: usize,
}

impl<'a, T: Scalar> PointedSubspace<'a, T> {
    /// `basepoint` is an index into the parent space and must belong to `indices`.
    pub fn new(parent: &'a FiniteMetricSpace<T>, indices: Vec<usize>, basepoint: usize) -> Result<Self> {
        check_index_set(parent.len(), &indices)?;
        if !indices.contains(&basepoint) {
            return Err(Error::BasepointNotInSubspace(basepoint));
        }
        Ok(PointedSubspace { parent, indices, basepoint })
    }

    /// Subspace pointed at its first index.
    pub fn first_pointed(parent: &'a FiniteMetricSpace<T>, indices: Vec<usize>) -> Result<Self> {
        let base = *indices.first().ok_or(Error::EmptySource)?;
        Self::new(parent, indices, base)
    }

    pub fn parent(&self) -> &'a FiniteMetricSpace<T> {
        self.parent
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn basepoint(&self) -> usize {
        self.basepoint
    }

    /// Position of the basepoint within `indices`.
    pub fn basepoint_position(&self) -> usize {
        self.indices.iter().position(|&i| i == self.basepoint).expect("checked at construction")
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// The subspace as a standalone metric space (points in `indices` order).
    pub fn induced(&self) -> FiniteMetricSpace<T> {
        self.parent.restrict(&self.indices).expect("indices checked at construction")
    }
}

/// Real values attached to the points of a space, in point order.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField<T> {
    values: Vec<T>,
}

impl<T: Scalar> ScalarField<T> {
    pub fn new(values: Vec<T>) -> Self {
        ScalarField { values }
    }

    pub fn constant(len: usize, c: T) -> Self {
        ScalarField { values: vec![c; len] }
    }

    /// `m -> d(m, center)`.
    pub fn distance_to(space: &FiniteMetricSpace<T>, center: usize) -> Self {
        ScalarField { values: space.row(center).to_vec() }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn get(&self, i: usize) -> T {
        self.values[i]
    }

    /// Lip₀ normalization: shifts the field so that it vanishes at position `base`.
    pub fn normalized_at(&self, base: usize) -> Self {
        let shift = self.values[base];
        ScalarField { values: self.values.iter().map(|&v| v - shift).collect() }
    }

    /// Values at `indices`.
    pub fn restrict(&self, indices: &[usize]) -> Self {
        ScalarField { values: indices.iter().map(|&i| self.values[i]).collect() }
    }

    pub fn map(&self, f: impl Fn(T) -> T) -> Self {
        ScalarField { values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn add(&self, other: &Self) -> Self {
        ScalarField { values: self.values.iter().zip(&other.values).map(|(&a, &b)| a + b).collect() }
    }
}

/// `max |f(m') - f(m'')| / d(m', m'')` over distinct pairs; 0 on a single point.
pub fn lipschitz_seminorm<T: Scalar>(f: &ScalarField<T>, space: &FiniteMetricSpace<T>) -> Result<T> {
    if f.len() != space.len() {
        return Err(Error::LengthMismatch { expected: space.len(), got: f.len() });
    }
    Ok(seminorm_of_values(f.values(), space))
}

pub(crate) fn seminorm_of_values<T: Scalar>(v: &[T], space: &FiniteMetricSpace<T>) -> T {
    pairs(space.len()).map(|(i, j)| (v[i] - v[j]).abs() / space.dist(i, j)).fold(T::zero(), T::max)
}

/// The direct `p`-sum: the Cartesian product with `(sum_i d_i^p)^(1/p)`, or the max metric when `p = inf`.
///
/// Points are enumerated lexicographically with the last factor varying fastest.
pub fn direct_p_sum<T: Scalar>(spaces: &[FiniteMetricSpace<T>], p: T, cap: usize) -> Result<FiniteMetricSpace<T>> {
    if p.is_nan() || p < T::one() {
        return Err(Error::InvalidExponent(p.as_f64()));
    }
    if spaces.is_empty() || spaces.iter().any(|s| s.is_empty()) {
        return Err(Error::Input("direct sum needs nonempty factors".into()));
    }
    let mut size: usize = 1;
    for s in spaces {
        size = size
            .checked_mul(s.len())
            .filter(|&v| v <= cap)
            .ok_or(Error::ProductTooLarge { size: size.saturating_mul(s.len()), cap })?;
    }
    let tuples = cartesian_indices(&spaces.iter().map(|s| s.len()).collect::<Vec<_>>());
    let labels = tuples
        .iter()
        .map(|t| {
            let parts: Vec<&str> = t.iter().zip(spaces).map(|(&i, s)| s.label(i)).collect();
            format!("({})", parts.join(","))
        })
        .collect();
    let dist_fn = |a: usize, b: usize| {
        let comps = tuples[a].iter().zip(&tuples[b]).zip(spaces).map(|((&i, &j), s)| s.dist(i, j));
        if p.is_infinite() {
            comps.fold(T::zero(), T::max)
        } else if p == T::one() {
            comps.sum()
        } else {
            comps.map(|d| d.powf(p)).sum::<T>().powf(p.recip())
        }
    };
    Ok(FiniteMetricSpace::from_fn_unchecked(labels, dist_fn))
}

pub(crate) fn cartesian_indices(sizes: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for &s in sizes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..s).map(move |i| {
                    let mut t = prefix.clone();
                    t.push(i);
                    t
                })
            })
            .collect();
    }
    out
}

/// Multiplies all distances by `c > 0`.
pub fn scale_metric<T: Scalar>(space: &FiniteMetricSpace<T>, c: T) -> Result<FiniteMetricSpace<T>> {
    if !(c > T::zero()) || !c.is_finite() {
        return Err(Error::NonpositiveScale);
    }
    Ok(FiniteMetricSpace::from_parts_unchecked(space.labels.clone(), space.dist.iter().map(|&d| d * c).collect()))
}
