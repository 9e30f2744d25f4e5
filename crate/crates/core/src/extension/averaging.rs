use serde::Serialize;

use super::WeightMatrix;
use crate::error::{Error, Result};
use crate::metric::{check_index_set, FiniteMetricSpace};
use crate::scalar::Scalar;

/// Distance to the source set and the selected nearest source point for every point.
#[derive(Debug, Clone, PartialEq)]
pub struct NearestPointMap<T> {
    pub dist: Vec<T>,
    /// Position in the source list of the selected nearest point.
    pub position: Vec<usize>,
    /// Index in the space of the selected nearest point.
    pub nearest: Vec<usize>,
}

/// For each point, the distance to `source` and the first source point (in list order)
/// attaining it.
pub fn nearest_point_map<T: Scalar>(space: &FiniteMetricSpace<T>, source: &[usize]) -> Result<NearestPointMap<T>> {
    if source.is_empty() {
        return Err(Error::EmptySource);
    }
    check_index_set(space.len(), source)?;
    let n = space.len();
    let mut out = NearestPointMap {
        dist: Vec::with_capacity(n),
        position: Vec::with_capacity(n),
        nearest: Vec::with_capacity(n),
    };
    for m in 0..n {
        let mut best = 0;
        for (k, &s) in source.iter().enumerate().skip(1) {
            if space.dist(m, s) < space.dist(m, source[best]) {
                best = k;
            }
        }
        out.dist.push(space.dist(m, source[best]));
        out.position.push(best);
        out.nearest.push(source[best]);
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureMode {
    /// One measure used at every point.
    Shared,
    /// A separate measure `μ_m` per point `m`.
    Pointwise,
}

/// A family of finite measures `{μ_m}` on the points of a space.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureFamily<T> {
    n: usize,
    mode: MeasureMode,
    measures: Vec<Vec<T>>,
}

impl<T: Scalar> MeasureFamily<T> {
    pub fn shared(weights: Vec<T>) -> Result<Self> {
        check_measure(&weights, weights.len(), 0)?;
        Ok(MeasureFamily { n: weights.len(), mode: MeasureMode::Shared, measures: vec![weights] })
    }

    /// Counting measure shared by all points.
    pub fn counting(n: usize) -> Self {
        MeasureFamily { n, mode: MeasureMode::Shared, measures: vec![vec![T::one(); n]] }
    }

    pub fn pointwise(measures: Vec<Vec<T>>) -> Result<Self> {
        let n = measures.len();
        for (m, w) in measures.iter().enumerate() {
            check_measure(w, n, m)?;
        }
        Ok(MeasureFamily { n, mode: MeasureMode::Pointwise, measures })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn mode(&self) -> MeasureMode {
        self.mode
    }

    /// The measure `μ_m` as a weight per point.
    pub fn measure(&self, m: usize) -> &[T] {
        match self.mode {
            MeasureMode::Shared => &self.measures[0],
            MeasureMode::Pointwise => &self.measures[m],
        }
    }

    /// `μ_m(B_r(m))` for the open ball.
    pub fn ball_mass(&self, space: &FiniteMetricSpace<T>, m: usize, r: T) -> T {
        let mu = self.measure(m);
        (0..space.len()).filter(|&j| space.dist(m, j) < r).map(|j| mu[j]).sum()
    }
}

fn check_measure<T: Scalar>(w: &[T], n: usize, m: usize) -> Result<()> {
    if w.len() != n {
        return Err(Error::InvalidMeasure(format!("measure {m} has {} weights, expected {n}", w.len())));
    }
    if w.iter().any(|x| !x.is_finite() || *x < T::zero()) {
        return Err(Error::InvalidMeasure(format!("measure {m} has a negative or non-finite weight")));
    }
    if n > 0 && w.iter().all(|x| x.is_zero()) {
        return Err(Error::InvalidMeasure(format!("measure {m} is identically zero")));
    }
    Ok(())
}

/// Averaging extension operator: off the source, `Ef(m)` is the `μ_m`-average of
/// `f∘p` over the open ball of radius `dist(m, S)`, where `p` is the nearest-point
/// selection of [`nearest_point_map`]. A massless open ball falls back to the closed one.
pub fn averaging_operator<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    source: &[usize],
    measures: &MeasureFamily<T>,
) -> Result<WeightMatrix<T>> {
    if measures.len() != space.len() {
        return Err(Error::LengthMismatch { expected: space.len(), got: measures.len() });
    }
    let near = nearest_point_map(space, source)?;
    let n = space.len();
    let k = source.len();
    let mut in_source = vec![None; n];
    for (pos, &s) in source.iter().enumerate() {
        in_source[s] = Some(pos);
    }
    let mut rows = Vec::with_capacity(n);
    for m in 0..n {
        let mut row = vec![T::zero(); k];
        if let Some(pos) = in_source[m] {
            row[pos] = T::one();
            rows.push(row);
            continue;
        }
        let mu = measures.measure(m);
        let r = near.dist[m];
        let mut mass = T::zero();
        for j in (0..n).filter(|&j| space.dist(m, j) < r) {
            row[near.position[j]] += mu[j];
            mass += mu[j];
        }
        if !(mass > T::zero()) {
            row.iter_mut().for_each(|x| *x = T::zero());
            mass = T::zero();
            for j in (0..n).filter(|&j| space.dist(m, j) <= r) {
                row[near.position[j]] += mu[j];
                mass += mu[j];
            }
        }
        if !(mass > T::zero()) {
            return Err(Error::EmptyBallMass(m));
        }
        row.iter_mut().for_each(|x| *x /= mass);
        rows.push(row);
    }
    WeightMatrix::new(n, source.to_vec(), rows)
}

/// Measured doubling constants of a measure family.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoublingConstants<T> {
    /// The dilation factor `l` used for `D(l)`.
    pub l: T,
    /// `max μ_m(B_{lR}(m)) / μ_m(B_R(m))`.
    pub d: T,
    /// Consistency constant between measures at different points.
    pub c: T,
    /// Annulus constant.
    pub a: T,
}

/// Ball masses around one point as a step function of the radius.
struct RadialMass<T> {
    dist: Vec<T>,
    cumulative: Vec<T>,
}

impl<T: Scalar> RadialMass<T> {
    fn new(space: &FiniteMetricSpace<T>, m: usize, mu: &[T]) -> Self {
        let mut order: Vec<usize> = (0..space.len()).collect();
        order.sort_by(|&a, &b| space.dist(m, a).partial_cmp(&space.dist(m, b)).expect("finite distances"));
        let dist = order.iter().map(|&j| space.dist(m, j)).collect();
        let mut acc = T::zero();
        let cumulative = order
            .iter()
            .map(|&j| {
                acc += mu[j];
                acc
            })
            .collect();
        RadialMass { dist, cumulative }
    }

    /// Mass of the open ball of radius `r`.
    fn open(&self, r: T) -> T {
        let count = self.dist.partition_point(|&d| d < r);
        if count == 0 {
            T::zero()
        } else {
            self.cumulative[count - 1]
        }
    }
}

/// Computes `D(l)`, `C` and `A` as attained maxima over finite radius sets.
///
/// `D(l)` is evaluated at every `d` and `d / l` for pairwise distances `d`, which
/// covers every value the ratio takes. `C` and `A` range over half the smallest
/// distance, every distance and the midpoints between consecutive distances; over
/// unrestricted radii both are unbounded on any finite space with atoms.
pub fn doubling_constants<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    measures: &MeasureFamily<T>,
    l: T,
) -> Result<DoublingConstants<T>> {
    if !(l > T::one()) || !l.is_finite() {
        return Err(Error::Input(format!("dilation factor must exceed 1, got {l}")));
    }
    if measures.len() != space.len() {
        return Err(Error::LengthMismatch { expected: space.len(), got: measures.len() });
    }
    let n = space.len();
    let distances = space.distinct_distances();
    let radial: Vec<RadialMass<T>> = (0..n).map(|m| RadialMass::new(space, m, measures.measure(m))).collect();

    let mut d_radii: Vec<T> = distances.iter().flat_map(|&d| [d, d / l]).collect();
    sort_dedup(&mut d_radii);
    let mut d_const = T::one();
    for (m, rm) in radial.iter().enumerate() {
        for &r in &d_radii {
            let den = rm.open(r);
            if !(den > T::zero()) {
                return Err(Error::EmptyBallMass(m));
            }
            d_const = d_const.max(rm.open(l * r) / den);
        }
    }

    let mut radii: Vec<T> = Vec::new();
    if let Some(&first) = distances.first() {
        radii.push(first / T::lit(2.0));
    }
    radii.extend(distances.iter().copied());
    radii.extend(distances.windows(2).map(|w| (w[0] + w[1]) / T::lit(2.0)));
    sort_dedup(&mut radii);

    let mut c_const = T::zero();
    if measures.mode() == MeasureMode::Pointwise {
        for m1 in 0..n {
            for m2 in (m1 + 1)..n {
                let (mu1, mu2) = (measures.measure(m1), measures.measure(m2));
                let d12 = space.dist(m1, m2);
                for m in [m1, m2] {
                    for &r in &radii {
                        let den = radial[m].open(r);
                        if !(den > T::zero()) {
                            return Err(Error::EmptyBallMass(m));
                        }
                        let var: T = (0..n).filter(|&j| space.dist(m, j) < r).map(|j| (mu1[j] - mu2[j]).abs()).sum();
                        c_const = c_const.max(var * r / (den * d12));
                    }
                }
            }
        }
    }

    let mut a_const = T::zero();
    for (m, rm) in radial.iter().enumerate() {
        let masses: Vec<T> = radii.iter().map(|&r| rm.open(r)).collect();
        for (j, &r2) in radii.iter().enumerate() {
            if !(masses[j] > T::zero()) {
                return Err(Error::EmptyBallMass(m));
            }
            for (i, &r1) in radii[..j].iter().enumerate() {
                let ratio = (masses[j] - masses[i]) * r2 / (masses[j] * (r2 - r1));
                a_const = a_const.max(ratio);
            }
        }
    }

    Ok(DoublingConstants { l, d: d_const, c: c_const, a: a_const })
}

fn sort_dedup<T: Scalar>(v: &mut Vec<T>) {
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite radii"));
    v.dedup();
}
