use super::{averaging_operator, mcshane_extend, MeasureFamily, WeightMatrix};
use crate::error::{Error, Result};
use crate::metric::{check_index_set, FiniteMetricSpace, ScalarField};
use crate::scalar::Scalar;
use crate::spaces::Lattice;

/// Partition of unity `{ρ_γ}` subordinate to the open balls `B_R(γ)` around a center set.
#[derive(Debug, Clone, PartialEq)]
pub struct PartitionOfUnity<T> {
    centers: Vec<usize>,
    radius: T,
    rho: Vec<ScalarField<T>>,
    multiplicity: usize,
}

impl<T: Scalar> PartitionOfUnity<T> {
    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// `ρ_γ` for each center, in center order.
    pub fn rho(&self) -> &[ScalarField<T>] {
        &self.rho
    }

    /// Largest number of balls `B_R(γ)` containing one point.
    pub fn multiplicity(&self) -> usize {
        self.multiplicity
    }

    /// `(2/R)(2μ + 1)` with `μ` the multiplicity: the Lipschitz bound each `ρ_γ` obeys
    /// when the centers form an `R`-lattice.
    pub fn lipschitz_bound(&self) -> T {
        T::lit(2.0) / self.radius * (T::lit(2.0) * T::from_usize_lossy(self.multiplicity) + T::one())
    }
}

/// Partition of unity for a lattice.
pub fn whitney_partition<T: Scalar>(space: &FiniteMetricSpace<T>, lattice: &Lattice<T>) -> Result<PartitionOfUnity<T>> {
    whitney_partition_for_centers(space, lattice.centers(), lattice.radius())
}

/// Partition of unity for an arbitrary center set.
///
/// With `d_γ(m)` the distance from `m` to the complement of `B_R(γ)` (infinite when the
/// ball is everything) and the ramp `φ(t) = min(1, 2t/R)`, `ρ_γ = φ∘d_γ / Σ_γ' φ∘d_γ'`.
/// `φ∘d_γ` vanishes exactly off `B_R(γ)` and equals one on `B_{R/2}(γ)`.
pub fn whitney_partition_for_centers<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    centers: &[usize],
    radius: T,
) -> Result<PartitionOfUnity<T>> {
    if !(radius > T::zero()) {
        return Err(Error::NonpositiveRadius);
    }
    if centers.is_empty() {
        return Err(Error::EmptySource);
    }
    check_index_set(space.len(), centers)?;
    let n = space.len();
    let two_over_r = T::lit(2.0) / radius;
    let bumps: Vec<Vec<T>> = centers
        .iter()
        .map(|&g| {
            let outside: Vec<usize> = (0..n).filter(|&j| space.dist(g, j) >= radius).collect();
            (0..n)
                .map(|m| {
                    let d = outside.iter().map(|&j| space.dist(m, j)).fold(T::infinity(), T::min);
                    (two_over_r * d).min(T::one())
                })
                .collect()
        })
        .collect();
    let mut sum = vec![T::zero(); n];
    for b in &bumps {
        for (s, &v) in sum.iter_mut().zip(b) {
            *s += v;
        }
    }
    if let Some(m) = (0..n).find(|&m| !(sum[m] > T::zero())) {
        return Err(Error::CoverFailure(m));
    }
    let rho = bumps.into_iter().map(|b| ScalarField::new(b.iter().zip(&sum).map(|(&v, &s)| v / s).collect())).collect();
    let multiplicity =
        (0..n).map(|m| centers.iter().filter(|&&g| space.dist(m, g) < radius).count()).max().unwrap_or(0);
    Ok(PartitionOfUnity { centers: centers.to_vec(), radius, rho, multiplicity })
}

/// An extension operator on one ball `B_R(γ)` from the centers inside it.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalOperator<T> {
    /// Points of the ball in increasing index order; the operator's target indexes this list.
    pub ball: Vec<usize>,
    /// Operator whose source lists the positions (within `ball`) of the centers in the ball.
    pub op: WeightMatrix<T>,
}

/// Averaging operators with the counting measure on each ball.
pub fn default_local_operators<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    partition: &PartitionOfUnity<T>,
) -> Result<Vec<LocalOperator<T>>> {
    partition
        .centers()
        .iter()
        .map(|&g| {
            let ball = space.open_ball(g, partition.radius());
            let sub = space.restrict(&ball)?;
            let source: Vec<usize> = (0..ball.len()).filter(|&k| partition.centers().contains(&ball[k])).collect();
            let op = averaging_operator(&sub, &source, &MeasureFamily::counting(ball.len()))?;
            Ok(LocalOperator { ball, op })
        })
        .collect()
}

fn check_local_operators<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    partition: &PartitionOfUnity<T>,
    local: &[LocalOperator<T>],
) -> Result<()> {
    if local.len() != partition.centers().len() {
        return Err(Error::LengthMismatch { expected: partition.centers().len(), got: local.len() });
    }
    for (&g, lo) in partition.centers().iter().zip(local) {
        let mismatch = |reason: &str| Error::LocalOperatorMismatch { center: g, reason: reason.to_string() };
        if lo.ball != space.open_ball(g, partition.radius()) {
            return Err(mismatch("ball does not match B_R(center)"));
        }
        if lo.op.target_len() != lo.ball.len() {
            return Err(mismatch("operator target size differs from the ball size"));
        }
        let mut expected: Vec<usize> =
            (0..lo.ball.len()).filter(|&k| partition.centers().contains(&lo.ball[k])).collect();
        let mut got = lo.op.source().to_vec();
        expected.sort_unstable();
        got.sort_unstable();
        if expected != got {
            return Err(mismatch("operator source is not the set of centers inside the ball"));
        }
    }
    Ok(())
}

/// Assembles `Ef = Σ_γ ρ_γ E_γ(f|_{Γ ∩ B_γ})` as one matrix with the centers as source.
pub fn whitney_operator<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    partition: &PartitionOfUnity<T>,
    local: &[LocalOperator<T>],
) -> Result<WeightMatrix<T>> {
    check_local_operators(space, partition, local)?;
    let n = space.len();
    let centers = partition.centers();
    let mut center_pos = vec![usize::MAX; n];
    for (k, &g) in centers.iter().enumerate() {
        center_pos[g] = k;
    }
    let mut rows = vec![vec![T::zero(); centers.len()]; n];
    for (rho, lo) in partition.rho().iter().zip(local) {
        for (local_m, &m) in lo.ball.iter().enumerate() {
            let r = rho.get(m);
            if r.is_zero() {
                continue;
            }
            for (&src, &w) in lo.op.source().iter().zip(lo.op.row(local_m)) {
                rows[m][center_pos[lo.ball[src]]] += r * w;
            }
        }
    }
    WeightMatrix::new(n, centers.to_vec(), rows)
}

/// Applies the Whitney operator to `f` given on the centers, in center order.
pub fn whitney_extend<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    partition: &PartitionOfUnity<T>,
    local: &[LocalOperator<T>],
    f: &[T],
) -> Result<ScalarField<T>> {
    whitney_operator(space, partition, local)?.apply(f)
}

/// The same extension built by gluing: every local extension is first extended to the
/// whole space by McShane's formula, then weighted by `ρ_γ`.
pub fn whitney_extend_glued<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    partition: &PartitionOfUnity<T>,
    local: &[LocalOperator<T>],
    f: &[T],
) -> Result<ScalarField<T>> {
    check_local_operators(space, partition, local)?;
    let centers = partition.centers();
    if f.len() != centers.len() {
        return Err(Error::LengthMismatch { expected: centers.len(), got: f.len() });
    }
    let mut out = ScalarField::constant(space.len(), T::zero());
    for (rho, lo) in partition.rho().iter().zip(local) {
        let f_local: Vec<T> = lo
            .op
            .source()
            .iter()
            .map(|&k| f[centers.iter().position(|&g| g == lo.ball[k]).expect("checked above")])
            .collect();
        let on_ball = lo.op.apply(&f_local)?;
        let glued = mcshane_extend(space, &lo.ball, on_ball.values())?;
        out = out.add(&ScalarField::new(glued.values().iter().zip(rho.values()).map(|(&v, &r)| v * r).collect()));
    }
    Ok(out)
}
