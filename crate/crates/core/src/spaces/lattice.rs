use crate::error::{Error, Result};
use crate::metric::{check_index_set, FiniteMetricSpace};
use crate::scalar::Scalar;

/// An `R`-lattice: centers whose open `R/2`-balls cover the space and whose open
/// `c R`-balls are pairwise disjoint.
#[derive(Debug, Clone, PartialEq)]
pub struct Lattice<T> {
    centers: Vec<usize>,
    radius: T,
    packing: T,
}

impl<T: Scalar> Lattice<T> {
    /// Checks both lattice properties for a given center set and reports the
    /// largest packing constant `c <= 1/4` it supports.
    pub fn from_centers(space: &FiniteMetricSpace<T>, centers: Vec<usize>, radius: T) -> Result<Self> {
        if !(radius > T::zero()) {
            return Err(Error::NonpositiveRadius);
        }
        if centers.is_empty() {
            return Err(Error::EmptySource);
        }
        check_index_set(space.len(), &centers)?;
        let half = radius / T::lit(2.0);
        for m in 0..space.len() {
            if !centers.iter().any(|&g| space.dist(m, g) < half) {
                return Err(Error::CoverFailure(m));
            }
        }
        let packing = max_packing_constant(space, &centers, radius);
        if !(packing > T::zero()) {
            return Err(Error::Input("lattice balls overlap for every c > 0".into()));
        }
        Ok(Lattice { centers, radius, packing })
    }

    pub fn centers(&self) -> &[usize] {
        &self.centers
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    /// Packing constant `c_Γ`.
    pub fn packing(&self) -> T {
        self.packing
    }

    /// Largest number of balls `B_R(γ)` containing a single point.
    pub fn multiplicity(&self, space: &FiniteMetricSpace<T>) -> usize {
        (0..space.len())
            .map(|m| self.centers.iter().filter(|&&g| space.dist(m, g) < self.radius).count())
            .max()
            .unwrap_or(0)
    }
}

/// Open balls `B_{cR}(γ)` are disjoint iff no point lies strictly within `cR` of two
/// centers, so the supremum is the smallest second-nearest-center distance over `R`.
fn max_packing_constant<T: Scalar>(space: &FiniteMetricSpace<T>, centers: &[usize], radius: T) -> T {
    let quarter = T::lit(0.25);
    if centers.len() < 2 {
        return quarter;
    }
    let mut c = quarter;
    for m in 0..space.len() {
        let (mut first, mut second) = (T::infinity(), T::infinity());
        for &g in centers {
            let d = space.dist(m, g);
            if d < first {
                second = first;
                first = d;
            } else if d < second {
                second = d;
            }
        }
        c = c.min(second / radius);
    }
    c
}

/// Greedy maximal `R/2`-separated set, scanning points in index order.
///
/// A point joins when its distance to every chosen center is at least `R/2`.
pub fn build_r_lattice<T: Scalar>(space: &FiniteMetricSpace<T>, radius: T) -> Result<Lattice<T>> {
    if !(radius > T::zero()) {
        return Err(Error::NonpositiveRadius);
    }
    let half = radius / T::lit(2.0);
    let mut centers: Vec<usize> = Vec::new();
    for m in 0..space.len() {
        if centers.iter().all(|&g| space.dist(m, g) >= half) {
            centers.push(m);
        }
    }
    Lattice::from_centers(space, centers, radius)
}
