//! Embedding of a truncated `T_k` into the upper half-plane model of `H^2`.
//!
//! Every vertex `v` gets a square `Q(v)` with center `c(v)` and side `μ(v)`; with
//! `n = k^2 + 1` the root square is centered at `(0, 1)` with side `2(n-1)/(n+1)`,
//! and the `k+1` children of `v` sit below it, shrunk by `1/n`, on every `k`-th of the
//! `n` equal subintervals of its bottom side. Vertices map to centers and edges to
//! hyperbolic geodesic segments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::spaces::{hyperbolic_rho, hyperbolic_rho0, HyperbolicPoint, RootedTree};

/// Vertex count up to which [`DistortionMode::default_for`] sweeps every pair.
pub const EXHAUSTIVE_VERTEX_CAP: usize = 2000;

/// Level, left-to-right ordinal within the level, and base-`(k+1)` digits of the ordinal
/// (least significant first; `digits[0]` is the position among the siblings).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VertexCoord {
    pub level: usize,
    pub ordinal: u128,
    pub digits: Vec<usize>,
}

impl VertexCoord {
    /// `Σ_s digits[s] (k+1)^s`.
    pub fn ordinal_from_digits(&self, k: usize) -> u128 {
        self.digits.iter().rev().fold(0u128, |acc, &d| acc * (k as u128 + 1) + d as u128)
    }
}

/// Coordinates of every vertex of a truncated `T_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct TkCoordinates {
    pub k: usize,
    pub coords: Vec<VertexCoord>,
}

/// Recognizes a truncated `T_k` (every internal vertex has `k+1 >= 3` children and all
/// leaves share one level) and numbers each level from left to right, taking children
/// in the tree's child order.
pub fn assign_coordinates<T: Scalar>(tree: &RootedTree<T>) -> Result<TkCoordinates> {
    let root = tree.root();
    let arity = tree.children(root).len();
    if arity < 3 {
        return Err(Error::NotATkTree(format!("root has {arity} children, need k + 1 >= 3")));
    }
    let k = arity - 1;
    let height = tree.height();
    let mut coords = vec![VertexCoord { level: 0, ordinal: 0, digits: Vec::new() }; tree.len()];
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        let kids = tree.children(v);
        if tree.edge_len(v) != T::one() && v != root {
            return Err(Error::NotATkTree(format!("edge above vertex {v} is not of unit length")));
        }
        if kids.is_empty() {
            if coords[v].level != height {
                return Err(Error::NotATkTree(format!("leaf {v} sits at level {} of {height}", coords[v].level)));
            }
            continue;
        }
        if kids.len() != arity {
            return Err(Error::NotATkTree(format!("vertex {v} has {} children, expected {arity}", kids.len())));
        }
        for (idx, &c) in kids.iter().enumerate() {
            let parent = &coords[v];
            let mut digits = Vec::with_capacity(parent.level + 1);
            digits.push(idx);
            digits.extend_from_slice(&parent.digits);
            let ordinal = parent
                .ordinal
                .checked_mul(arity as u128)
                .and_then(|x| x.checked_add(idx as u128))
                .ok_or_else(|| Error::NotATkTree("tree too deep for ordinal arithmetic".into()))?;
            coords[c] = VertexCoord { level: parent.level + 1, ordinal, digits };
            stack.push(c);
        }
    }
    Ok(TkCoordinates { k, coords })
}

/// The square `Q(v)`: center and side length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SquareFrame<T> {
    pub center: HyperbolicPoint<T>,
    pub side: T,
}

/// `n = k^2 + 1`.
pub fn shrink_factor(k: usize) -> usize {
    k * k + 1
}

/// Frames from the root recurrence: `c(R) = (0, 1)`, `μ(R) = 2(n-1)/(n+1)`, and for a child
/// `c2 = c2(v+)/n`, `μ = μ(v+)/n`, `c1 = c1(v+) + μ(2 δ_1 k - k^2)/2`.
pub fn square_frames<T: Scalar>(tree: &RootedTree<T>, coords: &TkCoordinates) -> Result<Vec<SquareFrame<T>>> {
    if coords.coords.len() != tree.len() {
        return Err(Error::LengthMismatch { expected: tree.len(), got: coords.coords.len() });
    }
    let k = coords.k;
    let arity = k as u128 + 1;
    let n = T::from_usize_lossy(shrink_factor(k));
    let kf = T::from_usize_lossy(k);
    let root = tree.root();
    let rc = &coords.coords[root];
    if rc.level != 0 || rc.ordinal != 0 || !rc.digits.is_empty() {
        return Err(Error::IncoherentCoordinates(root));
    }
    let mut frames = vec![None; tree.len()];
    frames[root] = Some(SquareFrame {
        center: HyperbolicPoint::new(T::zero(), T::one())?,
        side: T::lit(2.0) * (n - T::one()) / (n + T::one()),
    });
    let mut stack = vec![root];
    while let Some(p) = stack.pop() {
        let pf: SquareFrame<T> = frames[p].expect("parent visited first");
        let pc = &coords.coords[p];
        for &v in tree.children(p) {
            let c = &coords.coords[v];
            let coherent = c.level == pc.level + 1
                && c.digits.len() == c.level
                && c.digits.iter().all(|&d| d <= k)
                && c.digits[1..] == pc.digits[..]
                && c.ordinal / arity == pc.ordinal
                && c.ordinal_from_digits(k) == c.ordinal;
            if !coherent {
                return Err(Error::IncoherentCoordinates(v));
            }
            let side = pf.side / n;
            let delta = T::from_usize_lossy(c.digits[0]);
            let x1 = pf.center.x1() + side / T::lit(2.0) * (T::lit(2.0) * delta * kf - kf * kf);
            frames[v] = Some(SquareFrame { center: HyperbolicPoint::new(x1, pf.center.x2() / n)?, side });
            stack.push(v);
        }
    }
    Ok(frames.into_iter().map(|f| f.expect("tree is connected")).collect())
}

/// `I(v) = c(v)`.
pub fn embed_vertices<T: Scalar>(frames: &[SquareFrame<T>]) -> Vec<HyperbolicPoint<T>> {
    frames.iter().map(|f| f.center).collect()
}

/// Everything the embedding needs, computed once.
#[derive(Debug, Clone)]
pub struct TreeEmbedding<T> {
    pub k: usize,
    pub coords: TkCoordinates,
    pub frames: Vec<SquareFrame<T>>,
    pub points: Vec<HyperbolicPoint<T>>,
}

impl<T: Scalar> TreeEmbedding<T> {
    pub fn new(tree: &RootedTree<T>) -> Result<Self> {
        let coords = assign_coordinates(tree)?;
        let frames = square_frames(tree, &coords)?;
        let points = embed_vertices(&frames);
        Ok(TreeEmbedding { k: coords.k, coords, frames, points })
    }

    pub fn n(&self) -> usize {
        shrink_factor(self.k)
    }

    /// `log n`, the `ρ0` length of every embedded edge.
    pub fn log_n(&self) -> T {
        T::from_usize_lossy(self.n()).ln()
    }
}

/// Point at parameter `t` on the geodesic from `c(v+)` (`t = 0`) to `c(v)` (`t = 1`),
/// at hyperbolic arclength `t ρ(c(v+), c(v))` from `c(v+)`.
pub fn embed_edge_point<T: Scalar>(
    tree: &RootedTree<T>,
    embedding: &TreeEmbedding<T>,
    v: usize,
    t: T,
) -> Result<HyperbolicPoint<T>> {
    if v >= tree.len() {
        return Err(Error::InvalidVertex(v));
    }
    let parent = tree.parent(v).ok_or(Error::RootHasNoEdge)?;
    if !(t >= T::zero() && t <= T::one()) {
        return Err(Error::ParamOutOfRange(t.as_f64()));
    }
    geodesic_point(&embedding.points[parent], &embedding.points[v], t)
}

/// Point at fraction `t` of the hyperbolic geodesic from `a` to `b`.
pub fn geodesic_point<T: Scalar>(a: &HyperbolicPoint<T>, b: &HyperbolicPoint<T>, t: T) -> Result<HyperbolicPoint<T>> {
    if t.is_zero() {
        return Ok(*a);
    }
    if t == T::one() {
        return Ok(*b);
    }
    if a.x1() == b.x1() {
        // vertical line: arclength is the log of the height
        let y = a.x2() * (b.x2() / a.x2()).powf(t);
        return HyperbolicPoint::new(a.x1(), y);
    }
    // circle orthogonal to the boundary: center on the real axis
    let (a1, a2, b1, b2) = (a.x1(), a.x2(), b.x1(), b.x2());
    let two = T::lit(2.0);
    let c = ((a1 * a1 + a2 * a2) - (b1 * b1 + b2 * b2)) / (two * (a1 - b1));
    let r = (a1 - c).hypot(a2);
    // with x = c + r cos θ, y = r sin θ the arclength is ln tan(θ/2)
    let theta_a = a2.atan2(a1 - c);
    let theta_b = b2.atan2(b1 - c);
    let (ua, ub) = ((theta_a / two).tan().ln(), (theta_b / two).tan().ln());
    let u = ua + t * (ub - ua);
    let theta = two * u.exp().atan();
    HyperbolicPoint::new(c + r * theta.cos(), r * theta.sin())
}

/// Polyline of `segments + 1` points along the embedded edge above `v`, from `c(v+)` to `c(v)`.
pub fn edge_polyline<T: Scalar>(
    tree: &RootedTree<T>,
    embedding: &TreeEmbedding<T>,
    v: usize,
    segments: usize,
) -> Result<Vec<HyperbolicPoint<T>>> {
    let segments = segments.max(1);
    (0..=segments)
        .map(|i| embed_edge_point(tree, embedding, v, T::from_usize_lossy(i) / T::from_usize_lossy(segments)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DistortionMetric {
    /// The hyperbolic distance.
    Rho,
    /// The comparison gauge `max_i log(1 + |x_i - y_i| / min(x2, y2))`.
    Rho0,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DistortionMode {
    Exhaustive,
    Sampled { pairs: usize, seed: u64 },
}

impl DistortionMode {
    /// Every pair up to [`EXHAUSTIVE_VERTEX_CAP`] vertices, otherwise `pairs` seeded samples.
    pub fn default_for(vertices: usize, pairs: usize, seed: u64) -> Self {
        if vertices <= EXHAUSTIVE_VERTEX_CAP {
            DistortionMode::Exhaustive
        } else {
            DistortionMode::Sampled { pairs, seed }
        }
    }
}

/// Ratios `metric(I(v), I(w)) / d(v, w)` over vertex pairs, with the bounds they must obey.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DistortionReport {
    pub metric: DistortionMetric,
    pub k: usize,
    pub n: usize,
    pub vertices: usize,
    pub pairs_evaluated: usize,
    pub min_ratio: f64,
    pub max_ratio: f64,
    pub argmin: (usize, usize),
    pub argmax: (usize, usize),
    /// Lower and upper envelope for the ratio: `[log n / 8, log n]` for `ρ0`,
    /// `[log n / 64, 4 log n]` for `ρ`.
    pub lower_bound: f64,
    pub upper_bound: f64,
    /// `max_ratio / min_ratio`, to be compared with 256 for `ρ`.
    pub spread: f64,
    pub bound_violations: usize,
    /// Pairs with `|c(v) - c(w)| < min(c2(v), c2(w)) / 2`.
    pub separation_violations: usize,
    /// Pairs where `ρ0/8 <= ρ <= 4 ρ0` fails.
    pub comparison_violations: usize,
    /// Children whose square does not sit under the parent's bottom side.
    pub frame_violations: usize,
}

impl DistortionReport {
    pub fn is_clean(&self) -> bool {
        self.bound_violations == 0
            && self.separation_violations == 0
            && self.comparison_violations == 0
            && self.frame_violations == 0
            && (self.metric == DistortionMetric::Rho0 || self.spread <= 256.0 * (1.0 + 1e-12))
    }
}

/// Children whose horizontal extent leaves the parent's, or whose top edge is not the
/// parent's bottom edge.
pub fn frame_violations<T: Scalar>(tree: &RootedTree<T>, frames: &[SquareFrame<T>], tol: T) -> Vec<usize> {
    (0..tree.len())
        .filter(|&v| {
            let Some(p) = tree.parent(v) else { return false };
            let (f, g) = (&frames[v], &frames[p]);
            let half = T::lit(0.5);
            let inside = (f.center.x1() - g.center.x1()).abs() + half * f.side <= half * g.side + tol;
            let stacked = (f.center.x2() + half * f.side - (g.center.x2() - half * g.side)).abs() <= tol;
            !(inside && stacked)
        })
        .collect()
}

pub fn distortion_report<T: Scalar>(
    tree: &RootedTree<T>,
    embedding: &TreeEmbedding<T>,
    metric: DistortionMetric,
    mode: DistortionMode,
) -> Result<DistortionReport> {
    let nv = tree.len();
    if nv < 2 {
        return Err(Error::Input("distortion needs at least two vertices".into()));
    }
    let pairs: Vec<(usize, usize)> = match mode {
        DistortionMode::Exhaustive => (0..nv).flat_map(|v| ((v + 1)..nv).map(move |w| (v, w))).collect(),
        DistortionMode::Sampled { pairs, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..pairs)
                .map(|_| {
                    let v = rng.gen_range(0..nv);
                    let w = (v + rng.gen_range(1..nv)) % nv;
                    (v.min(w), v.max(w))
                })
                .collect()
        }
    };
    let log_n = embedding.log_n().as_f64();
    let (lower, upper) = match metric {
        DistortionMetric::Rho0 => (log_n / 8.0, log_n),
        DistortionMetric::Rho => (log_n / 64.0, 4.0 * log_n),
    };
    let slack = 1e-9;
    let pts = &embedding.points;
    let rows: Vec<PairStats> = pairs
        .par_iter()
        .map(|&(v, w)| {
            let d = tree_distance_levels(tree, v, w)?;
            let (x, y) = (&pts[v], &pts[w]);
            let r = hyperbolic_rho(x, y).as_f64();
            let r0 = hyperbolic_rho0(x, y).as_f64();
            let ratio = match metric {
                DistortionMetric::Rho => r,
                DistortionMetric::Rho0 => r0,
            } / d;
            let separated = x.euclidean_distance(y) >= x.x2().min(y.x2()) * T::lit(0.5);
            let comparable = r <= 4.0 * r0 * (1.0 + slack) && r >= r0 / 8.0 * (1.0 - slack);
            Ok(PairStats {
                ratio,
                out_of_bounds: ratio < lower * (1.0 - slack) || ratio > upper * (1.0 + slack),
                separated,
                comparable,
            })
        })
        .collect::<Result<_>>()?;
    let mut report = DistortionReport {
        metric,
        k: embedding.k,
        n: embedding.n(),
        vertices: nv,
        pairs_evaluated: pairs.len(),
        min_ratio: f64::INFINITY,
        max_ratio: f64::NEG_INFINITY,
        argmin: pairs[0],
        argmax: pairs[0],
        lower_bound: lower,
        upper_bound: upper,
        spread: 0.0,
        bound_violations: 0,
        separation_violations: 0,
        comparison_violations: 0,
        frame_violations: frame_violations(tree, &embedding.frames, T::lit(1e-12)).len(),
    };
    for (&p, s) in pairs.iter().zip(&rows) {
        if s.ratio < report.min_ratio {
            report.min_ratio = s.ratio;
            report.argmin = p;
        }
        if s.ratio > report.max_ratio {
            report.max_ratio = s.ratio;
            report.argmax = p;
        }
        report.bound_violations += usize::from(s.out_of_bounds);
        report.separation_violations += usize::from(!s.separated);
        report.comparison_violations += usize::from(!s.comparable);
    }
    report.spread = report.max_ratio / report.min_ratio;
    Ok(report)
}

struct PairStats {
    ratio: f64,
    out_of_bounds: bool,
    separated: bool,
    comparable: bool,
}

/// `l_v + l_w - 2 l_{a(v, w)}`, the unit-edge tree distance.
fn tree_distance_levels<T: Scalar>(tree: &RootedTree<T>, v: usize, w: usize) -> Result<f64> {
    let a = tree.common_ancestor(v, w)?;
    Ok((tree.level(v) + tree.level(w) - 2 * tree.level(a)) as f64)
}
