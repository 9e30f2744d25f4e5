//! The Lipschitz-free norm of zero-sum weight vectors on a finite metric space.
//!
//! For a zero-sum `a`, the norm is both
//!
//! * `sup { Σ a_s f(s) : |f|_Lip <= 1 }` (the dual, Lipschitz side), and
//! * `min { Σ g_uv d(u, v) : g >= 0, out(g) - in(g) = a }` (the transshipment side).
//!
//! [`free_norm`] solves the transport form between the positive and negative parts,
//! which the triangle inequality makes equivalent to full transshipment.
//! [`free_norm_witness`] solves transshipment on the complete graph and returns both
//! certificates: an optimal flow and an optimal 1-Lipschitz potential.

use crate::error::{Error, Result};
use crate::lp::{LinearProgram, RowKind, SolverOptions};
use crate::metric::{pairs, seminorm_of_values, FiniteMetricSpace, ScalarField};
use crate::scalar::Scalar;

/// A zero-sum weight vector over the points of a space.
#[derive(Debug, Clone, PartialEq)]
pub struct SignedWeightVector<T> {
    weights: Vec<T>,
}

impl<T: Scalar> SignedWeightVector<T> {
    pub fn new(weights: Vec<T>) -> Result<Self> {
        check_zero_sum(&weights)?;
        Ok(SignedWeightVector { weights })
    }

    pub fn zero(n: usize) -> Self {
        SignedWeightVector { weights: vec![T::zero(); n] }
    }

    /// `δ_x - δ_y`.
    pub fn dirac_difference(n: usize, x: usize, y: usize) -> Self {
        let mut weights = vec![T::zero(); n];
        weights[x] += T::one();
        weights[y] -= T::one();
        SignedWeightVector { weights }
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    /// Pairing with a function: `Σ a_s f(s)`.
    pub fn pair(&self, f: &[T]) -> T {
        self.weights.iter().zip(f).map(|(&a, &v)| a * v).sum()
    }
}

fn check_zero_sum<T: Scalar>(w: &[T]) -> Result<()> {
    let sum: T = w.iter().copied().sum();
    let mass: T = w.iter().map(|x| x.abs()).sum();
    if sum.abs() > T::tight_tolerance() * T::one().max(mass) {
        return Err(Error::NotZeroSum(sum.as_f64()));
    }
    Ok(())
}

/// Nonnegative flow on ordered pairs `(u, v)`, `u != v`, stored as an `n x n` matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowAssignment<T> {
    n: usize,
    flow: Vec<T>,
}

impl<T: Scalar> FlowAssignment<T> {
    pub fn zero(n: usize) -> Self {
        FlowAssignment { n, flow: vec![T::zero(); n * n] }
    }

    pub fn get(&self, u: usize, v: usize) -> T {
        self.flow[u * self.n + v]
    }

    /// Outflow minus inflow at each point.
    pub fn divergence(&self) -> Vec<T> {
        (0..self.n).map(|s| (0..self.n).map(|t| self.get(s, t) - self.get(t, s)).sum()).collect()
    }

    pub fn cost(&self, space: &FiniteMetricSpace<T>) -> T {
        let n = self.n;
        (0..n).flat_map(|u| (0..n).map(move |v| (u, v))).map(|(u, v)| self.get(u, v) * space.dist(u, v)).sum()
    }
}

/// Both LP certificates for a free-norm evaluation.
#[derive(Debug, Clone)]
pub struct FreeNormWitness<T> {
    /// Optimal value (flow cost).
    pub value: T,
    /// Optimal 1-Lipschitz potential, vanishing at the basepoint.
    pub potential: ScalarField<T>,
    pub flow: FlowAssignment<T>,
    /// `Σ a_s f(s)` for the returned potential.
    pub dual_value: T,
    pub iterations: usize,
}

/// Free norm of `a` on `space` (computed on the transport formulation).
pub fn free_norm<T: Scalar>(space: &FiniteMetricSpace<T>, a: &SignedWeightVector<T>) -> Result<T> {
    free_norm_of_weights(space, a.weights(), &SolverOptions::default())
}

/// Free norm of a raw weight slice; checks the zero-sum condition.
pub fn free_norm_of_weights<T: Scalar>(space: &FiniteMetricSpace<T>, w: &[T], opts: &SolverOptions<T>) -> Result<T> {
    if w.len() != space.len() {
        return Err(Error::LengthMismatch { expected: space.len(), got: w.len() });
    }
    check_zero_sum(w)?;
    let mass: T = w.iter().map(|x| x.abs()).sum();
    let noise = T::epsilon() * T::lit(16.0) * T::one().max(mass);
    let pos: Vec<usize> = (0..w.len()).filter(|&i| w[i] > noise).collect();
    let neg: Vec<usize> = (0..w.len()).filter(|&i| w[i] < -noise).collect();
    if pos.is_empty() || neg.is_empty() {
        return Ok(T::zero());
    }
    // a single source or sink leaves no routing choice
    if pos.len() == 1 {
        return Ok(neg.iter().map(|&v| -w[v] * space.dist(pos[0], v)).sum());
    }
    if neg.len() == 1 {
        return Ok(pos.iter().map(|&u| w[u] * space.dist(u, neg[0])).sum());
    }
    let (np, nn) = (pos.len(), neg.len());
    let var = |i: usize, j: usize| i * nn + j;
    let mut lp = LinearProgram::new(np * nn);
    for (i, &u) in pos.iter().enumerate() {
        for (j, &v) in neg.iter().enumerate() {
            lp.set_cost(var(i, j), space.dist(u, v));
        }
    }
    for (i, &u) in pos.iter().enumerate() {
        lp.add_row((0..nn).map(|j| (var(i, j), T::one())).collect(), RowKind::Eq, w[u]);
    }
    // the last demand row is implied by the others (and absorbs rounding in the balance)
    for (j, &v) in neg.iter().enumerate().take(nn - 1) {
        lp.add_row((0..np).map(|i| (var(i, j), T::one())).collect(), RowKind::Eq, -w[v]);
    }
    let sol = lp.solve(opts).map_err(|e| match e {
        Error::LpInfeasible => Error::SolverFailure("transport problem reported infeasible".into()),
        other => other,
    })?;
    Ok(sol.objective)
}

/// Free norm with an optimal flow on the complete graph and an optimal potential `f`
/// with `f(basepoint) = 0`.
pub fn free_norm_witness<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    a: &SignedWeightVector<T>,
    basepoint: usize,
) -> Result<FreeNormWitness<T>> {
    let n = space.len();
    let w = a.weights();
    if w.len() != n {
        return Err(Error::LengthMismatch { expected: n, got: w.len() });
    }
    space.check_index(basepoint)?;
    if n == 1 {
        return Ok(FreeNormWitness {
            value: T::zero(),
            potential: ScalarField::constant(1, T::zero()),
            flow: FlowAssignment::zero(1),
            dual_value: T::zero(),
            iterations: 0,
        });
    }
    let arcs: Vec<(usize, usize)> = pairs(n).flat_map(|(u, v)| [(u, v), (v, u)]).collect();
    let mut lp = LinearProgram::new(arcs.len());
    let mut incident = vec![Vec::new(); n];
    for (k, &(u, v)) in arcs.iter().enumerate() {
        lp.set_cost(k, space.dist(u, v));
        incident[u].push((k, T::one()));
        incident[v].push((k, -T::one()));
    }
    // conservation at every point but the basepoint; its multiplier is pinned to zero
    let mut row_of = vec![None; n];
    for s in (0..n).filter(|&s| s != basepoint) {
        row_of[s] = Some(lp.add_row(std::mem::take(&mut incident[s]), RowKind::Eq, w[s]));
    }
    let sol = lp.solve(&SolverOptions::default()).map_err(|e| match e {
        Error::LpInfeasible => Error::SolverFailure("transshipment problem reported infeasible".into()),
        other => other,
    })?;
    let mut flow = FlowAssignment::zero(n);
    for (k, &(u, v)) in arcs.iter().enumerate() {
        flow.flow[u * n + v] = sol.x[k];
    }
    let potential: Vec<T> = (0..n).map(|s| row_of[s].map_or(T::zero(), |r| sol.duals[r])).collect();
    let dual_value = a.pair(&potential);
    debug_assert!(seminorm_of_values(&potential, space) <= T::one() + T::lit(1e3) * T::default_tolerance());
    Ok(FreeNormWitness {
        value: sol.objective,
        potential: ScalarField::new(potential),
        flow,
        dual_value,
        iterations: sol.iterations,
    })
}
