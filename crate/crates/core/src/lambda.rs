//! The extension constant `λ(S, F) = inf { |E| : E extends from S to F }` as a single
//! linear program, and `λ(F)` as a maximum over subsets.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extension::WeightMatrix;
use crate::free_norm::free_norm_of_weights;
use crate::lp::{LinearProgram, RowKind, SolverOptions};
use crate::metric::{check_index_set, pairs, FiniteMetricSpace};
use crate::scalar::Scalar;

/// Default cap on the number of subsets [`lambda_of_space`] will enumerate.
pub const DEFAULT_SUBSET_CAP: u128 = 100_000;

#[derive(Debug, Clone, PartialEq)]
pub struct SolverStats {
    pub iterations: usize,
    pub primal_residual: f64,
    pub num_vars: usize,
    pub num_rows: usize,
}

/// An optimal extension constant with one operator attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaResult<T> {
    pub value: T,
    pub operator: WeightMatrix<T>,
    /// Pairs of target points on which the returned operator attains `value`.
    pub active_pairs: Vec<(usize, usize)>,
    /// Norm of the returned operator, re-evaluated independently of the LP. For a
    /// one-point source this is 0 while `value` is the conventional 1.
    pub certificate_norm: T,
    pub stats: SolverStats,
}

impl<T: Scalar> LambdaResult<T> {
    pub fn source(&self) -> &[usize] {
        self.operator.source()
    }
}

/// `λ(S, F)` over all linear extension operators (weights of any sign).
pub fn optimal_lambda<T: Scalar>(space: &FiniteMetricSpace<T>, source: &[usize]) -> Result<LambdaResult<T>> {
    solve_lambda(space, source, false, &SolverOptions::default())
}

/// The same minimization restricted to nonnegative weights; never below [`optimal_lambda`].
pub fn optimal_lambda_nonneg<T: Scalar>(space: &FiniteMetricSpace<T>, source: &[usize]) -> Result<LambdaResult<T>> {
    solve_lambda(space, source, true, &SolverOptions::default())
}

/// Variant of [`optimal_lambda`] with explicit solver options (caps and tolerances).
pub fn optimal_lambda_with<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    source: &[usize],
    nonneg: bool,
    opts: &SolverOptions<T>,
) -> Result<LambdaResult<T>> {
    solve_lambda(space, source, nonneg, opts)
}

fn solve_lambda<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    source: &[usize],
    nonneg: bool,
    opts: &SolverOptions<T>,
) -> Result<LambdaResult<T>> {
    check_index_set(space.len(), source)?;
    if source.is_empty() {
        return Err(Error::EmptySource);
    }
    let n = space.len();
    if source.len() == 1 {
        // every function on one point is constant; the constant extension is the
        // conventional optimum and λ is set to 1
        let operator = WeightMatrix::new(n, source.to_vec(), vec![vec![T::one()]; n])?;
        return Ok(LambdaResult {
            value: T::one(),
            operator,
            active_pairs: Vec::new(),
            certificate_norm: T::zero(),
            stats: SolverStats { iterations: 0, primal_residual: 0.0, num_vars: 0, num_rows: 0 },
        });
    }
    let k = source.len();
    let mut pos_in_source = vec![None; n];
    for (p, &s) in source.iter().enumerate() {
        pos_in_source[s] = Some(p);
    }
    if k == n {
        let mut rows = vec![vec![T::zero(); k]; n];
        for (p, &s) in source.iter().enumerate() {
            rows[s][p] = T::one();
        }
        let operator = WeightMatrix::new(n, source.to_vec(), rows)?;
        return Ok(LambdaResult {
            value: T::one(),
            operator,
            active_pairs: pairs(n).collect(),
            certificate_norm: T::one(),
            stats: SolverStats { iterations: 0, primal_residual: 0.0, num_vars: 0, num_rows: 0 },
        });
    }

    let free: Vec<usize> = (0..n).filter(|&m| pos_in_source[m].is_none()).collect();
    let mut free_row = vec![usize::MAX; n];
    for (r, &m) in free.iter().enumerate() {
        free_row[m] = r;
    }
    let signs = if nonneg { 1 } else { 2 };
    // variable layout: weights (w+ then w- per free row), t, then flow blocks
    let w_var = |r: usize, s: usize, neg: bool| (r * k + s) * signs + usize::from(neg);
    let t_var = free.len() * k * signs;
    // Both reductions drop a pair with a point metrically between its ends. Such a pair
    // constraint is implied by the two shorter ones, and flow on such an arc can be
    // rerouted through the middle point at equal cost.
    let arcs: Vec<(usize, usize)> = pairs(k)
        .filter(|&(a, b)| !has_between_point(space, source.iter().copied(), source[a], source[b]))
        .flat_map(|(a, b)| [(a, b), (b, a)])
        .collect();
    let constrained: Vec<(usize, usize)> = pairs(n)
        .filter(|&(a, b)| pos_in_source[a].is_none() || pos_in_source[b].is_none())
        .filter(|&(a, b)| !has_between_point(space, 0..n, a, b))
        .collect();
    let flow_base = t_var + 1;
    let num_vars = flow_base + constrained.len() * arcs.len();
    let entries = num_vars.saturating_mul(free.len() + constrained.len() * k + 1);
    if num_vars > opts.var_cap || entries > opts.entry_cap {
        return Err(Error::LpTooLarge {
            vars: num_vars,
            rows: free.len() + constrained.len() * k + 1,
            var_cap: opts.var_cap,
            entry_cap: opts.entry_cap,
        });
    }

    let mut lp = LinearProgram::new(num_vars);
    lp.set_cost(t_var, T::one());
    for r in 0..free.len() {
        let mut coeffs = Vec::with_capacity(k * signs);
        for s in 0..k {
            coeffs.push((w_var(r, s, false), T::one()));
            if !nonneg {
                coeffs.push((w_var(r, s, true), -T::one()));
            }
        }
        lp.add_row(coeffs, RowKind::Eq, T::one());
    }
    for (block, &(a, b)) in constrained.iter().enumerate() {
        let base = flow_base + block * arcs.len();
        // divergence of the flow equals row_a - row_b; the last node's row is implied
        for s in 0..k - 1 {
            let mut coeffs = Vec::new();
            for (j, &(u, v)) in arcs.iter().enumerate() {
                if u == s {
                    coeffs.push((base + j, T::one()));
                } else if v == s {
                    coeffs.push((base + j, -T::one()));
                }
            }
            let mut rhs = T::zero();
            for (m, sign) in [(a, -T::one()), (b, T::one())] {
                match pos_in_source[m] {
                    Some(p) => {
                        if p == s {
                            rhs -= sign;
                        }
                    }
                    None => {
                        coeffs.push((w_var(free_row[m], s, false), sign));
                        if !nonneg {
                            coeffs.push((w_var(free_row[m], s, true), -sign));
                        }
                    }
                }
            }
            lp.add_row(coeffs, RowKind::Eq, rhs);
        }
        let mut cost: Vec<(usize, T)> =
            arcs.iter().enumerate().map(|(j, &(u, v))| (base + j, space.dist(source[u], source[v]))).collect();
        cost.push((t_var, -space.dist(a, b)));
        lp.add_row(cost, RowKind::Le, T::zero());
    }
    lp.add_row(vec![(t_var, T::one())], RowKind::Ge, T::one());

    let sol = lp.solve(opts)?;
    let mut rows = vec![vec![T::zero(); k]; n];
    for (p, &s) in source.iter().enumerate() {
        rows[s][p] = T::one();
    }
    for (r, &m) in free.iter().enumerate() {
        let row = &mut rows[m];
        for (s, w) in row.iter_mut().enumerate() {
            *w = sol.x[w_var(r, s, false)];
            if !nonneg {
                *w -= sol.x[w_var(r, s, true)];
            }
        }
        rebalance_row(row);
    }
    let operator = WeightMatrix::new(n, source.to_vec(), rows)?;
    let value = sol.objective;
    let (certificate_norm, active_pairs) = certify(space, &operator, value)?;
    Ok(LambdaResult {
        value,
        operator,
        active_pairs,
        certificate_norm,
        stats: SolverStats {
            iterations: sol.iterations,
            primal_residual: sol.primal_residual.as_f64(),
            num_vars,
            num_rows: lp.num_rows(),
        },
    })
}

/// True when some `w` in `candidates` other than `a` and `b` has `d(a, w) + d(w, b) = d(a, b)`,
/// up to a few ulps.
fn has_between_point<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    mut candidates: impl Iterator<Item = usize>,
    a: usize,
    b: usize,
) -> bool {
    let d = space.dist(a, b);
    let limit = d * (T::one() + T::lit(4.0) * T::epsilon());
    candidates.any(|w| w != a && w != b && space.dist(a, w) + space.dist(w, b) <= limit)
}

/// Moves the rounding left in a row sum onto its largest entry so that it sums to one.
fn rebalance_row<T: Scalar>(row: &mut [T]) {
    let sum: T = row.iter().copied().sum();
    let (idx, _) =
        row.iter().enumerate().fold((0, T::neg_infinity()), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
    row[idx] -= sum - T::one();
}

fn certify<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    op: &WeightMatrix<T>,
    value: T,
) -> Result<(T, Vec<(usize, usize)>)> {
    let sub = space.restrict(op.source())?;
    let opts = SolverOptions::default();
    let all: Vec<(usize, usize)> = pairs(space.len()).collect();
    let ratios: Vec<T> = all
        .par_iter()
        .map(|&(a, b)| {
            let diff: Vec<T> = op.row(a).iter().zip(op.row(b)).map(|(&x, &y)| x - y).collect();
            Ok(free_norm_of_weights(&sub, &diff, &opts)? / space.dist(a, b))
        })
        .collect::<Result<_>>()?;
    let norm = ratios.iter().copied().fold(T::zero(), T::max);
    let cutoff = norm.max(value) - T::lit(1e-7) * T::one().max(value);
    let active = all.into_iter().zip(ratios).filter_map(|(p, r)| (r >= cutoff).then_some(p)).collect();
    Ok((norm, active))
}

/// `λ(F)`: the largest `λ(S, F)` over subsets with `2 <= |S| < |F|`, and the first
/// subset (by size, then lexicographically) attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceLambda<T> {
    pub value: T,
    pub worst_subset: Vec<usize>,
    pub subsets_evaluated: usize,
}

/// Enumerates subsets of size at most `max_subset` (all proper subsets when `None`).
///
/// A space with no proper subset of size two or more has `λ = 1`, reported with the
/// whole space as the attaining set.
pub fn lambda_of_space<T: Scalar>(
    space: &FiniteMetricSpace<T>,
    max_subset: Option<usize>,
    cap: u128,
) -> Result<SpaceLambda<T>> {
    let n = space.len();
    let top = max_subset.unwrap_or(n).min(n.saturating_sub(1));
    let count: u128 = (2..=top).map(|k| binomial(n, k)).sum();
    if count > cap {
        return Err(Error::EnumerationTooLarge { count, cap });
    }
    let subsets: Vec<Vec<usize>> = (2..=top).flat_map(|k| combinations(n, k)).collect();
    if subsets.is_empty() {
        return Ok(SpaceLambda { value: T::one(), worst_subset: (0..n).collect(), subsets_evaluated: 0 });
    }
    let values: Vec<T> = subsets
        .par_iter()
        .map(|s| solve_lambda(space, s, false, &SolverOptions::default()).map(|r| r.value))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    Ok(SpaceLambda { value: values[best], worst_subset: subsets[best].clone(), subsets_evaluated: subsets.len() })
}

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// All `k`-subsets of `0..n` in lexicographic order.
fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..k).collect();
    if k > n {
        return out;
    }
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}
