//! Dense two-phase primal simplex with dual extraction.
//!
//! Problems are `min c^T x` subject to rows `a_i^T x (<=|=|>=) b_i` and `x >= 0`.
//! Free variables must be split by the caller. The tableau is dense but pivots
//! only touch the nonzeros of the pivot row and column.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Eq,
    Ge,
}

#[derive(Debug, Clone)]
struct Row<T> {
    coeffs: Vec<(usize, T)>,
    kind: RowKind,
    rhs: T,
}

#[derive(Debug, Clone)]
pub struct SolverOptions<T> {
    /// Optimality and feasibility tolerance.
    pub tol: T,
    /// Smallest admissible pivot magnitude.
    pub pivot_tol: T,
    pub max_iterations: usize,
    /// Consecutive degenerate pivots before switching to Bland's rule.
    pub degenerate_switch: usize,
    pub var_cap: usize,
    pub entry_cap: usize,
}

impl<T: Scalar> Default for SolverOptions<T> {
    fn default() -> Self {
        SolverOptions {
            tol: T::default_tolerance(),
            pivot_tol: T::default_tolerance(),
            max_iterations: 1_000_000,
            degenerate_switch: 50,
            var_cap: 200_000,
            entry_cap: 60_000_000,
        }
    }
}

#[derive(Debug, Clone)]
pub struct LpSolution<T> {
    pub x: Vec<T>,
    pub objective: T,
    /// One multiplier per row, so that `c - A^T y >= 0` at optimality.
    pub duals: Vec<T>,
    pub iterations: usize,
    /// Largest constraint violation of `x`.
    pub primal_residual: T,
}

#[derive(Debug, Clone, Default)]
pub struct LinearProgram<T> {
    num_vars: usize,
    objective: Vec<T>,
    rows: Vec<Row<T>>,
}

impl<T: Scalar> LinearProgram<T> {
    pub fn new(num_vars: usize) -> Self {
        LinearProgram { num_vars, objective: vec![T::zero(); num_vars], rows: Vec::new() }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn set_cost(&mut self, var: usize, cost: T) {
        self.objective[var] = cost;
    }

    /// Adds a row and returns its index. Zero coefficients are dropped.
    pub fn add_row(&mut self, coeffs: Vec<(usize, T)>, kind: RowKind, rhs: T) -> usize {
        debug_assert!(coeffs.iter().all(|&(j, _)| j < self.num_vars));
        let coeffs = coeffs.into_iter().filter(|&(_, a)| a != T::zero()).collect();
        self.rows.push(Row { coeffs, kind, rhs });
        self.rows.len() - 1
    }

    /// Largest violation of the rows and bounds by `x`.
    pub fn residual(&self, x: &[T]) -> T {
        let mut worst = x.iter().fold(T::zero(), |w, &v| w.max(-v));
        for row in &self.rows {
            let lhs: T = row.coeffs.iter().map(|&(j, a)| a * x[j]).sum();
            let viol = match row.kind {
                RowKind::Le => lhs - row.rhs,
                RowKind::Ge => row.rhs - lhs,
                RowKind::Eq => (lhs - row.rhs).abs(),
            };
            worst = worst.max(viol);
        }
        worst
    }

    pub fn solve(&self, opts: &SolverOptions<T>) -> Result<LpSolution<T>> {
        let mut tab = Tableau::build(self, opts)?;
        tab.run(opts)?;
        let x = tab.primal(self.num_vars);
        let duals = tab.duals();
        let objective = self.objective.iter().zip(&x).map(|(&c, &v)| c * v).sum();
        let primal_residual = self.residual(&x);
        Ok(LpSolution { x, objective, duals, iterations: tab.iterations, primal_residual })
    }
}

struct Tableau<T> {
    m: usize,
    /// structural + slack + artificial columns
    ncols: usize,
    width: usize,
    /// `m` rows of `width` entries; the last entry of each row is the right-hand side
    a: Vec<T>,
    basis: Vec<usize>,
    /// reduced costs for the phase-one and phase-two objectives
    z1: Vec<T>,
    z2: Vec<T>,
    cost2: Vec<T>,
    first_artificial: usize,
    identity_col: Vec<usize>,
    row_sign: Vec<T>,
    iterations: usize,
    scratch: Vec<usize>,
}

impl<T: Scalar> Tableau<T> {
    fn build(lp: &LinearProgram<T>, opts: &SolverOptions<T>) -> Result<Self> {
        let m = lp.rows.len();
        let n = lp.num_vars;
        let mut kinds = Vec::with_capacity(m);
        let mut row_sign = Vec::with_capacity(m);
        for row in &lp.rows {
            let neg = row.rhs < T::zero();
            row_sign.push(if neg { -T::one() } else { T::one() });
            kinds.push(match (row.kind, neg) {
                (RowKind::Le, true) => RowKind::Ge,
                (RowKind::Ge, true) => RowKind::Le,
                (k, _) => k,
            });
        }
        let n_slack = kinds.iter().filter(|&&k| k != RowKind::Eq).count();
        let n_art = kinds.iter().filter(|&&k| k != RowKind::Le).count();
        let ncols = n + n_slack + n_art;
        let width = ncols + 1;
        if n > opts.var_cap || m.saturating_mul(width) > opts.entry_cap {
            return Err(Error::LpTooLarge { vars: n, rows: m, var_cap: opts.var_cap, entry_cap: opts.entry_cap });
        }
        let mut a = vec![T::zero(); m * width];
        let mut basis = vec![0; m];
        let mut identity_col = vec![0; m];
        let first_artificial = n + n_slack;
        let (mut next_slack, mut next_art) = (n, first_artificial);
        for (i, row) in lp.rows.iter().enumerate() {
            let s = row_sign[i];
            let base = i * width;
            for &(j, v) in &row.coeffs {
                a[base + j] += s * v;
            }
            a[base + ncols] = s * row.rhs;
            match kinds[i] {
                RowKind::Le => {
                    a[base + next_slack] = T::one();
                    basis[i] = next_slack;
                    identity_col[i] = next_slack;
                    next_slack += 1;
                }
                RowKind::Ge => {
                    a[base + next_slack] = -T::one();
                    next_slack += 1;
                    a[base + next_art] = T::one();
                    basis[i] = next_art;
                    identity_col[i] = next_art;
                    next_art += 1;
                }
                RowKind::Eq => {
                    a[base + next_art] = T::one();
                    basis[i] = next_art;
                    identity_col[i] = next_art;
                    next_art += 1;
                }
            }
        }
        let mut cost2 = vec![T::zero(); ncols];
        cost2[..n].copy_from_slice(&lp.objective);
        let z2 = cost2.clone();
        // phase one minimizes the sum of artificials; price out the artificial basis
        let mut z1 = vec![T::zero(); width];
        for v in z1.iter_mut().take(ncols).skip(first_artificial) {
            *v = T::one();
        }
        for i in 0..m {
            if basis[i] >= first_artificial {
                let base = i * width;
                for j in 0..width {
                    z1[j] -= a[base + j];
                }
            }
        }
        let mut z2w = z2;
        z2w.push(T::zero());
        Ok(Tableau {
            m,
            ncols,
            width,
            a,
            basis,
            z1,
            z2: z2w,
            cost2,
            first_artificial,
            identity_col,
            row_sign,
            iterations: 0,
            scratch: Vec::new(),
        })
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> T {
        self.a[i * self.width + j]
    }

    fn rhs(&self, i: usize) -> T {
        self.at(i, self.ncols)
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let w = self.width;
        let p = self.at(r, c);
        let row_start = r * w;
        self.scratch.clear();
        for j in 0..w {
            let v = self.a[row_start + j];
            if v != T::zero() {
                self.a[row_start + j] = v / p;
                self.scratch.push(j);
            }
        }
        self.a[row_start + c] = T::one();
        let nz = std::mem::take(&mut self.scratch);
        for i in 0..self.m {
            if i == r {
                continue;
            }
            let f = self.a[i * w + c];
            if f == T::zero() {
                continue;
            }
            let (lo, hi) = if i < r { (i, r) } else { (r, i) };
            let (head, tail) = self.a.split_at_mut(hi * w);
            let (target, source) = if i < r {
                (&mut head[lo * w..lo * w + w], &tail[..w])
            } else {
                (&mut tail[..w], &head[lo * w..lo * w + w])
            };
            for &j in &nz {
                target[j] -= f * source[j];
            }
            target[c] = T::zero();
        }
        for z in [&mut self.z1, &mut self.z2] {
            let f = z[c];
            if f != T::zero() {
                for &j in &nz {
                    z[j] -= f * self.a[row_start + j];
                }
                z[c] = T::zero();
            }
        }
        self.scratch = nz;
        self.basis[r] = c;
        self.iterations += 1;
    }

    fn choose_entering(&self, phase_one: bool, bland: bool, tol: T) -> Option<usize> {
        let z = if phase_one { &self.z1 } else { &self.z2 };
        let limit = if phase_one { self.ncols } else { self.first_artificial };
        if bland {
            (0..limit).find(|&j| z[j] < -tol)
        } else {
            let mut best = None;
            let mut best_val = -tol;
            for (j, &v) in z.iter().enumerate().take(limit) {
                if v < best_val {
                    best_val = v;
                    best = Some(j);
                }
            }
            best
        }
    }

    fn choose_leaving(&self, c: usize, bland: bool, opts: &SolverOptions<T>) -> Option<usize> {
        let mut best: Option<(usize, T)> = None;
        for i in 0..self.m {
            let a = self.at(i, c);
            if a <= opts.pivot_tol {
                continue;
            }
            let ratio = self.rhs(i).max(T::zero()) / a;
            best = match best {
                None => Some((i, ratio)),
                Some((bi, br)) => {
                    if ratio < br - opts.tol {
                        Some((i, ratio))
                    } else if ratio <= br + opts.tol {
                        let better = if bland { self.basis[i] < self.basis[bi] } else { a > self.at(bi, c) };
                        if better {
                            Some((i, ratio))
                        } else {
                            Some((bi, br))
                        }
                    } else {
                        Some((bi, br))
                    }
                }
            };
        }
        best.map(|(i, _)| i)
    }

    fn iterate(&mut self, phase_one: bool, opts: &SolverOptions<T>) -> Result<()> {
        let mut degenerate_run = 0;
        loop {
            if self.iterations >= opts.max_iterations {
                return Err(Error::SolverFailure(format!("iteration limit {} reached", opts.max_iterations)));
            }
            let bland = degenerate_run >= opts.degenerate_switch;
            let Some(c) = self.choose_entering(phase_one, bland, opts.tol) else {
                return Ok(());
            };
            let Some(r) = self.choose_leaving(c, bland, opts) else {
                if phase_one {
                    return Err(Error::SolverFailure("phase one reported an unbounded ray".into()));
                }
                return Err(Error::LpUnbounded);
            };
            if self.rhs(r) <= opts.tol {
                degenerate_run += 1;
            } else {
                degenerate_run = 0;
            }
            self.pivot(r, c);
        }
    }

    fn run(&mut self, opts: &SolverOptions<T>) -> Result<()> {
        if self.first_artificial < self.ncols {
            self.iterate(true, opts)?;
            let infeasibility: T =
                (0..self.m).filter(|&i| self.basis[i] >= self.first_artificial).map(|i| self.rhs(i).abs()).sum();
            let scale = (0..self.m).fold(T::one(), |s, i| s.max(self.rhs(i).abs()));
            if infeasibility > opts.tol * scale * T::lit(10.0) {
                return Err(Error::LpInfeasible);
            }
            // drive zero-level artificials out of the basis where a structural pivot exists
            for r in 0..self.m {
                if self.basis[r] < self.first_artificial {
                    continue;
                }
                let mut best: Option<(usize, T)> = None;
                for j in 0..self.first_artificial {
                    let v = self.at(r, j).abs();
                    if v > opts.pivot_tol && best.is_none_or(|(_, b)| v > b) {
                        best = Some((j, v));
                    }
                }
                if let Some((j, _)) = best {
                    self.pivot(r, j);
                }
            }
        }
        self.iterate(false, opts)
    }

    fn primal(&self, n: usize) -> Vec<T> {
        let mut x = vec![T::zero(); n];
        for i in 0..self.m {
            let b = self.basis[i];
            if b < n {
                x[b] = self.rhs(i).max(T::zero());
            }
        }
        x
    }

    fn duals(&self) -> Vec<T> {
        (0..self.m)
            .map(|k| {
                let col = self.identity_col[k];
                let y: T = (0..self.m).map(|i| self.cost2[self.basis[i]] * self.at(i, col)).sum();
                y * self.row_sign[k]
            })
            .collect()
    }
}
