//! Shared generators and brute-force oracles for the integration tests.

#![allow(dead_code)]

use lipext::{FiniteMetricSpace, RootedTree};
use rand::seq::SliceRandom;
use rand::Rng;

/// Random points of `R^d` under an `l_p` norm, `d ∈ {1, 2, 3}` and `p ∈ {1, 2, ∞}`.
pub fn random_normed<R: Rng>(rng: &mut R, n: usize) -> FiniteMetricSpace<f64> {
    let d = rng.gen_range(1..=3);
    let p = [1.0, 2.0, f64::INFINITY][rng.gen_range(0..3)];
    let pts: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.gen_range(-5.0..5.0)).collect()).collect();
    FiniteMetricSpace::euclidean_lp(&pts, p).expect("distinct random points")
}

/// Shortest-path metric of a random connected graph with small integer weights.
/// Ties between distances are common, which exercises degenerate LPs.
pub fn random_graph<R: Rng>(rng: &mut R, n: usize) -> FiniteMetricSpace<f64> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    for i in 1..n {
        let (a, b) = (order[i], order[rng.gen_range(0..i)]);
        let w = rng.gen_range(1..=4) as f64;
        d[a][b] = w;
        d[b][a] = w;
    }
    for _ in 0..n {
        let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
        if a != b {
            let w = rng.gen_range(1..=4) as f64;
            d[a][b] = d[a][b].min(w);
            d[b][a] = d[a][b];
        }
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                if d[i][k] + d[k][j] < d[i][j] {
                    d[i][j] = d[i][k] + d[k][j];
                }
            }
        }
    }
    FiniteMetricSpace::new(None, &d).expect("shortest paths form a metric")
}

/// Metric of a random weighted tree.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> FiniteMetricSpace<f64> {
    let parents: Vec<Option<usize>> = (0..n).map(|v| if v == 0 { None } else { Some(rng.gen_range(0..v)) }).collect();
    let lens: Vec<f64> = (0..n).map(|v| if v == 0 { 0.0 } else { rng.gen_range(0.2..3.0) }).collect();
    RootedTree::new(parents, lens, None).unwrap().to_metric_space(usize::MAX).unwrap()
}

/// One of the three families above, chosen at random.
pub fn random_space<R: Rng>(rng: &mut R, n: usize) -> FiniteMetricSpace<f64> {
    match rng.gen_range(0..3) {
        0 => random_normed(rng, n),
        1 => random_graph(rng, n),
        _ => random_tree(rng, n),
    }
}

/// A sorted random subset of `0..n` of size `k`.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize, k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..n).collect();
    idx.shuffle(rng);
    let mut s = idx[..k].to_vec();
    s.sort_unstable();
    s
}

/// Random weights summing to zero exactly up to one rounding.
pub fn random_zero_sum<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let mean = w.iter().sum::<f64>() / n as f64;
    for x in &mut w {
        *x -= mean;
    }
    let rest: f64 = w[1..].iter().sum();
    w[0] = -rest;
    w
}

/// `max_{i<j} |f_i - f_j| / d(i, j)` by direct enumeration.
pub fn brute_seminorm(space: &FiniteMetricSpace<f64>, f: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for i in 0..f.len() {
        for j in (i + 1)..f.len() {
            best = best.max((f[i] - f[j]).abs() / space.dist(i, j));
        }
    }
    best
}

/// `max <a, f>` over the vertices of the polytope `{f : f_0 = 0, |f_i - f_j| <= d(i, j)}`.
///
/// Every vertex is the unique solution of `n - 1` tight constraints `f_i - f_j = ±d(i, j)`,
/// so all such square systems are solved by Gaussian elimination and the feasible
/// solutions kept. Exponential; meant for `n <= 6`.
pub fn lip_ball_vertex_max(space: &FiniteMetricSpace<f64>, a: &[f64]) -> f64 {
    let n = space.len();
    assert_eq!(a.len(), n);
    if n == 1 {
        return 0.0;
    }
    let dim = n - 1;
    let constraints: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    let mut best = f64::NEG_INFINITY;
    let mut chosen = Vec::with_capacity(dim);
    choose(constraints.len(), dim, 0, &mut chosen, &mut |set| {
        for signs in 0u32..(1 << dim) {
            let mut m = vec![vec![0.0; dim + 1]; dim];
            for (r, &c) in set.iter().enumerate() {
                let (i, j) = constraints[c];
                let s = if signs >> r & 1 == 1 { 1.0 } else { -1.0 };
                if i > 0 {
                    m[r][i - 1] += 1.0;
                }
                m[r][j - 1] -= 1.0;
                m[r][dim] = s * space.dist(i, j);
            }
            let Some(x) = solve(m) else { return };
            let f: Vec<f64> = std::iter::once(0.0).chain(x).collect();
            let feasible =
                (0..n).all(|i| ((i + 1)..n).all(|j| (f[i] - f[j]).abs() <= space.dist(i, j) * (1.0 + 1e-9) + 1e-12));
            if feasible {
                best = best.max(a.iter().zip(&f).map(|(x, y)| x * y).sum());
            }
        }
    });
    best
}

fn choose(n: usize, k: usize, start: usize, cur: &mut Vec<usize>, visit: &mut impl FnMut(&[usize])) {
    if cur.len() == k {
        visit(cur);
        return;
    }
    for i in start..n {
        if n - i < k - cur.len() {
            break;
        }
        cur.push(i);
        choose(n, k, i + 1, cur, visit);
        cur.pop();
    }
}

/// Gaussian elimination with partial pivoting on an augmented matrix; `None` if singular.
fn solve(mut m: Vec<Vec<f64>>) -> Option<Vec<f64>> {
    let n = m.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&a, &b| m[a][col].abs().total_cmp(&m[b][col].abs()))?;
        if m[piv][col].abs() < 1e-9 {
            return None;
        }
        m.swap(col, piv);
        for r in 0..n {
            if r != col {
                let factor = m[r][col] / m[col][col];
                if factor != 0.0 {
                    let pivot_row = m[col].clone();
                    for (x, p) in m[r][col..].iter_mut().zip(&pivot_row[col..]) {
                        *x -= factor * p;
                    }
                }
            }
        }
    }
    Some((0..n).map(|i| m[i][n] / m[i][i]).collect())
}

/// `arccosh(1 + |x - y|^2 / (2 x2 y2))`, the upper-half-plane distance.
pub fn half_plane_distance(x: (f64, f64), y: (f64, f64)) -> f64 {
    let e2 = (x.0 - y.0).powi(2) + (x.1 - y.1).powi(2);
    (1.0 + e2 / (2.0 * x.1 * y.1)).acosh()
}

/// `max_i log(1 + |x_i - y_i| / min(x2, y2))`.
pub fn half_plane_gauge(x: (f64, f64), y: (f64, f64)) -> f64 {
    let m = x.1.min(y.1);
    ((x.0 - y.0).abs() / m).ln_1p().max(((x.1 - y.1).abs() / m).ln_1p())
}

/// Unit-edge tree distance by walking both vertices up to their common ancestor.
pub fn tree_hops(parents: &[Option<usize>], mut v: usize, mut w: usize) -> usize {
    let level = |mut u: usize| {
        let mut l = 0;
        while let Some(p) = parents[u] {
            u = p;
            l += 1;
        }
        l
    };
    let (mut lv, mut lw) = (level(v), level(w));
    let mut hops = 0;
    while lv > lw {
        v = parents[v].unwrap();
        lv -= 1;
        hops += 1;
    }
    while lw > lv {
        w = parents[w].unwrap();
        lw -= 1;
        hops += 1;
    }
    while v != w {
        v = parents[v].unwrap();
        w = parents[w].unwrap();
        hops += 2;
    }
    hops
}
