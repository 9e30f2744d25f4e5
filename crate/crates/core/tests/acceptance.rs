//! Acceptance criteria, one line of output per criterion.
//!
//! Runs without the libtest harness so the summary lines always reach the terminal;
//! the process exits nonzero if any criterion fails.

mod common;

use std::time::{Duration, Instant};

use lipext::{
    averaging_operator, build_r_lattice, default_local_operators, distortion_report, free_norm, free_norm_witness,
    grid_l1, hyperbolic_rho, hyperbolic_rho0, interval_grid, mcshane_extend, operator_norm, optimal_lambda,
    optimal_lambda_nonneg, truncated_tk, whitney_extend, whitney_extend_glued, whitney_partition, DistortionMetric,
    DistortionMode, FiniteMetricSpace, HyperbolicPoint, LambdaResult, MeasureFamily, SignedWeightVector, TreeEmbedding,
    DEFAULT_PRODUCT_CAP,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::*;

type Criterion = (&'static str, Duration, fn() -> Outcome);

struct Outcome {
    pass: bool,
    detail: String,
}

impl Outcome {
    fn new(pass: bool, detail: impl Into<String>) -> Self {
        Outcome { pass, detail: detail.into() }
    }
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn free_norm_isometry() -> Outcome {
    let mut r = rng(1);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for _ in 0..50 {
        let n = r.gen_range(2..=8);
        let s = random_space(&mut r, n);
        for x in 0..n {
            for y in (x + 1)..n {
                let a = SignedWeightVector::dirac_difference(n, x, y);
                let v = free_norm(&s, &a).unwrap();
                let w = free_norm_witness(&s, &a, 0).unwrap().value;
                worst = worst.max((v - s.dist(x, y)).abs()).max((w - s.dist(x, y)).abs());
                checked += 1;
            }
        }
    }
    Outcome::new(worst <= 1e-9, format!("{checked} pairs on 50 spaces, max |N(δx-δy) - d| = {worst:.2e}"))
}

fn duality_oracle() -> Outcome {
    let mut r = rng(2);
    let mut worst = 0.0f64;
    let mut checked = 0;
    for _ in 0..100 {
        let n = r.gen_range(3..=9);
        let f = random_space(&mut r, n);
        let k = r.gen_range(2..=n.min(7));
        let sub = random_subset(&mut r, n, k);
        if k > 5 {
            continue;
        }
        let s = f.restrict(&sub).unwrap();
        for _ in 0..3 {
            let a = random_zero_sum(&mut r, k);
            let oracle = lip_ball_vertex_max(&s, &a);
            let sw = SignedWeightVector::new(a).unwrap();
            let lp = free_norm(&s, &sw).unwrap();
            let dual = free_norm_witness(&s, &sw, 0).unwrap().value;
            worst = worst.max((lp - oracle).abs()).max((dual - oracle).abs());
            checked += 1;
        }
    }
    Outcome::new(worst <= 1e-8, format!("{checked} weight vectors with |S| <= 5, max |LP - vertex max| = {worst:.2e}"))
}

fn mcshane_preservation() -> Outcome {
    let mut r = rng(3);
    let mut worst = 0.0f64;
    let mut restrict_ok = true;
    for _ in 0..200 {
        let n = r.gen_range(2..=10);
        let space = random_space(&mut r, n);
        let k = r.gen_range(1..=n);
        let sub = random_subset(&mut r, n, k);
        let f: Vec<f64> = (0..k).map(|_| r.gen_range(-10.0..10.0)).collect();
        let e = mcshane_extend(&space, &sub, &f).unwrap();
        restrict_ok &= sub.iter().zip(&f).all(|(&s, &v)| e.get(s) == v);
        let input = brute_seminorm(&space.restrict(&sub).unwrap(), &f);
        let output = brute_seminorm(&space, e.values());
        worst = worst.max((input - output).abs());
    }
    Outcome::new(
        worst <= 1e-12 && restrict_ok,
        format!("200 instances, max |Lip(Ef) - Lip(f)| = {worst:.2e}, restriction exact: {restrict_ok}"),
    )
}

fn lambda_floor_and_ceiling() -> Outcome {
    let mut r = rng(4);
    let mut line_worst = 0.0f64;
    let mut lines = 0;
    for _ in 0..40 {
        let n = r.gen_range(2..=10);
        let mut xs: Vec<f64> = (0..n).map(|_| r.gen_range(-10.0..10.0)).collect();
        xs.sort_by(f64::total_cmp);
        let space = FiniteMetricSpace::line(&xs).unwrap();
        for _ in 0..4 {
            let k = r.gen_range(1..=n);
            let sub = random_subset(&mut r, n, k);
            line_worst = line_worst.max((optimal_lambda(&space, &sub).unwrap().value - 1.0).abs());
            lines += 1;
        }
    }
    let grid = grid_l1::<f64>(2, 1, DEFAULT_PRODUCT_CAP).unwrap();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for mask in 1u32..(1 << grid.len()) {
        let sub: Vec<usize> = (0..grid.len()).filter(|&i| mask >> i & 1 == 1).collect();
        let v = optimal_lambda(&grid, &sub).unwrap().value;
        lo = lo.min(v);
        hi = hi.max(v);
    }
    let grid_ok = lo >= 1.0 - 1e-8 && hi <= 48.0;
    Outcome::new(
        line_worst <= 1e-8 && grid_ok,
        format!(
            "{lines} collinear instances, max |λ - 1| = {line_worst:.2e}; Z_1^2(1) over all 511 subsets: λ in [{lo:.10}, {hi:.10}] ⊂ [1, 48]"
        ),
    )
}

fn certificate_consistency() -> Outcome {
    let mut r = rng(5);
    let mut results: Vec<(FiniteMetricSpace<f64>, LambdaResult<f64>)> = Vec::new();
    let grid = grid_l1::<f64>(2, 1, DEFAULT_PRODUCT_CAP).unwrap();
    for mask in 1u32..(1 << grid.len()) {
        let sub: Vec<usize> = (0..grid.len()).filter(|&i| mask >> i & 1 == 1).collect();
        results.push((grid.clone(), optimal_lambda(&grid, &sub).unwrap()));
    }
    for _ in 0..60 {
        let n = r.gen_range(3..=8);
        let space = random_space(&mut r, n);
        let k = r.gen_range(1..n);
        let sub = random_subset(&mut r, n, k);
        results.push((space.clone(), optimal_lambda(&space, &sub).unwrap()));
        results.push((space.clone(), optimal_lambda_nonneg(&space, &sub).unwrap()));
    }
    // A single source point has no LP: every extension is constant, so the measured norm
    // is 0 while λ is pinned to 1 by convention. Those results are checked against that
    // convention instead.
    let mut worst = 0.0f64;
    let (mut lp_count, mut singletons, mut singleton_ok) = (0, 0, true);
    for (space, res) in &results {
        let norm = operator_norm(space, &res.operator).unwrap();
        if res.source().len() == 1 {
            singletons += 1;
            singleton_ok &= res.value == 1.0 && norm == 0.0 && res.certificate_norm == 0.0;
        } else {
            lp_count += 1;
            worst = worst.max((norm - res.value).abs());
        }
    }
    Outcome::new(
        worst <= 1e-7 && singleton_ok,
        format!(
            "{lp_count} LP results, max |‖E‖ - λ| = {worst:.2e}; {singletons} single-point sources follow the λ = 1 convention: {singleton_ok}"
        ),
    )
}

fn whitney_pipeline() -> Outcome {
    // R = 2 is the stated case; on the unit grid it selects every point, so R = 3 and
    // R = 4 are run as well to exercise gluing over a proper center set.
    let runs: Vec<(bool, String)> = [2.0, 3.0, 4.0].into_iter().map(whitney_run).collect();
    Outcome::new(runs.iter().all(|r| r.0), runs.into_iter().map(|r| r.1).collect::<Vec<_>>().join("; "))
}

fn whitney_run(radius: f64) -> (bool, String) {
    let space = grid_l1::<f64>(2, 2, DEFAULT_PRODUCT_CAP).unwrap();
    let lattice = build_r_lattice(&space, radius).unwrap();
    let partition = whitney_partition(&space, &lattice).unwrap();
    let centers = partition.centers().to_vec();
    let mu = (0..space.len()).map(|m| centers.iter().filter(|&&g| space.dist(m, g) < radius).count()).max().unwrap();
    let bound = 2.0 / radius * (2.0 * mu as f64 + 1.0);
    let sum_err = (0..space.len())
        .map(|m| (partition.rho().iter().map(|rho| rho.get(m)).sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    let worst_lip = partition.rho().iter().map(|rho| brute_seminorm(&space, rho.values())).fold(0.0, f64::max);
    let local = default_local_operators(&space, &partition).unwrap();
    let mut r = rng(6);
    let mut restrict_err = 0.0f64;
    let mut glue_err = 0.0f64;
    for _ in 0..20 {
        let f: Vec<f64> = (0..centers.len()).map(|_| r.gen_range(-5.0..5.0)).collect();
        let e = whitney_extend(&space, &partition, &local, &f).unwrap();
        let g = whitney_extend_glued(&space, &partition, &local, &f).unwrap();
        for (&c, &v) in centers.iter().zip(&f) {
            restrict_err = restrict_err.max((e.get(c) - v).abs() / v.abs().max(1.0));
        }
        for m in 0..space.len() {
            glue_err = glue_err.max((e.get(m) - g.get(m)).abs());
        }
    }
    let pass = sum_err <= 1e-12 && worst_lip <= bound * (1.0 + 1e-12) && restrict_err <= 1e-12 && glue_err <= 1e-12;
    (
        pass,
        format!(
            "R={radius}: |Γ| = {}, μ = {mu}, max |Σρ - 1| = {sum_err:.2e}, max Lip(ρ) = {worst_lip:.4} <= {bound:.4}, \
             restriction error {restrict_err:.2e}, glued vs assembled {glue_err:.2e}",
            centers.len()
        ),
    )
}

fn averaging_sanity() -> Outcome {
    let mut norms = Vec::new();
    let mut exact = true;
    for h in [0.1, 0.05, 0.02] {
        let space = interval_grid::<f64>(h).unwrap();
        let n = space.len();
        let source = vec![0, n - 1];
        let op = averaging_operator(&space, &source, &MeasureFamily::counting(n)).unwrap();
        let e = op.apply(&[-3.5, 7.25]).unwrap();
        exact &= e.get(0) == -3.5 && e.get(n - 1) == 7.25;
        norms.push((h, operator_norm(&space, &op).unwrap()));
    }
    let max_norm = norms.iter().map(|p| p.1).fold(0.0, f64::max);
    let growth_flag = norms[2].1 > norms[0].1 * 1.05;
    let listed: Vec<String> = norms.iter().map(|(h, v)| format!("h={h}: {v:.6}")).collect();
    Outcome::new(
        exact && max_norm <= 30.0,
        format!(
            "{}; max {max_norm:.6} <= 30; exact on S: {exact}; h=0.02 exceeds h=0.1 by > 5%: {}",
            listed.join(", "),
            if growth_flag { "FLAGGED" } else { "no" }
        ),
    )
}

fn tree_embedding_bounds() -> Outcome {
    let mut lines = Vec::new();
    let mut pass = true;
    for k in [2usize, 3] {
        for depth in 1..=4 {
            let tree = truncated_tk::<f64>(k, depth, 100_000).unwrap();
            let emb = TreeEmbedding::new(&tree).unwrap();
            let n = k * k + 1;
            let log_n = (n as f64).ln();
            let pts: Vec<(f64, f64)> = emb.points.iter().map(|p| (p.x1(), p.x2())).collect();
            let parents = tree.parents();
            let (mut lo0, mut hi0, mut lo, mut hi) = (f64::INFINITY, 0.0f64, f64::INFINITY, 0.0f64);
            for v in 0..pts.len() {
                for w in (v + 1)..pts.len() {
                    let d = tree_hops(parents, v, w) as f64;
                    let r0 = half_plane_gauge(pts[v], pts[w]) / d;
                    let r = half_plane_distance(pts[v], pts[w]) / d;
                    lo0 = lo0.min(r0);
                    hi0 = hi0.max(r0);
                    lo = lo.min(r);
                    hi = hi.max(r);
                }
            }
            let edge_err = (0..pts.len())
                .filter_map(|v| parents[v].map(|p| (half_plane_gauge(pts[v], pts[p]) - log_n).abs()))
                .fold(0.0, f64::max);
            let envelope = lo0 >= log_n / 8.0 * (1.0 - 1e-12) && hi0 <= log_n * (1.0 + 1e-12);
            let spread = hi / lo;
            let report_clean = [DistortionMetric::Rho0, DistortionMetric::Rho]
                .iter()
                .all(|&m| distortion_report(&tree, &emb, m, DistortionMode::Exhaustive).unwrap().is_clean());
            let ok = envelope && spread <= 256.0 && edge_err <= 1e-9 && report_clean;
            pass &= ok;
            if !ok || depth == 4 {
                lines.push(format!(
                    "k={k} depth={depth}: ρ0/d in [{lo0:.4}, {hi0:.4}] vs [{:.4}, {log_n:.4}], ρ spread {spread:.2}, edge error {edge_err:.1e}",
                    log_n / 8.0
                ));
            }
        }
    }
    Outcome::new(pass, lines.join("; "))
}

fn invariance_suite() -> Outcome {
    let mut r = rng(9);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let n = r.gen_range(3..=7);
        let space = random_space(&mut r, n);
        let k = r.gen_range(2..n);
        let sub = random_subset(&mut r, n, k);
        let base = optimal_lambda(&space, &sub).unwrap().value;
        for c in [0.5, 2.0, 10.0] {
            let v = optimal_lambda(&space.scale(c).unwrap(), &sub).unwrap().value;
            worst = worst.max((v - base).abs());
        }
        let perm = random_subset(&mut r, n, n);
        let mut perm = perm;
        rand::seq::SliceRandom::shuffle(perm.as_mut_slice(), &mut r);
        let mut inverse = vec![0; n];
        for (i, &p) in perm.iter().enumerate() {
            inverse[p] = i;
        }
        let relabeled = space.permute(&perm).unwrap();
        let mapped: Vec<usize> = sub.iter().map(|&s| inverse[s]).collect();
        let v = optimal_lambda(&relabeled, &mapped).unwrap().value;
        worst = worst.max((v - base).abs());
    }
    Outcome::new(worst <= 1e-8, format!("20 instances x (3 scalings + 1 relabeling), max |Δλ| = {worst:.2e}"))
}

fn half_plane_comparisons() -> Outcome {
    let mut r = rng(10);
    let (mut upper_fail, mut lower_fail, mut separated, mut formula_err) = (0, 0, 0, 0.0f64);
    for _ in 0..10_000 {
        let sample = |r: &mut ChaCha8Rng| (r.gen_range(-20.0..20.0), 10f64.powf(r.gen_range(-3.0..3.0)));
        let (x, y) = (sample(&mut r), sample(&mut r));
        let (px, py) = (HyperbolicPoint::new(x.0, x.1).unwrap(), HyperbolicPoint::new(y.0, y.1).unwrap());
        let (rho, rho0) = (hyperbolic_rho(&px, &py), hyperbolic_rho0(&px, &py));
        formula_err = formula_err
            .max((rho - half_plane_distance(x, y)).abs() / rho.max(1.0))
            .max((rho0 - half_plane_gauge(x, y)).abs() / rho0.max(1.0));
        if rho > 4.0 * rho0 {
            upper_fail += 1;
        }
        let e = ((x.0 - y.0).powi(2) + (x.1 - y.1).powi(2)).sqrt();
        if e >= 0.5 * x.1.min(y.1) {
            separated += 1;
            if rho < rho0 / 8.0 {
                lower_fail += 1;
            }
        }
    }
    Outcome::new(
        upper_fail == 0 && lower_fail == 0 && formula_err <= 1e-9,
        format!(
            "10000 pairs: ρ > 4ρ0 in {upper_fail}; ρ < ρ0/8 in {lower_fail} of {separated} separated pairs; \
             library vs reference formulas {formula_err:.1e}"
        ),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("free-norm isometry", Duration::from_secs(10), free_norm_isometry),
        ("duality oracle", Duration::from_secs(60), duality_oracle),
        ("McShane preservation", Duration::MAX, mcshane_preservation),
        ("λ floor and ceiling", Duration::from_secs(300), lambda_floor_and_ceiling),
        ("certificate consistency", Duration::MAX, certificate_consistency),
        ("Whitney pipeline", Duration::from_secs(30), whitney_pipeline),
        ("averaging operator sanity", Duration::MAX, averaging_sanity),
        ("tree embedding bounds", Duration::from_secs(120), tree_embedding_bounds),
        ("invariance suite", Duration::MAX, invariance_suite),
        ("half-plane comparisons", Duration::MAX, half_plane_comparisons),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let out = run();
        let took = start.elapsed();
        let pass = out.pass && took <= *budget;
        failures += usize::from(!pass);
        let budget_note =
            if *budget == Duration::MAX { String::new() } else { format!(", budget {}s", budget.as_secs()) };
        println!(
            "criterion {:>2} {:<26} {}  {} [{:.2}s{budget_note}]",
            i + 1,
            name,
            if pass { "PASS" } else { "FAIL" },
            out.detail,
            took.as_secs_f64()
        );
    }
    if failures > 0 {
        println!("{failures} criteria failed");
        std::process::exit(1);
    }
    println!("all 10 criteria passed");
}
