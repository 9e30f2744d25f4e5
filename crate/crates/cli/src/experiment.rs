//! Canned experiments driven by a JSON config, each producing one CSV table.
//!
//! ```json
//! {"name": "lambda-vs-grid-size", "n": 2, "l": [1, 2], "seed": 7, "output": "lambda.csv"}
//! {"name": "averaging-norm-vs-resolution", "h": [0.1, 0.05, 0.02]}
//! {"name": "tree-distortion-vs-depth", "k": 2, "depths": [1, 2, 3, 4]}
//! ```

use std::path::{Path, PathBuf};

use anyhow::Context;
use lipext::{
    averaging_operator, distortion_report, doubling_constants, grid_l1, hyperbolic_rho0, interval_grid,
    lambda_of_space, operator_norm, optimal_lambda, optimal_lambda_nonneg, truncated_tk, DistortionMetric,
    DistortionMode, MeasureFamily, TreeEmbedding,
};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;

use crate::output::{csv_bytes, emit, num, read_json};
use crate::{CmdResult, Failure};

#[derive(Deserialize, Debug)]
struct Config {
    #[serde(flatten)]
    experiment: Experiment,
    #[serde(default)]
    seed: u64,
    output: Option<PathBuf>,
    #[serde(default)]
    caps: Caps,
}

#[derive(Deserialize, Debug)]
#[serde(default, deny_unknown_fields)]
struct Caps {
    points: usize,
    subsets: u128,
    pairs: usize,
    vertices: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { points: 4096, subsets: 100_000, pairs: 200_000, vertices: 1_000_000 }
    }
}

#[derive(Deserialize, Debug)]
#[serde(tag = "name", rename_all = "kebab-case")]
enum Experiment {
    LambdaVsGridSize {
        n: usize,
        l: Vec<usize>,
        #[serde(default)]
        subset: SubsetSpec,
        #[serde(default)]
        nonneg: bool,
    },
    AveragingNormVsResolution {
        h: Vec<f64>,
    },
    TreeDistortionVsDepth {
        k: usize,
        depths: Vec<usize>,
        #[serde(default = "both_metrics")]
        metrics: Vec<MetricName>,
    },
}

/// Which subset of the grid the λ experiment solves for.
#[derive(Deserialize, Debug, Default, Clone)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
enum SubsetSpec {
    /// The `2^n` corners of the cube.
    #[default]
    Corners,
    /// A seeded uniform subset of the given size.
    Random { size: usize },
    /// The worst subset over all subsets up to a size.
    Enumerate { max_subset: Option<usize> },
}

#[derive(Deserialize, Debug, Clone, Copy)]
#[serde(rename_all = "lowercase")]
enum MetricName {
    Rho,
    Rho0,
}

fn both_metrics() -> Vec<MetricName> {
    vec![MetricName::Rho0, MetricName::Rho]
}

/// Upper bound `24 (n + C)` on the averaging operator norm.
fn averaging_bound(n: usize, c: f64) -> f64 {
    24.0 * (n as f64 + c)
}

/// Desk-scale envelope for the averaging norm on grids of `[-1, 1]`.
const AVERAGING_ENVELOPE: f64 = 30.0;

fn bool_str(b: bool) -> String {
    b.to_string()
}

struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
    /// Rows that break a proven bound; reported after the table is written.
    violations: Vec<String>,
}

pub fn run(config_path: &Path, out: Option<&Path>) -> CmdResult {
    let value = read_json(config_path)?;
    let config: Config = serde_json::from_value(value)
        .with_context(|| format!("{} is not a valid experiment config", config_path.display()))?;
    let table = match &config.experiment {
        Experiment::LambdaVsGridSize { n, l, subset, nonneg } => lambda_vs_grid(&config, *n, l, subset, *nonneg)?,
        Experiment::AveragingNormVsResolution { h } => averaging_vs_resolution(h)?,
        Experiment::TreeDistortionVsDepth { k, depths, metrics } => tree_distortion(&config, *k, depths, metrics)?,
    };
    let bytes = csv_bytes(&table.header, table.rows)?;
    emit(out.or(config.output.as_deref()), &bytes)?;
    if !table.violations.is_empty() {
        return Err(Failure::violation(table.violations.join("; ")));
    }
    Ok(())
}

fn corners(n: usize, l: usize) -> Vec<usize> {
    let side = 2 * l + 1;
    (0..1usize << n)
        .map(|mask| (0..n).fold(0, |acc, i| acc * side + if mask >> (n - 1 - i) & 1 == 1 { side - 1 } else { 0 }))
        .collect()
}

fn lambda_vs_grid(config: &Config, n: usize, ls: &[usize], spec: &SubsetSpec, nonneg: bool) -> Result<Table, Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let ceiling = 24.0 * n as f64;
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for &l in ls {
        let space = grid_l1::<f64>(n, l, config.caps.points)?;
        let subset = match spec {
            SubsetSpec::Corners => corners(n, l),
            SubsetSpec::Random { size } => {
                if *size == 0 || *size > space.len() {
                    return Err(Failure::violation(format!("random subset size {size} out of range")));
                }
                let mut idx: Vec<usize> = (0..space.len()).collect();
                idx.shuffle(&mut rng);
                let mut s = idx[..*size].to_vec();
                s.sort_unstable();
                s
            }
            SubsetSpec::Enumerate { max_subset } => {
                lambda_of_space(&space, *max_subset, config.caps.subsets)?.worst_subset
            }
        };
        let r = if nonneg { optimal_lambda_nonneg(&space, &subset)? } else { optimal_lambda(&space, &subset)? };
        let ok = r.value >= 1.0 - 1e-8 && r.value <= ceiling;
        if !ok {
            violations.push(format!("l={l}: λ = {} outside [1, {ceiling}]", num(r.value)));
        }
        rows.push(vec![
            n.to_string(),
            l.to_string(),
            space.len().to_string(),
            subset.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" "),
            subset.len().to_string(),
            num(r.value),
            num(r.certificate_norm),
            num(ceiling),
            bool_str(ok),
        ]);
    }
    Ok(Table {
        header: vec![
            "n",
            "l",
            "points",
            "subset",
            "subset_size",
            "lambda",
            "certificate_norm",
            "ceiling",
            "within_bounds",
        ],
        rows,
        violations,
    })
}

fn averaging_vs_resolution(hs: &[f64]) -> Result<Table, Failure> {
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    let mut previous: Option<f64> = None;
    for &h in hs {
        let space = interval_grid::<f64>(h)?;
        let n = space.len();
        let measures = MeasureFamily::counting(n);
        let op = averaging_operator(&space, &[0, n - 1], &measures)?;
        let norm = operator_norm(&space, &op)?;
        let consts = doubling_constants(&space, &measures, 2.0)?;
        let bound = averaging_bound(1, consts.c);
        let within = norm <= AVERAGING_ENVELOPE;
        if !within {
            violations.push(format!("h={h}: operator norm {} exceeds {AVERAGING_ENVELOPE}", num(norm)));
        }
        let nonincreasing = previous.is_none_or(|p| norm <= p * (1.0 + 1e-12));
        previous = Some(norm);
        rows.push(vec![
            num(h),
            n.to_string(),
            num(norm),
            num(consts.d),
            num(consts.c),
            num(consts.a),
            num(bound),
            num(AVERAGING_ENVELOPE),
            bool_str(within),
            bool_str(nonincreasing),
        ]);
    }
    Ok(Table {
        header: vec![
            "h",
            "points",
            "operator_norm",
            "doubling_d2",
            "consistency_c",
            "annulus_a",
            "bound_24_n_plus_c",
            "envelope",
            "within_envelope",
            "nonincreasing",
        ],
        rows,
        violations,
    })
}

fn tree_distortion(config: &Config, k: usize, depths: &[usize], metrics: &[MetricName]) -> Result<Table, Failure> {
    let mut rows = Vec::new();
    let mut violations = Vec::new();
    for &depth in depths {
        let tree = truncated_tk::<f64>(k, depth, config.caps.vertices)?;
        let emb = TreeEmbedding::new(&tree)?;
        let log_n = emb.log_n();
        let edge_error = (0..tree.len())
            .filter_map(|v| tree.parent(v).map(|p| (hyperbolic_rho0(&emb.points[v], &emb.points[p]) - log_n).abs()))
            .fold(0.0, f64::max);
        for &m in metrics {
            let metric = match m {
                MetricName::Rho => DistortionMetric::Rho,
                MetricName::Rho0 => DistortionMetric::Rho0,
            };
            let mode = DistortionMode::default_for(tree.len(), config.caps.pairs, config.seed);
            let rep = distortion_report(&tree, &emb, metric, mode)?;
            let passed = rep.is_clean() && edge_error <= 1e-9;
            if !passed {
                violations.push(format!("k={k} depth={depth} {:?}: distortion bound violated", m));
            }
            rows.push(vec![
                k.to_string(),
                depth.to_string(),
                tree.len().to_string(),
                format!("{m:?}").to_lowercase(),
                rep.pairs_evaluated.to_string(),
                num(rep.min_ratio),
                num(rep.max_ratio),
                num(rep.lower_bound),
                num(rep.upper_bound),
                num(rep.spread),
                num(edge_error),
                bool_str(passed),
            ]);
        }
    }
    Ok(Table {
        header: vec![
            "k",
            "depth",
            "vertices",
            "metric",
            "pairs",
            "min_ratio",
            "max_ratio",
            "lower_bound",
            "upper_bound",
            "spread",
            "edge_rho0_error",
            "passed",
        ],
        rows,
        violations,
    })
}
