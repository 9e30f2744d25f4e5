//! The `validate`, `lambda`, `extend` and `embed` subcommands.

use std::path::Path;

use anyhow::Context;
use lipext::io::{FunctionJson, LambdaJson, SpaceSpec};
use lipext::{
    averaging_operator, default_local_operators, distortion_report, edge_polyline, hyperbolic_rho0, lambda_of_space,
    lipschitz_seminorm, mcshane_extend, operator_norm, optimal_lambda, optimal_lambda_nonneg, projection_operator,
    truncated_tk, whitney_operator, whitney_partition_for_centers, ConvexBody, DistortionMetric, DistortionMode,
    DistortionReport, Error, FiniteMetricSpace, LambdaResult, MeasureFamily, ScalarField, TreeEmbedding, WeightMatrix,
    DEFAULT_PRODUCT_CAP,
};
use serde::{Deserialize, Serialize};

use crate::output::{csv_bytes, emit, json_bytes, num, read_json};
use crate::{CmdResult, EmbedArgs, ExtendArgs, Failure, LambdaArgs, Method, MetricArg};

/// Relative agreement required between an LP optimum and its recomputed certificate.
const CERTIFICATE_TOL: f64 = 1e-7;
/// Relative error allowed when checking that an extension restricts to its input.
const RESTRICTION_TOL: f64 = 1e-12;

fn load_space(path: &Path, cap: usize) -> Result<FiniteMetricSpace<f64>, Failure> {
    let value = read_json(path)?;
    Ok(SpaceSpec::from_value(&value)?.build(cap)?)
}

pub fn validate(input: &Path) -> CmdResult {
    let value = read_json(input)?;
    let spec = SpaceSpec::from_value(&value)?;
    match spec.build::<f64>(DEFAULT_PRODUCT_CAP) {
        Ok(space) => {
            println!("valid metric space: {} points, diameter {}", space.len(), num(space.diameter()));
            Ok(())
        }
        Err(Error::InvalidMetric(violations)) => {
            for v in &violations {
                println!("violation: {v}");
            }
            Err(Failure::violation(format!("{} metric axiom violation(s)", violations.len())))
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Serialize)]
struct EnumeratedJson {
    #[serde(flatten)]
    result: LambdaJson,
    subsets_evaluated: usize,
}

fn check_certificate(r: &LambdaResult<f64>) -> CmdResult {
    if r.source().len() > 1 && (r.certificate_norm - r.value).abs() > CERTIFICATE_TOL * r.value.max(1.0) {
        return Err(Failure::violation(format!(
            "certificate mismatch: LP value {} but the operator has norm {}",
            num(r.value),
            num(r.certificate_norm)
        )));
    }
    Ok(())
}

pub fn lambda(args: &LambdaArgs) -> CmdResult {
    if args.subset.is_none() && !args.enumerate {
        return Err(Failure::usage("lambda needs --subset or --enumerate"));
    }
    let space = load_space(&args.input, args.point_cap)?;
    let bytes = if let Some(subset) = &args.subset {
        let r = if args.nonneg { optimal_lambda_nonneg(&space, subset)? } else { optimal_lambda(&space, subset)? };
        check_certificate(&r)?;
        json_bytes(&LambdaJson::from_result(&r, args.nonneg))?
    } else {
        let best = lambda_of_space(&space, args.max_subset, args.subset_cap)?;
        let r = optimal_lambda(&space, &best.worst_subset)?;
        check_certificate(&r)?;
        json_bytes(&EnumeratedJson {
            result: LambdaJson::from_result(&r, false),
            subsets_evaluated: best.subsets_evaluated,
        })?
    };
    Ok(emit(args.out.as_deref(), &bytes)?)
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ProjectionInput {
    body: ConvexBody<f64>,
    sample: Vec<Vec<f64>>,
    queries: Vec<Vec<f64>>,
}

/// An extension together with what the CSV reports about it.
struct Extended {
    labels: Vec<String>,
    source: Vec<usize>,
    values: Vec<f64>,
    input: Vec<f64>,
    space: FiniteMetricSpace<f64>,
    operator: Option<WeightMatrix<f64>>,
}

fn read_function(path: &Path) -> Result<FunctionJson, Failure> {
    let value = read_json(path)?;
    let f: FunctionJson =
        serde_json::from_value(value).with_context(|| format!("{} is not a function file", path.display()))?;
    if f.subset.len() != f.values.len() {
        return Err(Error::LengthMismatch { expected: f.subset.len(), got: f.values.len() }.into());
    }
    if f.values.iter().any(|v| !v.is_finite()) {
        return Err(Failure::violation("function values must be finite"));
    }
    Ok(f)
}

fn extend_projection(args: &ExtendArgs, f: &FunctionJson) -> Result<Extended, Failure> {
    let input: ProjectionInput = serde_json::from_value(read_json(&args.input)?)
        .with_context(|| format!("{} is not a projection input", args.input.display()))?;
    let k = input.sample.len();
    let mut per_sample = vec![None; k];
    for (&i, &v) in f.subset.iter().zip(&f.values) {
        let slot = per_sample.get_mut(i).ok_or(Error::InvalidIndex { index: i, len: k })?;
        if slot.replace(v).is_some() {
            return Err(Error::DuplicateIndex(i).into());
        }
    }
    let values: Vec<f64> = per_sample
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Failure::violation(format!("no value for sample point {i}"))))
        .collect::<Result<_, _>>()?;
    let (space, op) = projection_operator(&input.body, &input.sample, &input.queries)?;
    let extended = op.apply(&values)?.into_values();
    let labels = (0..k).map(|i| format!("s{i}")).chain((0..input.queries.len()).map(|j| format!("q{j}"))).collect();
    Ok(Extended { labels, source: (0..k).collect(), values: extended, input: values, space, operator: Some(op) })
}

fn default_whitney_radius(space: &FiniteMetricSpace<f64>, source: &[usize]) -> f64 {
    let far = (0..space.len())
        .map(|m| source.iter().map(|&s| space.dist(m, s)).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max);
    if far > 0.0 {
        2.0 * far
    } else {
        1.0
    }
}

fn extend_on_space(args: &ExtendArgs, f: &FunctionJson) -> Result<Extended, Failure> {
    let space = load_space(&args.input, args.point_cap)?;
    let source = f.subset.clone();
    let (values, operator) = match args.method {
        Method::Mcshane => (mcshane_extend(&space, &source, &f.values)?.into_values(), None),
        Method::Average => {
            let op = averaging_operator(&space, &source, &MeasureFamily::counting(space.len()))?;
            (op.apply(&f.values)?.into_values(), Some(op))
        }
        Method::Whitney => {
            let radius = args.radius.unwrap_or_else(|| default_whitney_radius(&space, &source));
            let partition = whitney_partition_for_centers(&space, &source, radius)?;
            let local = default_local_operators(&space, &partition)?;
            let op = whitney_operator(&space, &partition, &local)?;
            (op.apply(&f.values)?.into_values(), Some(op))
        }
        Method::Projection => unreachable!("handled separately"),
    };
    Ok(Extended { labels: space.labels().to_vec(), source, values, input: f.values.clone(), space, operator })
}

pub fn extend(args: &ExtendArgs) -> CmdResult {
    let f = read_function(&args.function)?;
    let ext = match args.method {
        Method::Projection => extend_projection(args, &f)?,
        _ => extend_on_space(args, &f)?,
    };
    for (&s, &v) in ext.source.iter().zip(&ext.input) {
        let got = ext.values[s];
        if (got - v).abs() > RESTRICTION_TOL * v.abs().max(1.0) {
            return Err(Failure::violation(format!(
                "extension does not restrict to the input at point {s}: {} != {}",
                num(got),
                num(v)
            )));
        }
    }
    let input_norm = lipschitz_seminorm(&ScalarField::new(ext.input.clone()), &ext.space.restrict(&ext.source)?)?;
    let output_norm = lipschitz_seminorm(&ScalarField::new(ext.values.clone()), &ext.space)?;
    let mut summary = vec![("input_seminorm", input_norm), ("output_seminorm", output_norm)];
    if let Some(op) = &ext.operator {
        summary.push(("operator_norm", operator_norm(&ext.space, op)?));
    }
    let mut in_source = vec![false; ext.values.len()];
    for &s in &ext.source {
        in_source[s] = true;
    }
    let points = ext.values.iter().enumerate().map(|(i, &v)| {
        vec![if in_source[i] { "source" } else { "point" }.to_string(), i.to_string(), ext.labels[i].clone(), num(v)]
    });
    let norms = summary.into_iter().map(|(name, v)| vec![name.to_string(), String::new(), String::new(), num(v)]);
    let bytes = csv_bytes(&["record", "index", "label", "value"], points.chain(norms))?;
    Ok(emit(args.out.as_deref(), &bytes)?)
}

#[derive(Serialize)]
struct EmbedSummary {
    #[serde(flatten)]
    report: DistortionReport,
    /// `max |ρ0(I(v), I(parent)) - log n|` over edges.
    edge_rho0_error: f64,
    passed: bool,
}

/// Edges must have gauge exactly `log n` up to this absolute error.
const EDGE_TOL: f64 = 1e-9;

pub fn embed(args: &EmbedArgs) -> CmdResult {
    let tree = truncated_tk::<f64>(args.k, args.depth, args.vertex_cap)?;
    let emb = TreeEmbedding::new(&tree)?;
    let labels = tree.labels();
    let rows = emb.points.iter().enumerate().map(|(v, p)| vec![labels[v].clone(), num(p.x1()), num(p.x2())]);
    emit(args.out.as_deref(), &csv_bytes(&["vertex_label", "x1", "x2"], rows)?)?;

    if let Some(path) = &args.edges {
        let mut records = Vec::new();
        for v in (0..tree.len()).filter(|&v| tree.parent(v).is_some()) {
            let parent = tree.parent(v).expect("filtered");
            for (step, p) in edge_polyline(&tree, &emb, v, args.segments)?.iter().enumerate() {
                let t = step as f64 / args.segments as f64;
                records.push(vec![
                    labels[v].clone(),
                    labels[parent].clone(),
                    step.to_string(),
                    num(t),
                    num(p.x1()),
                    num(p.x2()),
                ]);
            }
        }
        emit(Some(path), &csv_bytes(&["vertex_label", "parent_label", "step", "t", "x1", "x2"], records)?)?;
    }

    let metric = match args.metric {
        MetricArg::Rho => DistortionMetric::Rho,
        MetricArg::Rho0 => DistortionMetric::Rho0,
    };
    let mode = DistortionMode::default_for(tree.len(), args.pairs, args.seed);
    let report = distortion_report(&tree, &emb, metric, mode)?;
    let log_n = emb.log_n();
    let edge_rho0_error = (0..tree.len())
        .filter_map(|v| tree.parent(v).map(|p| (hyperbolic_rho0(&emb.points[v], &emb.points[p]) - log_n).abs()))
        .fold(0.0, f64::max);
    let passed = report.is_clean() && edge_rho0_error <= EDGE_TOL;
    let summary = EmbedSummary { report, edge_rho0_error, passed };
    let bytes = json_bytes(&summary)?;
    match &args.report {
        Some(path) => emit(Some(path), &bytes)?,
        None => eprint!("{}", String::from_utf8_lossy(&bytes)),
    }
    if !passed {
        return Err(Failure::violation("the embedding violates a distortion bound"));
    }
    Ok(())
}
