//! JSON formats for spaces, operators and results.
//!
//! A space is either an explicit matrix, `{"labels": [...], "matrix": [[...]]}` with
//! optional labels, or a generator tagged by `"gen"`:
//!
//! * `{"gen": "grid_l1", "n": 2, "l": 3}`
//! * `{"gen": "tree", "parents": [null, 0, 0], "edge_len": [null, 1.0, 2.5], "labels": [...]}`
//! * `{"gen": "tk", "k": 2, "depth": 3}`
//! * `{"gen": "p_sum", "p": 1 | "inf", "parts": [<space>, ...]}`

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::extension::WeightMatrix;
use crate::lambda::LambdaResult;
use crate::metric::{direct_p_sum, FiniteMetricSpace};
use crate::scalar::Scalar;
use crate::spaces::{grid_l1, truncated_tk, RootedTree};

/// A parsed space description; [`SpaceSpec::build`] materializes it.
#[derive(Debug, Clone, PartialEq)]
pub enum SpaceSpec {
    Matrix { labels: Option<Vec<String>>, matrix: Vec<Vec<f64>> },
    GridL1 { n: usize, l: usize },
    Tree { parents: Vec<Option<usize>>, edge_len: Vec<Option<f64>>, labels: Option<Vec<String>> },
    Tk { k: usize, depth: usize },
    PSum { p: f64, parts: Vec<SpaceSpec> },
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixForm {
    labels: Option<Vec<String>>,
    matrix: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(tag = "gen", rename_all = "snake_case", deny_unknown_fields)]
enum GeneratorForm {
    GridL1 { n: usize, l: usize },
    Tree { parents: Vec<Option<usize>>, edge_len: Vec<Option<f64>>, labels: Option<Vec<String>> },
    Tk { k: usize, depth: usize },
    PSum { p: Value, parts: Vec<Value> },
}

fn input_err(e: impl std::fmt::Display) -> Error {
    Error::Input(e.to_string())
}

impl SpaceSpec {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let v: Value = serde_json::from_str(s).map_err(input_err)?;
        Self::from_value(&v)
    }

    pub fn from_value(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| Error::Input("space must be a JSON object".into()))?;
        if !obj.contains_key("gen") {
            let m: MatrixForm = serde_json::from_value(v.clone()).map_err(input_err)?;
            return Ok(SpaceSpec::Matrix { labels: m.labels, matrix: m.matrix });
        }
        let g: GeneratorForm = serde_json::from_value(v.clone()).map_err(input_err)?;
        Ok(match g {
            GeneratorForm::GridL1 { n, l } => SpaceSpec::GridL1 { n, l },
            GeneratorForm::Tree { parents, edge_len, labels } => SpaceSpec::Tree { parents, edge_len, labels },
            GeneratorForm::Tk { k, depth } => SpaceSpec::Tk { k, depth },
            GeneratorForm::PSum { p, parts } => SpaceSpec::PSum {
                p: parse_exponent(&p)?,
                parts: parts.iter().map(SpaceSpec::from_value).collect::<Result<_>>()?,
            },
        })
    }

    /// Builds the space, refusing anything with more than `cap` points.
    pub fn build<T: Scalar>(&self, cap: usize) -> Result<FiniteMetricSpace<T>> {
        match self {
            SpaceSpec::Matrix { labels, matrix } => {
                let m: Vec<Vec<T>> = matrix.iter().map(|r| r.iter().map(|&x| T::lit(x)).collect()).collect();
                FiniteMetricSpace::new(labels.clone(), &m)
            }
            SpaceSpec::GridL1 { n, l } => grid_l1(*n, *l, cap),
            SpaceSpec::Tree { .. } => self.build_tree::<T>(cap)?.to_metric_space(cap),
            SpaceSpec::Tk { k, depth } => truncated_tk::<T>(*k, *depth, cap)?.to_metric_space(cap),
            SpaceSpec::PSum { p, parts } => {
                let spaces = parts.iter().map(|s| s.build::<T>(cap)).collect::<Result<Vec<_>>>()?;
                direct_p_sum(&spaces, T::lit(*p), cap)
            }
        }
    }

    /// The rooted tree behind a `tree` or `tk` spec.
    pub fn build_tree<T: Scalar>(&self, cap: usize) -> Result<RootedTree<T>> {
        match self {
            SpaceSpec::Tree { parents, edge_len, labels } => {
                if edge_len.len() != parents.len() {
                    return Err(Error::LengthMismatch { expected: parents.len(), got: edge_len.len() });
                }
                let lens = edge_len
                    .iter()
                    .zip(parents)
                    .enumerate()
                    .map(|(v, (len, p))| match (len, p) {
                        (Some(x), _) => Ok(T::lit(*x)),
                        (None, None) => Ok(T::zero()),
                        (None, Some(_)) => Err(Error::NonpositiveEdge(v)),
                    })
                    .collect::<Result<Vec<T>>>()?;
                RootedTree::new(parents.clone(), lens, labels.clone())
            }
            SpaceSpec::Tk { k, depth } => truncated_tk(*k, *depth, cap),
            _ => Err(Error::Input("space is not a tree".into())),
        }
    }
}

fn parse_exponent(v: &Value) -> Result<f64> {
    match v {
        Value::Number(n) => n.as_f64().ok_or_else(|| Error::Input("bad exponent".into())),
        Value::String(s) if matches!(s.to_ascii_lowercase().as_str(), "inf" | "infinity") => Ok(f64::INFINITY),
        _ => Err(Error::Input(format!("exponent must be a number or \"inf\", got {v}"))),
    }
}

/// `{"source_indices": [...], "rows": [[...]]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OperatorJson {
    pub source_indices: Vec<usize>,
    pub rows: Vec<Vec<f64>>,
}

impl OperatorJson {
    pub fn from_operator<T: Scalar>(op: &WeightMatrix<T>) -> Self {
        OperatorJson {
            source_indices: op.source().to_vec(),
            rows: op.rows().iter().map(|r| r.iter().map(|x| x.as_f64()).collect()).collect(),
        }
    }

    pub fn to_operator<T: Scalar>(&self) -> Result<WeightMatrix<T>> {
        let rows = self.rows.iter().map(|r| r.iter().map(|&x| T::lit(x)).collect()).collect();
        WeightMatrix::new(self.rows.len(), self.source_indices.clone(), rows)
    }
}

/// `{"lambda": v, "S": [...], "operator": {...}, "active_pairs": [...]}` plus solver details.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LambdaJson {
    pub lambda: f64,
    #[serde(rename = "S")]
    pub subset: Vec<usize>,
    pub operator: OperatorJson,
    pub active_pairs: Vec<(usize, usize)>,
    pub certificate_norm: f64,
    pub nonneg: bool,
    pub iterations: usize,
}

impl LambdaJson {
    pub fn from_result<T: Scalar>(r: &LambdaResult<T>, nonneg: bool) -> Self {
        LambdaJson {
            lambda: r.value.as_f64(),
            subset: r.source().to_vec(),
            operator: OperatorJson::from_operator(&r.operator),
            active_pairs: r.active_pairs.clone(),
            certificate_norm: r.certificate_norm.as_f64(),
            nonneg,
            iterations: r.stats.iterations,
        }
    }
}

/// A function on a subset: `{"subset": [...], "values": [...]}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionJson {
    pub subset: Vec<usize>,
    pub values: Vec<f64>,
}
