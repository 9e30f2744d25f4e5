use std::fmt;
use thiserror::Error;

/// One failed metric axiom, with the offending indices.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub enum Violation {
    NonFinite {
        i: usize,
        j: usize,
    },
    NegativeDistance {
        i: usize,
        j: usize,
    },
    NonzeroDiagonal {
        i: usize,
    },
    Asymmetry {
        i: usize,
        j: usize,
    },
    DuplicatePoints {
        i: usize,
        j: usize,
    },
    /// `d(i, j) > d(i, via) + d(via, j)`.
    TriangleViolation {
        i: usize,
        j: usize,
        via: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NonFinite { i, j } => write!(f, "non-finite distance at ({i},{j})"),
            Violation::NegativeDistance { i, j } => write!(f, "negative distance at ({i},{j})"),
            Violation::NonzeroDiagonal { i } => write!(f, "nonzero diagonal at ({i},{i})"),
            Violation::Asymmetry { i, j } => write!(f, "asymmetry: d({i},{j}) != d({j},{i})"),
            Violation::DuplicatePoints { i, j } => write!(f, "duplicate points: d({i},{j}) = 0"),
            Violation::TriangleViolation { i, j, via } => {
                write!(f, "triangle violation: d({i},{j}) > d({i},{via}) + d({via},{j})")
            }
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("distance matrix is not square: {rows} rows, row {row} has {len} entries")]
    NotSquare { rows: usize, row: usize, len: usize },
    #[error("invalid metric ({} violation(s)); first: {}", .0.len(), .0[0])]
    InvalidMetric(Vec<Violation>),
    #[error("product space of {size} points exceeds the cap of {cap}")]
    ProductTooLarge { size: usize, cap: usize },
    #[error("scale factor must be positive")]
    NonpositiveScale,
    #[error("p must lie in [1, inf], got {0}")]
    InvalidExponent(f64),
    #[error("invalid point index {index} (space has {len} points)")]
    InvalidIndex { index: usize, len: usize },
    #[error("index {0} appears twice")]
    DuplicateIndex(usize),
    #[error("basepoint {0} is not in the subspace")]
    BasepointNotInSubspace(usize),
    #[error("field has {got} values, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("source set is empty")]
    EmptySource,
    #[error("invalid vertex {0}")]
    InvalidVertex(usize),
    #[error("invalid tree: {0}")]
    InvalidTree(String),
    #[error("edge lengths must be positive (vertex {0})")]
    NonpositiveEdge(usize),
    #[error("upper half-plane point needs x2 > 0, got {0}")]
    NonpositiveHeight(f64),
    #[error("radius must be positive")]
    NonpositiveRadius,
    #[error("lattice does not cover point {0}")]
    CoverFailure(usize),
    #[error("weights sum to {0}, expected 0")]
    NotZeroSum(f64),
    #[error("linear program is infeasible")]
    LpInfeasible,
    #[error("linear program is unbounded")]
    LpUnbounded,
    #[error("linear program too large: {vars} variables, {rows} rows (caps {var_cap} variables, {entry_cap} tableau entries)")]
    LpTooLarge { vars: usize, rows: usize, var_cap: usize, entry_cap: usize },
    #[error("solver failure: {0}")]
    SolverFailure(String),
    #[error("subset enumeration of {count} subsets exceeds the cap of {cap}")]
    EnumerationTooLarge { count: u128, cap: u128 },
    #[error("operator is not an extension operator: {0}")]
    NotAnExtension(String),
    #[error("ball around point {0} carries no mass")]
    EmptyBallMass(usize),
    #[error("invalid measure family: {0}")]
    InvalidMeasure(String),
    #[error("local operator for center {center} does not match its ball: {reason}")]
    LocalOperatorMismatch { center: usize, reason: String },
    #[error("unsupported convex body: {0}")]
    UnsupportedBody(String),
    #[error("empty sample")]
    EmptySample,
    #[error("tree is not a truncated T_k: {0}")]
    NotATkTree(String),
    #[error("frames are inconsistent with coordinates at vertex {0}")]
    IncoherentCoordinates(usize),
    #[error("the root has no parent edge")]
    RootHasNoEdge,
    #[error("edge parameter {0} outside [0, 1]")]
    ParamOutOfRange(f64),
    #[error("invalid input: {0}")]
    Input(String),
}

impl Error {
    /// True for errors raised by a size cap rather than by bad input.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::ProductTooLarge { .. } | Error::LpTooLarge { .. } | Error::EnumerationTooLarge { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
