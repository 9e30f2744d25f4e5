//! Lipschitz extension constants of finite metric spaces.
//!
//! The crate computes the optimal extension constant `λ(S, F)` of a finite metric space
//! by linear programming, evaluates the Lipschitz-free norm and exact operator norms,
//! builds explicit extension operators (McShane, measure averaging, Whitney gluing over
//! a lattice, metric projection), and embeds truncated regular trees into the
//! hyperbolic plane with verified distortion.
//!
//! Everything numeric is generic over [`Scalar`] (`f32` or `f64`); the aliases below fix
//! `f64`, which is what the tolerances in the documentation refer to.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod embed;
pub mod error;
pub mod extension;
pub mod free_norm;
pub mod io;
pub mod lambda;
pub mod lp;
pub mod metric;
pub mod scalar;
pub mod spaces;

pub use embed::{
    assign_coordinates, distortion_report, edge_polyline, embed_edge_point, embed_vertices, geodesic_point,
    square_frames, DistortionMetric, DistortionMode, DistortionReport, SquareFrame, TkCoordinates, TreeEmbedding,
    VertexCoord,
};
pub use error::{Error, Result, Violation};
pub use extension::{
    averaging_operator, basepoint_extension, default_local_operators, doubling_constants, mcshane_extend,
    metric_projection_extend, nearest_point_map, operator_norm, operator_norm_attained, projection_operator,
    whitney_extend, whitney_extend_glued, whitney_operator, whitney_partition, whitney_partition_for_centers,
    ConvexBody, DoublingConstants, HalfSpace, LocalOperator, MeasureFamily, MeasureMode, NearestPointMap, OperatorNorm,
    PartitionOfUnity, WeightMatrix,
};
pub use free_norm::{
    free_norm, free_norm_of_weights, free_norm_witness, FlowAssignment, FreeNormWitness, SignedWeightVector,
};
pub use lambda::{
    lambda_of_space, optimal_lambda, optimal_lambda_nonneg, optimal_lambda_with, LambdaResult, SolverStats,
    SpaceLambda, DEFAULT_SUBSET_CAP,
};
pub use metric::{
    direct_p_sum, lipschitz_seminorm, pairs, scale_metric, validate_metric, FiniteMetricSpace, PointedSubspace,
    ScalarField, DEFAULT_PRODUCT_CAP,
};
pub use scalar::{approx_eq, Scalar};
pub use spaces::{
    build_r_lattice, grid_l1, hyperbolic_rho, hyperbolic_rho0, interval_grid, pad_to_tk, tree_distance, truncated_tk,
    HyperbolicPoint, Lattice, RootedTree, TkPadding,
};

/// Double-precision aliases.
pub type MetricSpace = FiniteMetricSpace<f64>;
pub type Field = ScalarField<f64>;
pub type Operator = WeightMatrix<f64>;
pub type WeightVector = SignedWeightVector<f64>;
pub type Tree = RootedTree<f64>;
pub type Point = HyperbolicPoint<f64>;
pub type Measures = MeasureFamily<f64>;
pub type Lambda = LambdaResult<f64>;
pub type Embedding = TreeEmbedding<f64>;
