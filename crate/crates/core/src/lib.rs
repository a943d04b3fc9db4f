//! Constructive sigmoidal network regression.
//!
//! Feed-forward networks here are *constructed* from data, not trained:
//! quasi-uniform centers are chained by a greedy nearest-neighbor pass, a
//! partition-based distance linearizes the input space along that chain, and
//! the network is a telescoping sum of sigmoid steps weighted by per-cell
//! output averages. Residual iteration raises the order of the estimator
//! without ever invoking an optimizer. Extreme learning machines and
//! Gaussian-kernel ridge regression are included as baselines, plus a
//! benchmark harness with synthetic targets, cross-validation, and report
//! generation.

pub mod activation;
pub mod baselines;
pub mod benchdata;
pub mod cfn;
pub mod error;
pub mod geometry;
pub mod harness;
pub mod persist;

pub use activation::Sigmoid;
pub use baselines::{elm_train, krr_train, ElmModel, KrrModel};
pub use benchdata::{generate, DatasetSpec, TargetFn};
pub use cfn::{basis_weights, cell_stats, CellStats, CfnModel, EmptyCellRule, SampleSet};
pub use error::{Error, Result};
pub use geometry::{
    equispaced_centers, sobol_centers, AxisBox, CenterChain, Point, VoronoiIndex,
};
pub use harness::{
    cross_validate, rmse, run_benchmark, BenchReport, BenchSpec, CfnWidth, ChosenParams, CvPlan,
    Method,
};
pub use persist::{ModelMetadata, TrainedModel};
