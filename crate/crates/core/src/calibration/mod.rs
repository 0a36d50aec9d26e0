//! Calibration: turning channel readings into wrench and contact estimates.
//!
//! The pipeline runs dataset collection ([`dataset`]), model fitting
//! ([`linear`], [`tree`], [`forest`], [`svr`] behind the [`model`] envelope),
//! and selection/diagnostics ([`eval`]): seeded cross-validated grid search,
//! held-out scoring, feature importance, and ablation.

pub mod dataset;
pub mod eval;
pub mod forest;
pub mod linear;
pub mod model;
pub mod svr;
pub mod tree;

pub use dataset::{CalibrationSample, Dataset, Protocol, Split, Target, VerticalProtocol};
pub use eval::{
    ablate_features, cross_validate, default_grid, grid_search, importance_order, kfold_indices,
    rmse, AblationStep, EvalReport, GridSearchResult,
};
pub use forest::{ForestParams, RandomForest};
pub use linear::LinearModel;
pub use model::{FittedParams, ModelKind, ModelMetadata, ModelSpec, TrainedModel};
pub use svr::{SvrModel, SvrParams};
pub use tree::{DecisionTree, TreeNode, TreeParams};
