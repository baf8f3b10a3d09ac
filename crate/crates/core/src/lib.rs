//! Sparse logistic regression with testing-based tuning parameter
//! calibration.
//!
//! The crate fits the family of L1-penalized logistic estimators along a grid
//! of tuning parameters and selects one member by pairwise sup-norm tests
//! along the path ([`calibration::calibrate`]). The selected estimate is then
//! thresholded to produce a support estimate. Baseline calibrators (AIC, BIC,
//! k-fold CV), theory-side diagnostics for instances with a known truth, and a
//! seeded simulation harness live alongside.

pub mod baselines;
pub mod calibration;
pub mod diagnostics;
pub mod error;
pub mod model;
pub mod seeds;
pub mod simulation;
pub mod solver;
mod stats;

pub use error::{Error, Result};
pub use model::{Coefficients, Dataset};
pub use solver::{LambdaGrid, PathPoint, RegularizationPath, SolverOptions};
