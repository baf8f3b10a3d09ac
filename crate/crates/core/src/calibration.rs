//! Testing-based selection of the tuning parameter.
//!
//! Walking the grid from the largest value down, each new estimate is compared
//! with every estimate at a larger tuning parameter. The pair `(l1, l2)`
//! passes when
//!
//! ```text
//! ||beta(l1) - beta(l2)||_inf / (l1 + l2) <= C
//! ```
//!
//! and a grid value is accepted when every pair at or above it passes. The
//! accepted set is closed upwards, so the scan stops at the first rejection
//! and the selected value is the last accepted one. Coordinates of the
//! selected estimate with magnitude at least `3 C lambda_hat` form the support
//! estimate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Coefficients, Dataset};
use crate::solver::{self, LambdaGrid, PathPoint, RegularizationPath, SolverOptions};

/// Universal choice of the test constant.
pub const DEFAULT_C: f64 = 1.5;

/// Outcome of the test at one grid value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestRecord {
    pub lambda_index: usize,
    pub lambda: f64,
    /// `max_{l' >= l} ||beta(l') - beta(l)||_inf / (l' + l) - C`.
    pub statistic: f64,
    /// Whether every pair at or above this grid value passes.
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Selection {
    pub lambda_hat: f64,
    pub lambda_index: usize,
    /// Scanned grid values, largest first; the last entry is the first
    /// rejection unless the scan reached the bottom of the grid.
    pub test_trace: Vec<TestRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub lambda_hat: f64,
    pub lambda_index: usize,
    pub beta_hat: Coefficients,
    /// Thresholded support, 0-based and ascending.
    pub support_hat: Vec<usize>,
    pub constant_c: f64,
    pub test_trace: Vec<TestRecord>,
    /// Number of grid values the solver had to visit.
    pub points_fitted: usize,
}

/// Sparse view of an estimate for cheap sup-norm comparisons.
struct Fitted {
    lambda: f64,
    beta: Vec<f64>,
    nonzero: Vec<usize>,
}

impl Fitted {
    fn new(point: &PathPoint) -> Self {
        Fitted {
            lambda: point.lambda,
            nonzero: point.beta.support(),
            beta: point.beta.beta.clone(),
        }
    }

    fn sup_distance(&self, other: &Fitted) -> f64 {
        let one_side = |a: &Fitted, b: &Fitted| {
            a.nonzero
                .iter()
                .fold(0.0_f64, |m, &j| m.max((a.beta[j] - b.beta[j]).abs()))
        };
        one_side(self, other).max(one_side(other, self))
    }
}

fn check_constant(c: f64) -> Result<()> {
    if !(c >= 0.0 && c.is_finite()) {
        return Err(Error::param(
            "C",
            format!("must be finite and >= 0, got {c}"),
        ));
    }
    Ok(())
}

/// Runs the descending scan, asking `point_at(k, warm)` for the estimate at
/// grid index `k`. `warm` is the estimate at the next larger grid value.
///
/// Returns the selection and the estimates that passed, largest lambda first.
pub fn scan_descending<F>(
    grid: &LambdaGrid,
    c: f64,
    mut point_at: F,
) -> Result<(Selection, Vec<PathPoint>)>
where
    F: FnMut(usize, Option<&PathPoint>) -> Result<PathPoint>,
{
    check_constant(c)?;
    let mut accepted: Vec<PathPoint> = Vec::new();
    let mut sparse: Vec<Fitted> = Vec::new();
    let mut trace = Vec::new();

    for k in (0..grid.len()).rev() {
        let point = point_at(k, accepted.last())?;
        if point.lambda != grid.get(k) {
            return Err(Error::Contract(format!(
                "estimate for grid index {k} carries lambda {} instead of {}",
                point.lambda,
                grid.get(k)
            )));
        }
        if !point.converged {
            return Err(Error::Calibration(format!(
                "estimate at lambda = {} did not converge (KKT residual {:.3e})",
                point.lambda, point.kkt_residual
            )));
        }
        let current = Fitted::new(&point);
        // the pair (l, l) contributes -C
        let statistic = sparse.iter().fold(-c, |m, prev| {
            m.max(current.sup_distance(prev) / (current.lambda + prev.lambda) - c)
        });
        let passed = statistic <= 0.0;
        trace.push(TestRecord {
            lambda_index: k,
            lambda: point.lambda,
            statistic,
            passed,
        });
        if !passed {
            break;
        }
        sparse.push(current);
        accepted.push(point);
    }

    let last = accepted
        .last()
        .expect("the largest grid value always passes for C >= 0");
    let lambda_index = trace
        .iter()
        .rev()
        .find(|r| r.passed)
        .map(|r| r.lambda_index)
        .expect("at least one record passed");
    Ok((
        Selection {
            lambda_hat: last.lambda,
            lambda_index,
            test_trace: trace,
        },
        accepted,
    ))
}

/// Selection on an already fitted path.
pub fn select_lambda_testing(path: &RegularizationPath, c: f64) -> Result<Selection> {
    let (selection, _) = scan_descending(&path.grid, c, |k, _| Ok(path.points[k].clone()))?;
    Ok(selection)
}

/// `{ j : |beta_j| >= 3 C lambda_hat }`, restricted to nonzero coordinates.
pub fn thresholded_support(beta_hat: &Coefficients, c: f64, lambda_hat: f64) -> Vec<usize> {
    let threshold = 3.0 * c * lambda_hat;
    beta_hat
        .beta
        .iter()
        .enumerate()
        .filter(|(_, b)| **b != 0.0 && b.abs() >= threshold)
        .map(|(j, _)| j)
        .collect()
}

/// Fits the path lazily from the top of the grid and stops at the first
/// rejected grid value.
pub fn calibrate(
    data: &Dataset,
    grid: &LambdaGrid,
    c: f64,
    opts: &SolverOptions,
) -> Result<CalibrationResult> {
    let p = data.p();
    let mut fitted = 0usize;
    let (selection, accepted) = scan_descending(grid, c, |k, warm| {
        fitted += 1;
        let init = warm
            .map(|w| w.beta.clone())
            .unwrap_or_else(|| Coefficients::zeros(p));
        let lambda = grid.get(k);
        solver::fit_single(data, lambda, &init, opts).map_err(|e| Error::AtLambda {
            lambda,
            source: Box::new(e),
        })
    })?;
    let beta_hat = accepted
        .into_iter()
        .last()
        .map(|pt| pt.beta)
        .expect("selection always has an accepted estimate");
    Ok(finish(selection, beta_hat, c, fitted))
}

/// Builds the result for a selection on a precomputed path.
pub fn result_from_path(path: &RegularizationPath, c: f64) -> Result<CalibrationResult> {
    let selection = select_lambda_testing(path, c)?;
    let beta_hat = path.points[selection.lambda_index].beta.clone();
    let fitted = path.len();
    Ok(finish(selection, beta_hat, c, fitted))
}

fn finish(
    selection: Selection,
    beta_hat: Coefficients,
    c: f64,
    fitted: usize,
) -> CalibrationResult {
    let support_hat = thresholded_support(&beta_hat, c, selection.lambda_hat);
    CalibrationResult {
        lambda_hat: selection.lambda_hat,
        lambda_index: selection.lambda_index,
        beta_hat,
        support_hat,
        constant_c: c,
        test_trace: selection.test_trace,
        points_fitted: fitted,
    }
}

/// Quantities that require the true coefficients. They exist to validate the
/// data-driven selection in simulations, never to tune it.
pub mod validation {
    use nalgebra::DMatrix;
    use rand::Rng;
    use serde::{Deserialize, Serialize};

    use crate::diagnostics;
    use crate::error::{Error, Result};
    use crate::model::{sigmoid, Coefficients};
    use crate::seeds;
    use crate::solver::LambdaGrid;

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct OracleRequest {
        pub delta: f64,
        pub n_draws: usize,
        pub gamma: f64,
        pub truth: Coefficients,
    }

    impl OracleRequest {
        fn validate(&self, p: usize) -> Result<()> {
            if !(self.delta > 0.0 && self.delta < 1.0) {
                return Err(Error::param(
                    "delta",
                    format!("must lie in (0,1), got {}", self.delta),
                ));
            }
            if self.n_draws == 0 {
                return Err(Error::param("n_draws", "must be at least 1"));
            }
            if !(self.gamma > 0.0 && self.gamma <= 1.0) {
                return Err(Error::param(
                    "gamma",
                    format!("must lie in (0,1], got {}", self.gamma),
                ));
            }
            if self.truth.len() != p {
                return Err(Error::Contract(format!(
                    "truth has length {}, design has {} columns",
                    self.truth.len(),
                    p
                )));
            }
            Ok(())
        }
    }

    #[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
    pub struct OracleEstimate {
        pub lambda_star: f64,
        pub lambda_index: usize,
        /// Empirical probability of the noise event, per grid value.
        pub coverage: Vec<f64>,
    }

    /// Monte-Carlo estimate of the smallest grid value whose noise event holds
    /// with probability at least `1 - delta`.
    ///
    /// Draw `d` uses its own derived seed, so the result depends on
    /// `(seed, n_draws)` only.
    pub fn estimate_oracle_lambda(
        x: &DMatrix<f64>,
        request: &OracleRequest,
        grid: &LambdaGrid,
        seed: u64,
    ) -> Result<OracleEstimate> {
        let (n, p) = x.shape();
        request.validate(p)?;
        let eta = x * nalgebra::DVector::from_column_slice(&request.truth.beta);
        let probs: Vec<f64> = eta
            .iter()
            .map(|e| sigmoid(e + request.truth.intercept))
            .collect();

        let draw = |d: usize| -> f64 {
            let mut rng = seeds::derived_rng(seed, &[seeds::stream::ORACLE_DRAW, d as u64]);
            let eps: Vec<f64> = probs
                .iter()
                .map(|&pr| {
                    let y = if rng.random::<f64>() < pr { 1.0 } else { 0.0 };
                    y - pr
                })
                .collect();
            debug_assert_eq!(eps.len(), n);
            diagnostics::noise_statistic(x, &eps, request.gamma)
        };

        #[cfg(feature = "parallel")]
        let stats: Vec<f64> = {
            use rayon::prelude::*;
            (0..request.n_draws).into_par_iter().map(draw).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let stats: Vec<f64> = (0..request.n_draws).map(draw).collect();

        let total = request.n_draws as f64;
        let coverage: Vec<f64> = grid
            .values()
            .iter()
            .map(|&lambda| stats.iter().filter(|&&s| s <= lambda).count() as f64 / total)
            .collect();
        let target = 1.0 - request.delta;
        match coverage.iter().position(|&cov| cov >= target) {
            Some(k) => Ok(OracleEstimate {
                lambda_star: grid.get(k),
                lambda_index: k,
                coverage,
            }),
            None => Err(Error::GridTooLow {
                target,
                lambda_max: grid.max(),
                coverage: coverage[coverage.len() - 1],
            }),
        }
    }
}
