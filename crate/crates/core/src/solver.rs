//! L1-penalized logistic regression at a single tuning parameter and along a
//! grid.
//!
//! The solver is a proximal-Newton scheme: each outer iteration replaces the
//! likelihood by its IRLS quadratic model at the current iterate and
//! minimizes the penalized model by cyclic coordinate descent with
//! soft-thresholding, interleaved with exact Newton steps on the current
//! sign pattern of the active coordinates. The resulting direction is accepted with step halving
//! whenever the full penalized objective would otherwise increase. Convergence
//! is certified by the sup-norm KKT residual, not by iterate changes.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{self, sigmoid, Coefficients, Dataset};

/// Quadratic weights `p(1-p)` never drop below this value.
pub const IRLS_WEIGHT_FLOOR: f64 = 1e-5;
pub const DEFAULT_TOL: f64 = 1e-7;
pub const DEFAULT_MAX_ITER: usize = 10_000;
const MAX_HALVINGS: usize = 30;
/// Plain active-set sweeps between Newton steps on the sign face.
const NEWTON_EVERY: usize = 32;

/// Strictly increasing, strictly positive tuning parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct LambdaGrid {
    values: Vec<f64>,
}

impl LambdaGrid {
    /// Sorts the values ascending; rejects empty input, duplicates and
    /// anything that is not a finite positive number.
    pub fn new(mut values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::param("grid", "at least one value is required"));
        }
        if let Some(v) = values.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
            return Err(Error::param(
                "grid",
                format!("values must be finite and positive, got {v}"),
            ));
        }
        values.sort_by(|a, b| a.total_cmp(b));
        if let Some(w) = values.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::param("grid", format!("duplicate value {}", w[0])));
        }
        Ok(LambdaGrid { values })
    }

    /// `count` equally spaced values on `[lo, hi]`. A single-point grid is `{hi}`.
    pub fn linear(lo: f64, hi: f64, count: usize) -> Result<Self> {
        if count == 0 {
            return Err(Error::param("n_lambda", "must be at least 1"));
        }
        if !(lo > 0.0 && hi.is_finite() && lo <= hi) {
            return Err(Error::param(
                "grid",
                format!("need 0 < lo <= hi, got [{lo}, {hi}]"),
            ));
        }
        if count == 1 {
            return Self::new(vec![hi]);
        }
        let step = (hi - lo) / (count - 1) as f64;
        let mut values: Vec<f64> = (0..count).map(|k| lo + step * k as f64).collect();
        values[count - 1] = hi;
        Self::new(values)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, k: usize) -> f64 {
        self.values[k]
    }

    pub fn max(&self) -> f64 {
        self.values[self.values.len() - 1]
    }

    pub fn min(&self) -> f64 {
        self.values[0]
    }
}

impl TryFrom<Vec<f64>> for LambdaGrid {
    type Error = Error;
    fn try_from(values: Vec<f64>) -> Result<Self> {
        LambdaGrid::new(values)
    }
}

impl From<LambdaGrid> for Vec<f64> {
    fn from(g: LambdaGrid) -> Self {
        g.values
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverOptions {
    /// Target sup-norm KKT residual.
    pub tol: f64,
    /// Budget of coordinate sweeps per tuning parameter.
    pub max_iter: usize,
    /// Fit an unpenalized intercept. Off by default: the model has none.
    pub intercept: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            tol: DEFAULT_TOL,
            max_iter: DEFAULT_MAX_ITER,
            intercept: false,
        }
    }
}

impl SolverOptions {
    fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::param("tol", "must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

/// One member of the estimator family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    pub lambda: f64,
    pub beta: Coefficients,
    pub kkt_residual: f64,
    /// Coordinate sweeps spent on this point.
    pub iterations: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularizationPath {
    pub grid: LambdaGrid,
    /// Aligned with `grid` (ascending lambda).
    pub points: Vec<PathPoint>,
}

impl RegularizationPath {
    pub fn new(grid: LambdaGrid, points: Vec<PathPoint>) -> Result<Self> {
        if grid.len() != points.len() {
            return Err(Error::Contract(format!(
                "{} path points for a grid of {}",
                points.len(),
                grid.len()
            )));
        }
        if let Some((k, pt)) = points
            .iter()
            .enumerate()
            .find(|(k, pt)| pt.lambda != grid.get(*k))
        {
            return Err(Error::Contract(format!(
                "path point {k} has lambda {} but grid value is {}",
                pt.lambda,
                grid.get(k)
            )));
        }
        Ok(RegularizationPath { grid, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn all_converged(&self) -> bool {
        self.points.iter().all(|p| p.converged)
    }
}

/// `L(beta) + lambda * ||beta||_1` (the intercept is never penalized).
pub fn penalized_objective(data: &Dataset, coef: &Coefficients, lambda: f64) -> Result<f64> {
    Ok(model::negative_log_likelihood(data, coef)? + lambda * coef.l1_norm())
}

/// Sup-norm violation of the subgradient optimality conditions over the
/// penalized coordinates.
pub fn kkt_residual(data: &Dataset, coef: &Coefficients, lambda: f64) -> Result<f64> {
    let g = model::gradient(data, coef)?;
    Ok(kkt_from_gradient(&g, &coef.beta, lambda))
}

fn kkt_from_gradient(g: &[f64], beta: &[f64], lambda: f64) -> f64 {
    g.iter().zip(beta).fold(0.0_f64, |m, (&gj, &bj)| {
        let v = if bj != 0.0 {
            (gj + lambda * bj.signum()).abs()
        } else {
            (gj.abs() - lambda).max(0.0)
        };
        m.max(v)
    })
}

/// Smallest lambda at which the zero vector is optimal: `||X'(y - 1/2)||_inf / n`.
pub fn lambda_zero_threshold(data: &Dataset) -> f64 {
    let centered: Vec<f64> = data.y().iter().map(|y| y - 0.5).collect();
    model::gradient_from_residuals(data, &centered)
        .into_iter()
        .fold(0.0_f64, |m, g| m.max(g.abs()))
}

struct Workspace {
    weights: Vec<f64>,
    resid: Vec<f64>,
    curvature: Vec<f64>,
    curvature_ready: Vec<bool>,
}

impl Workspace {
    fn new(n: usize, p: usize) -> Self {
        Workspace {
            weights: vec![0.0; n],
            resid: vec![0.0; n],
            curvature: vec![0.0; p],
            curvature_ready: vec![false; p],
        }
    }
}

#[inline]
fn soft_threshold(z: f64, t: f64) -> f64 {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        0.0
    }
}

/// Minimizes the penalized objective at one `lambda`, starting from `init`.
///
/// Running out of sweeps is not an error: the best iterate is returned with
/// `converged = false`.
pub fn fit_single(
    data: &Dataset,
    lambda: f64,
    init: &Coefficients,
    opts: &SolverOptions,
) -> Result<PathPoint> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::param(
            "lambda",
            format!("must be positive, got {lambda}"),
        ));
    }
    opts.validate()?;
    if init.len() != data.p() {
        return Err(Error::Contract(format!(
            "initial coefficients have length {}, expected {}",
            init.len(),
            data.p()
        )));
    }
    init.check_finite()?;

    let n = data.n();
    let p = data.p();
    let nf = n as f64;
    let mut coef = init.clone();
    if !opts.intercept {
        coef.intercept = 0.0;
    }

    let mut eta = model::linear_predictor(data, &coef)?;
    let mut objective = model::loss_sum(&eta, data.y())? / nf + lambda * coef.l1_norm();
    let mut kkt = full_kkt(data, &eta, &coef, lambda, opts.intercept);
    let mut sweeps = 0usize;
    let mut ws = Workspace::new(n, p);
    let mut active: Vec<usize> = Vec::with_capacity(p);

    while kkt > opts.tol && sweeps < opts.max_iter {
        // IRLS quadratic model at the current iterate.
        for (i, &e) in eta.iter().enumerate() {
            let pr = sigmoid(e);
            let w = (pr * (1.0 - pr)).max(IRLS_WEIGHT_FLOOR);
            ws.weights[i] = w;
            ws.resid[i] = (data.y()[i] - pr) / w;
        }
        ws.curvature_ready.iter_mut().for_each(|r| *r = false);
        let start_resid = ws.resid.clone();

        let inner_tol = (0.1 * kkt).max(0.1 * opts.tol);
        let mut candidate = coef.clone();
        sweeps += coordinate_descent(
            data,
            lambda,
            &mut candidate,
            &mut ws,
            &mut active,
            inner_tol,
            opts.max_iter - sweeps,
            opts.intercept,
        );

        // X d (+ intercept change) falls out of the working residuals.
        let step_eta: Vec<f64> = start_resid
            .iter()
            .zip(&ws.resid)
            .map(|(a, b)| a - b)
            .collect();
        let direction: Vec<f64> = candidate
            .beta
            .iter()
            .zip(&coef.beta)
            .map(|(a, b)| a - b)
            .collect();
        let d_intercept = candidate.intercept - coef.intercept;

        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..=MAX_HALVINGS {
            let trial = if t == 1.0 {
                candidate.clone()
            } else {
                Coefficients {
                    beta: coef
                        .beta
                        .iter()
                        .zip(&direction)
                        .map(|(b, d)| b + t * d)
                        .collect(),
                    intercept: coef.intercept + t * d_intercept,
                }
            };
            let trial_eta: Vec<f64> = eta.iter().zip(&step_eta).map(|(e, d)| e + t * d).collect();
            let trial_obj = model::loss_sum(&trial_eta, data.y())? / nf + lambda * trial.l1_norm();
            if trial_obj <= objective {
                accepted = Some((trial, trial_eta, trial_obj));
                break;
            }
            t *= 0.5;
        }

        let Some((next, next_eta, next_obj)) = accepted else {
            // No descent along the model direction: the iterate is as good as
            // this scheme can make it.
            break;
        };
        next.check_finite()?;
        let stalled = next == coef;
        coef = next;
        // Recompute from scratch to keep rounding drift out of the certificate.
        eta = if t == 1.0 {
            model::linear_predictor(data, &coef)?
        } else {
            next_eta
        };
        objective = next_obj.min(objective);
        kkt = full_kkt(data, &eta, &coef, lambda, opts.intercept);
        if stalled {
            break;
        }
    }

    Ok(PathPoint {
        lambda,
        kkt_residual: kkt,
        iterations: sweeps,
        converged: kkt <= opts.tol,
        beta: coef,
    })
}

fn full_kkt(data: &Dataset, eta: &[f64], coef: &Coefficients, lambda: f64, intercept: bool) -> f64 {
    let diff: Vec<f64> = eta
        .iter()
        .zip(data.y())
        .map(|(&e, &y)| sigmoid(e) - y)
        .collect();
    let g = model::gradient_from_residuals(data, &diff);
    let mut kkt = kkt_from_gradient(&g, &coef.beta, lambda);
    if intercept {
        kkt = kkt.max((diff.iter().sum::<f64>() / data.n() as f64).abs());
    }
    kkt
}

/// Cyclic coordinate descent on the weighted least-squares model held in `ws`.
/// Returns the number of sweeps used.
#[allow(clippy::too_many_arguments)]
fn coordinate_descent(
    data: &Dataset,
    lambda: f64,
    coef: &mut Coefficients,
    ws: &mut Workspace,
    active: &mut Vec<usize>,
    inner_tol: f64,
    budget: usize,
    intercept: bool,
) -> usize {
    let n = data.n() as f64;
    let p = data.p();
    let mut sweeps = 0;

    while sweeps < budget {
        let full_change = sweep(data, lambda, coef, ws, 0..p, n, intercept);
        sweeps += 1;
        if full_change < inner_tol {
            break;
        }
        active.clear();
        active.extend((0..p).filter(|&j| coef.beta[j] != 0.0));
        let mut since_newton = 0;
        while sweeps < budget {
            if since_newton == NEWTON_EVERY {
                face_newton(data, lambda, coef, ws, active, intercept);
                since_newton = 0;
            }
            since_newton += 1;
            let change = sweep(data, lambda, coef, ws, active.iter().copied(), n, intercept);
            sweeps += 1;
            if change < inner_tol {
                break;
            }
        }
    }
    sweeps
}

/// Minimizes the weighted quadratic model over the nonzero coordinates of
/// `active` with their signs held fixed, stopping at the first coordinate
/// that would cross zero. Leaves `coef` untouched when the reduced system is
/// not positive definite.
fn face_newton(
    data: &Dataset,
    lambda: f64,
    coef: &mut Coefficients,
    ws: &mut Workspace,
    active: &[usize],
    intercept: bool,
) {
    let face: Vec<usize> = active
        .iter()
        .copied()
        .filter(|&j| coef.beta[j] != 0.0)
        .collect();
    let k = face.len() + usize::from(intercept);
    let n = data.n();
    if k == 0 || k > n {
        return;
    }
    let nf = n as f64;
    let sqrt_w: Vec<f64> = ws.weights.iter().map(|w| w.sqrt()).collect();
    let mut xw = DMatrix::<f64>::zeros(n, k);
    for (c, &j) in face.iter().enumerate() {
        for ((dst, x), sw) in xw.column_mut(c).iter_mut().zip(data.column(j)).zip(&sqrt_w) {
            *dst = x * sw;
        }
    }
    if intercept {
        xw.column_mut(k - 1).copy_from_slice(&sqrt_w);
    }
    let h = xw.tr_mul(&xw) / nf;
    let wr = DVector::from_iterator(n, sqrt_w.iter().zip(&ws.resid).map(|(sw, r)| sw * r));
    let mut g = xw.tr_mul(&wr) / nf;
    for (c, &j) in face.iter().enumerate() {
        g[c] -= lambda * coef.beta[j].signum();
    }
    let Some(chol) = h.cholesky() else {
        return;
    };
    let step = chol.solve(&g);
    if step.iter().any(|v| !v.is_finite()) {
        return;
    }

    let mut t = 1.0_f64;
    let mut blocking = None;
    for (c, &j) in face.iter().enumerate() {
        let b = coef.beta[j];
        if (b + step[c]) * b < 0.0 {
            let tj = -b / step[c];
            if tj < t {
                t = tj;
                blocking = Some(j);
            }
        }
    }

    for (c, &j) in face.iter().enumerate() {
        let delta = t * step[c];
        coef.beta[j] += delta;
        for (r, x) in ws.resid.iter_mut().zip(data.column(j)) {
            *r -= x * delta;
        }
    }
    if intercept {
        let delta = t * step[k - 1];
        coef.intercept += delta;
        ws.resid.iter_mut().for_each(|r| *r -= delta);
    }
    if let Some(j) = blocking {
        let b = coef.beta[j];
        coef.beta[j] = 0.0;
        for (r, x) in ws.resid.iter_mut().zip(data.column(j)) {
            *r += x * b;
        }
    }
}

/// One pass over `coords`; returns the largest curvature-scaled move.
fn sweep(
    data: &Dataset,
    lambda: f64,
    coef: &mut Coefficients,
    ws: &mut Workspace,
    coords: impl Iterator<Item = usize>,
    n: f64,
    intercept: bool,
) -> f64 {
    let mut max_change = 0.0_f64;
    if intercept {
        let a: f64 = ws.weights.iter().sum::<f64>() / n;
        let g: f64 = ws
            .weights
            .iter()
            .zip(&ws.resid)
            .map(|(w, r)| w * r)
            .sum::<f64>()
            / n;
        let delta = g / a;
        if delta != 0.0 {
            coef.intercept += delta;
            ws.resid.iter_mut().for_each(|r| *r -= delta);
            max_change = max_change.max(a * delta.abs());
        }
    }
    for j in coords {
        let col = data.column(j);
        if !ws.curvature_ready[j] {
            ws.curvature[j] = col
                .iter()
                .zip(&ws.weights)
                .map(|(x, w)| w * x * x)
                .sum::<f64>()
                / n;
            ws.curvature_ready[j] = true;
        }
        let a = ws.curvature[j];
        let old = coef.beta[j];
        if a <= 0.0 {
            // all-zero column
            coef.beta[j] = 0.0;
            continue;
        }
        let g = col
            .iter()
            .zip(&ws.weights)
            .zip(&ws.resid)
            .map(|((x, w), r)| x * w * r)
            .sum::<f64>()
            / n;
        let new = soft_threshold(g + a * old, lambda) / a;
        let delta = new - old;
        if delta != 0.0 {
            coef.beta[j] = new;
            for (r, x) in ws.resid.iter_mut().zip(col) {
                *r -= x * delta;
            }
            max_change = max_change.max(a * delta.abs());
        }
    }
    max_change
}

/// Fits every grid value, largest first, warm-starting each fit at the
/// previous solution. The returned path is aligned with the ascending grid.
pub fn fit_path(
    data: &Dataset,
    grid: &LambdaGrid,
    opts: &SolverOptions,
) -> Result<RegularizationPath> {
    let mut points = Vec::with_capacity(grid.len());
    let mut warm = Coefficients::zeros(data.p());
    for &lambda in grid.values().iter().rev() {
        let point = fit_single(data, lambda, &warm, opts).map_err(|e| Error::AtLambda {
            lambda,
            source: Box::new(e),
        })?;
        warm = point.beta.clone();
        points.push(point);
    }
    points.reverse();
    RegularizationPath::new(grid.clone(), points)
}

/// Penalized objective used by the tests and diagnostics; exposed so callers
/// can compare solutions that are not unique.
pub fn objective_at(data: &Dataset, point: &PathPoint) -> Result<f64> {
    penalized_objective(data, &point.beta, point.lambda)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> Dataset {
        Dataset::from_row_slice(
            6,
            2,
            &[
                1.0, 0.3, -0.5, 1.2, 0.8, -0.7, -1.1, 0.4, 0.2, -0.9, 1.4, 0.1,
            ],
            vec![1.0, 0.0, 1.0, 0.0, 0.0, 1.0],
        )
        .unwrap()
    }

    #[test]
    fn grid_is_sorted_and_rejects_duplicates() {
        let g = LambdaGrid::new(vec![0.3, 0.1, 0.2]).unwrap();
        assert_eq!(g.values(), &[0.1, 0.2, 0.3]);
        assert!(LambdaGrid::new(vec![0.1, 0.1]).is_err());
        assert!(LambdaGrid::new(vec![]).is_err());
        assert!(LambdaGrid::new(vec![0.0, 1.0]).is_err());
        assert!(LambdaGrid::new(vec![f64::NAN]).is_err());
    }

    #[test]
    fn linear_grid_endpoints() {
        let g = LambdaGrid::linear(0.1, 1.0, 10).unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(g.min(), 0.1);
        assert_eq!(g.max(), 1.0);
        assert_eq!(LambdaGrid::linear(0.1, 1.0, 1).unwrap().values(), &[1.0]);
    }

    #[test]
    fn kkt_at_origin_formulas() {
        let d = small();
        let g0 = model::gradient(&d, &Coefficients::zeros(2)).unwrap();
        let gmax = g0.iter().fold(0.0_f64, |m, g| m.max(g.abs()));
        let zero = Coefficients::zeros(2);
        assert_eq!(kkt_residual(&d, &zero, gmax).unwrap(), 0.0);
        assert_eq!(kkt_residual(&d, &zero, 2.0 * gmax).unwrap(), 0.0);
        let r = kkt_residual(&d, &zero, gmax / 2.0).unwrap();
        assert!((r - gmax / 2.0).abs() < 1e-15);
    }

    #[test]
    fn lambda_zero_threshold_cancellation() {
        let d = Dataset::from_row_slice(2, 1, &[1.0, 1.0], vec![1.0, 0.0]).unwrap();
        assert_eq!(lambda_zero_threshold(&d), 0.0);
    }

    #[test]
    fn zero_above_threshold() {
        let d = small();
        let lz = lambda_zero_threshold(&d);
        let pt = fit_single(&d, lz, &Coefficients::zeros(2), &SolverOptions::default()).unwrap();
        assert!(pt.beta.beta.iter().all(|&b| b == 0.0));
        assert!(pt.converged);
        // warm start away from zero still lands exactly on zero
        let pt = fit_single(
            &d,
            lz * 1.5,
            &Coefficients::new(vec![0.4, -0.3]),
            &SolverOptions::default(),
        )
        .unwrap();
        assert!(pt.converged);
        assert!(pt.beta.beta.iter().all(|&b| b == 0.0), "{:?}", pt.beta);
    }

    #[test]
    fn certificate_and_descent() {
        let d = small();
        let opts = SolverOptions {
            tol: 1e-8,
            ..Default::default()
        };
        let init = Coefficients::new(vec![2.0, -2.0]);
        let before = penalized_objective(&d, &init, 0.02).unwrap();
        let pt = fit_single(&d, 0.02, &init, &opts).unwrap();
        assert!(pt.converged);
        assert!(pt.kkt_residual <= 1e-8);
        assert!(kkt_residual(&d, &pt.beta, 0.02).unwrap() <= 1e-8);
        assert!(objective_at(&d, &pt).unwrap() <= before);
    }

    #[test]
    fn exhausted_budget_is_reported_not_raised() {
        let d = small();
        let opts = SolverOptions {
            tol: 1e-14,
            max_iter: 1,
            intercept: false,
        };
        let pt = fit_single(&d, 0.001, &Coefficients::zeros(2), &opts).unwrap();
        assert!(!pt.converged);
        assert!(pt.kkt_residual > 1e-14);
    }

    #[test]
    fn invalid_inputs() {
        let d = small();
        let o = SolverOptions::default();
        assert!(fit_single(&d, 0.0, &Coefficients::zeros(2), &o).is_err());
        assert!(fit_single(&d, 0.1, &Coefficients::zeros(3), &o).is_err());
        let bad = SolverOptions { tol: 0.0, ..o };
        assert!(fit_single(&d, 0.1, &Coefficients::zeros(2), &bad).is_err());
    }

    #[test]
    fn intercept_mode_zeroes_intercept_gradient() {
        let d = small();
        let opts = SolverOptions {
            tol: 1e-9,
            intercept: true,
            ..Default::default()
        };
        let pt = fit_single(&d, 0.05, &Coefficients::zeros(2), &opts).unwrap();
        assert!(pt.converged);
        let probs = model::predicted_probabilities(&d, &pt.beta).unwrap();
        let g0: f64 = probs.iter().zip(d.y()).map(|(p, y)| p - y).sum::<f64>() / 6.0;
        assert!(g0.abs() <= 1e-9);
    }

    #[test]
    fn single_point_path_matches_fit_single() {
        let d = small();
        let grid = LambdaGrid::new(vec![0.05]).unwrap();
        let o = SolverOptions::default();
        let path = fit_path(&d, &grid, &o).unwrap();
        let pt = fit_single(&d, 0.05, &Coefficients::zeros(2), &o).unwrap();
        assert_eq!(path.points[0], pt);
    }

    #[test]
    fn path_above_threshold_is_all_zero() {
        let d = small();
        let lz = lambda_zero_threshold(&d);
        let grid = LambdaGrid::linear(lz, 3.0 * lz, 5).unwrap();
        let path = fit_path(&d, &grid, &SolverOptions::default()).unwrap();
        for pt in &path.points {
            assert!(pt.beta.beta.iter().all(|&b| b == 0.0));
        }
    }
}
