//! Competing calibrators (AIC, BIC, k-fold cross-validation), the unpenalized
//! refit, and leave-one-out evaluation of a whole selection method.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::calibration;
use crate::error::{Error, Result};
use crate::model::{self, sigmoid, Coefficients, Dataset};
use crate::seeds;
use crate::solver::{self, LambdaGrid, RegularizationPath, SolverOptions};
use crate::stats::mean_sd;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Testing,
    Bic,
    Cv,
    Aic,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Testing, Method::Bic, Method::Cv, Method::Aic];

    pub fn name(self) -> &'static str {
        match self {
            Method::Testing => "testing",
            Method::Bic => "bic",
            Method::Cv => "cv",
            Method::Aic => "aic",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "testing" => Ok(Method::Testing),
            "bic" => Ok(Method::Bic),
            "cv" => Ok(Method::Cv),
            "aic" => Ok(Method::Aic),
            other => Err(Error::param(
                "method",
                format!("unknown method `{other}` (expected testing, bic, cv or aic)"),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion {
    Aic,
    Bic,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CvLoss {
    #[default]
    Deviance,
    Misclassification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionOutcome {
    pub method: Method,
    pub lambda: f64,
    pub lambda_index: usize,
    pub beta: Coefficients,
    /// Thresholded support for testing, nonzero set otherwise. 0-based.
    pub support: Vec<usize>,
    /// Criterion value per grid value (ascending lambda); empty for testing.
    pub score_trace: Vec<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

/// Knobs shared by every selection method.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MethodConfig {
    pub constant_c: f64,
    pub folds: usize,
    pub cv_loss: CvLoss,
    pub seed: u64,
    pub solver: SolverOptions,
}

impl Default for MethodConfig {
    fn default() -> Self {
        MethodConfig {
            constant_c: calibration::DEFAULT_C,
            folds: 10,
            cv_loss: CvLoss::Deviance,
            seed: 0,
            solver: SolverOptions::default(),
        }
    }
}

/// Index of the minimum, preferring the larger lambda on exact ties.
fn argmin_prefer_sparse(scores: &[f64]) -> usize {
    let mut best = scores.len() - 1;
    for k in (0..scores.len()).rev() {
        if scores[k] < scores[best] {
            best = k;
        }
    }
    best
}

fn nonconverged_warnings(path: &RegularizationPath) -> Vec<String> {
    let bad: Vec<String> = path
        .points
        .iter()
        .filter(|p| !p.converged)
        .map(|p| format!("{:.6e}", p.lambda))
        .collect();
    if bad.is_empty() {
        Vec::new()
    } else {
        vec![format!(
            "{} path point(s) did not converge (lambda = {})",
            bad.len(),
            bad.join(", ")
        )]
    }
}

/// `2 n L(beta) + penalty * df`, with `df` the number of nonzero coefficients
/// and penalty 2 (AIC) or `log n` (BIC).
pub fn information_criterion(data: &Dataset, beta: &Coefficients, kind: Criterion) -> Result<f64> {
    let n = data.n() as f64;
    let penalty = match kind {
        Criterion::Aic => 2.0,
        Criterion::Bic => n.ln(),
    };
    let df = beta.support().len() as f64;
    Ok(2.0 * n * model::negative_log_likelihood(data, beta)? + penalty * df)
}

pub fn select_information_criterion(
    data: &Dataset,
    path: &RegularizationPath,
    kind: Criterion,
) -> Result<SelectionOutcome> {
    let scores = path
        .points
        .iter()
        .map(|pt| information_criterion(data, &pt.beta, kind))
        .collect::<Result<Vec<_>>>()?;
    let k = argmin_prefer_sparse(&scores);
    let beta = path.points[k].beta.clone();
    Ok(SelectionOutcome {
        method: match kind {
            Criterion::Aic => Method::Aic,
            Criterion::Bic => Method::Bic,
        },
        lambda: path.grid.get(k),
        lambda_index: k,
        support: beta.support(),
        beta,
        score_trace: scores,
        warnings: nonconverged_warnings(path),
    })
}

/// Seeded partition of `0..n` into `k` folds whose sizes differ by at most one.
pub fn cv_folds(n: usize, k: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    if k < 2 || k > n {
        return Err(Error::param(
            "folds",
            format!("need 2 <= k <= n, got k = {k}, n = {n}"),
        ));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeds::derived_rng(seed, &[seeds::stream::CV_FOLDS]));
    let mut folds = vec![Vec::with_capacity(n / k + 1); k];
    for (pos, &i) in order.iter().enumerate() {
        folds[pos % k].push(i);
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Held-out loss of `beta` on `data`: mean binomial deviance or error rate.
pub fn held_out_loss(data: &Dataset, beta: &Coefficients, loss: CvLoss) -> Result<f64> {
    let eta = model::linear_predictor(data, beta)?;
    let n = data.n() as f64;
    Ok(match loss {
        CvLoss::Deviance => 2.0 * model::loss_sum(&eta, data.y())? / n,
        CvLoss::Misclassification => {
            eta.iter()
                .zip(data.y())
                .filter(|(e, y)| classify(sigmoid(**e)) != **y)
                .count() as f64
                / n
        }
    })
}

/// Class 1 when the probability is at least one half.
#[inline]
pub fn classify(prob: f64) -> f64 {
    if prob >= 0.5 {
        1.0
    } else {
        0.0
    }
}

fn complement(n: usize, fold: &[usize]) -> Vec<usize> {
    let mut out = Vec::with_capacity(n - fold.len());
    let mut it = fold.iter().peekable();
    for i in 0..n {
        if it.peek() == Some(&&i) {
            it.next();
        } else {
            out.push(i);
        }
    }
    out
}

/// Per-fold held-out losses for every grid value, `[fold][lambda]`.
fn fold_losses(
    data: &Dataset,
    grid: &LambdaGrid,
    folds: &[Vec<usize>],
    loss: CvLoss,
    opts: &SolverOptions,
) -> Result<(Vec<Vec<f64>>, Vec<String>)> {
    let one = |(f, fold): (usize, &Vec<usize>)| -> Result<(Vec<f64>, Option<String>)> {
        let train = data.select_rows(&complement(data.n(), fold))?;
        let test = data.select_rows(fold)?;
        let ones = train.y().iter().filter(|&&y| y == 1.0).count();
        let warning = (ones == 0 || ones == train.n())
            .then(|| format!("fold {f}: training response is constant"));
        let path = solver::fit_path(&train, grid, opts)?;
        let losses = path
            .points
            .iter()
            .map(|pt| held_out_loss(&test, &pt.beta, loss))
            .collect::<Result<Vec<_>>>()?;
        Ok((losses, warning))
    };

    #[cfg(feature = "parallel")]
    let results: Vec<_> = {
        use rayon::prelude::*;
        folds.par_iter().enumerate().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<_> = folds.iter().enumerate().map(one).collect();

    let mut losses = Vec::with_capacity(folds.len());
    let mut warnings = Vec::new();
    for r in results {
        let (l, w) = r?;
        losses.push(l);
        warnings.extend(w);
    }
    Ok((losses, warnings))
}

/// k-fold cross-validation over the grid. The selected tuning parameter is
/// then fitted on the full data (path from the top of the grid down to it).
pub fn select_cross_validation(
    data: &Dataset,
    grid: &LambdaGrid,
    k: usize,
    seed: u64,
    loss: CvLoss,
    opts: &SolverOptions,
) -> Result<SelectionOutcome> {
    let folds = cv_folds(data.n(), k, seed)?;
    let (per_fold, warnings) = fold_losses(data, grid, &folds, loss, opts)?;
    let scores: Vec<f64> = (0..grid.len())
        .map(|j| per_fold.iter().map(|f| f[j]).sum::<f64>() / k as f64)
        .collect();
    let best = argmin_prefer_sparse(&scores);

    let mut beta = Coefficients::zeros(data.p());
    for idx in (best..grid.len()).rev() {
        let lambda = grid.get(idx);
        let pt = solver::fit_single(data, lambda, &beta, opts).map_err(|e| Error::AtLambda {
            lambda,
            source: Box::new(e),
        })?;
        beta = pt.beta;
    }
    Ok(SelectionOutcome {
        method: Method::Cv,
        lambda: grid.get(best),
        lambda_index: best,
        support: beta.support(),
        beta,
        score_trace: scores,
        warnings,
    })
}

/// Testing-based selection packaged like the baselines.
pub fn select_testing(
    data: &Dataset,
    grid: &LambdaGrid,
    c: f64,
    opts: &SolverOptions,
) -> Result<SelectionOutcome> {
    let res = calibration::calibrate(data, grid, c, opts)?;
    Ok(SelectionOutcome {
        method: Method::Testing,
        lambda: res.lambda_hat,
        lambda_index: res.lambda_index,
        beta: res.beta_hat,
        support: res.support_hat,
        score_trace: Vec::new(),
        warnings: Vec::new(),
    })
}

/// Runs one method end to end on `data`, including whatever path fitting it needs.
pub fn select(
    data: &Dataset,
    grid: &LambdaGrid,
    method: Method,
    cfg: &MethodConfig,
) -> Result<SelectionOutcome> {
    match method {
        Method::Testing => select_testing(data, grid, cfg.constant_c, &cfg.solver),
        Method::Bic | Method::Aic => {
            let path = solver::fit_path(data, grid, &cfg.solver)?;
            let kind = if method == Method::Bic {
                Criterion::Bic
            } else {
                Criterion::Aic
            };
            select_information_criterion(data, &path, kind)
        }
        Method::Cv => {
            select_cross_validation(data, grid, cfg.folds, cfg.seed, cfg.cv_loss, &cfg.solver)
        }
    }
}

pub const REFIT_RIDGE: f64 = 1e-8;
/// Coefficients beyond this magnitude indicate (quasi-)separation.
pub const SEPARATION_LIMIT: f64 = 30.0;
const REFIT_MAX_NEWTON: usize = 500;
const REFIT_GRAD_TOL: f64 = 1e-10;
const REFIT_STEP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Refit {
    pub coefficients: Coefficients,
    pub separation_suspect: bool,
    pub iterations: usize,
    pub converged: bool,
}

/// Unpenalized maximum likelihood on the `support` columns (zero elsewhere),
/// by Newton's method with step halving.
pub fn refit_unpenalized(data: &Dataset, support: &[usize], intercept: bool) -> Result<Refit> {
    let p = data.p();
    if let Some(&j) = support.iter().find(|&&j| j >= p) {
        return Err(Error::Contract(format!("support index {j} out of range")));
    }
    if support.is_empty() && !intercept {
        return Ok(Refit {
            coefficients: Coefficients::zeros(p),
            separation_suspect: false,
            iterations: 0,
            converged: true,
        });
    }

    let n = data.n();
    let nf = n as f64;
    // columns of the reduced problem, intercept last
    let k = support.len() + usize::from(intercept);
    let xs = DMatrix::from_fn(n, k, |i, c| {
        if c < support.len() {
            data.x()[(i, support[c])]
        } else {
            1.0
        }
    });
    let y = DVector::from_column_slice(data.y());
    let loss = |theta: &DVector<f64>| -> Result<f64> {
        let eta = &xs * theta;
        Ok(model::loss_sum(eta.as_slice(), data.y())? / nf)
    };

    let mut theta = DVector::zeros(k);
    let mut current = loss(&theta)?;
    let mut converged = false;
    let mut iterations = 0;
    for _ in 0..REFIT_MAX_NEWTON {
        let eta = &xs * &theta;
        let probs = eta.map(sigmoid);
        let grad = xs.transpose() * (&probs - &y) / nf;
        if theta.amax() > 2.0 * SEPARATION_LIMIT {
            break;
        }
        let mut wx = xs.clone();
        for i in 0..n {
            let w = probs[i] * (1.0 - probs[i]);
            wx.row_mut(i).scale_mut(w);
        }
        let mut hess = xs.transpose() * wx / nf;
        for d in 0..k {
            hess[(d, d)] += REFIT_RIDGE;
        }
        let Some(step) = hess.cholesky().map(|c| c.solve(&grad)) else {
            break;
        };
        // Under separation the gradient vanishes while Newton steps do not,
        // so both must be small.
        if grad.amax() <= REFIT_GRAD_TOL && step.amax() <= REFIT_STEP_TOL * (1.0 + theta.amax()) {
            converged = true;
            break;
        }
        iterations += 1;
        let mut t = 1.0;
        let mut moved = false;
        for _ in 0..=30 {
            let trial = &theta - &step * t;
            let l = loss(&trial)?;
            if l <= current {
                theta = trial;
                current = l;
                moved = true;
                break;
            }
            t *= 0.5;
        }
        if !moved {
            break;
        }
    }
    if theta.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            what: "refit coefficients",
            index: 0,
        });
    }

    let mut beta = vec![0.0; p];
    for (c, &j) in support.iter().enumerate() {
        beta[j] = theta[c];
    }
    let coefficients = Coefficients {
        beta,
        intercept: if intercept { theta[k - 1] } else { 0.0 },
    };
    // The ridge term keeps Newton from running off to infinity, so a fit that
    // stalls while classifying every sample correctly counts as separated too.
    let eta = &xs * &theta;
    let separates = eta
        .iter()
        .zip(data.y())
        .all(|(e, y)| if *y == 1.0 { *e > 0.0 } else { *e < 0.0 });
    let separation_suspect = theta
        .iter()
        .take(support.len())
        .any(|v| v.abs() > SEPARATION_LIMIT)
        || (!converged && separates);
    Ok(Refit {
        coefficients,
        separation_suspect,
        iterations,
        converged,
    })
}

/// Outcome of one held-out sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LoocvRecord {
    pub index: usize,
    pub lambda: f64,
    pub model_size: usize,
    pub error: f64,
    pub refit_error: Option<f64>,
    pub separation_suspect: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub method: Method,
    pub runs: usize,
    pub failed: usize,
    pub model_size_mean: f64,
    pub model_size_sd: f64,
    pub loocv_error_mean: f64,
    pub loocv_error_sd: f64,
    pub loocv_refit_error_mean: Option<f64>,
    pub loocv_refit_error_sd: Option<f64>,
    pub separation_suspect: usize,
    #[serde(skip_serializing_if = "Vec::is_empty", default)]
    pub failures: Vec<String>,
}

/// Leave-one-out evaluation of a full selection method: for every sample the
/// method (including its own tuning) runs on the other `n - 1` samples and the
/// held-out label is predicted, optionally after an unpenalized refit on the
/// selected support.
///
/// Predictions use the estimate restricted to the selected support, so for
/// testing the coordinates below the threshold do not contribute.
pub fn loocv_evaluate(
    data: &Dataset,
    grid: &LambdaGrid,
    method: Method,
    refit: bool,
    cfg: &MethodConfig,
) -> Result<EvaluationReport> {
    let n = data.n();
    if n < 2 {
        return Err(Error::param(
            "n",
            "leave-one-out needs at least two samples",
        ));
    }
    let one = |i: usize| -> Result<LoocvRecord> {
        let train = data.select_rows(&complement(n, &[i]))?;
        let held = data.select_rows(&[i])?;
        let fold_cfg = MethodConfig {
            seed: seeds::derive(cfg.seed, &[i as u64]),
            ..*cfg
        };
        let folds = fold_cfg.folds.min(train.n());
        let fold_cfg = MethodConfig { folds, ..fold_cfg };
        let outcome = select(&train, grid, method, &fold_cfg)?;
        let model = outcome.beta.restricted_to(&outcome.support);
        let prob = model::predicted_probabilities(&held, &model)?[0];
        let error = f64::from(classify(prob) != held.y()[0]);
        let (refit_error, separation_suspect) = if refit {
            let r = refit_unpenalized(&train, &outcome.support, cfg.solver.intercept)?;
            let prob = model::predicted_probabilities(&held, &r.coefficients)?[0];
            (
                Some(f64::from(classify(prob) != held.y()[0])),
                r.separation_suspect,
            )
        } else {
            (None, false)
        };
        Ok(LoocvRecord {
            index: i,
            lambda: outcome.lambda,
            model_size: outcome.support.len(),
            error,
            refit_error,
            separation_suspect,
        })
    };

    #[cfg(feature = "parallel")]
    let results: Vec<Result<LoocvRecord>> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(one).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let results: Vec<Result<LoocvRecord>> = (0..n).map(one).collect();

    Ok(summarize_loocv(method, refit, results))
}

pub(crate) fn summarize_loocv(
    method: Method,
    refit: bool,
    results: Vec<Result<LoocvRecord>>,
) -> EvaluationReport {
    let mut records = Vec::new();
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(rec) => records.push(rec),
            Err(e) => failures.push(format!("sample {i}: {e}")),
        }
    }
    let sizes: Vec<f64> = records.iter().map(|r| r.model_size as f64).collect();
    let errors: Vec<f64> = records.iter().map(|r| r.error).collect();
    let (model_size_mean, model_size_sd) = mean_sd(&sizes);
    let (loocv_error_mean, loocv_error_sd) = mean_sd(&errors);
    let (refit_mean, refit_sd) = if refit {
        let e: Vec<f64> = records.iter().filter_map(|r| r.refit_error).collect();
        let (m, s) = mean_sd(&e);
        (Some(m), Some(s))
    } else {
        (None, None)
    };
    EvaluationReport {
        method,
        runs: records.len(),
        failed: failures.len(),
        model_size_mean,
        model_size_sd,
        loocv_error_mean,
        loocv_error_sd,
        loocv_refit_error_mean: refit_mean,
        loocv_refit_error_sd: refit_sd,
        separation_suspect: records.iter().filter(|r| r.separation_suspect).count(),
        failures,
    }
}
