//! Design conditions and noise events for instances with known coefficients.
//!
//! With `W = diag(w_i)`, `w_i = exp(x_i' b) / (1 + exp(x_i' b))^2` and
//! `H = X_S' W X_S` on the true support `S`:
//!
//! * `c_min = lambda_min(H / n)`, `c_max = lambda_max(X' X / n)`
//! * `gamma = 1 - |||X_{S^c}' W X_S H^{-1}|||_inf`, the largest l1 norm of
//!   `H^{-1} X_S' W x_j` over columns `j` outside `S`
//! * `a = |||H^{-1}|||_inf / |||H^{-1}|||_2`
//! * `c_b = max |X_ij|`
//!
//! These are validation tools: they all need the truth.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{sigmoid, Coefficients};

/// Relative eigenvalue floor below which `H` is treated as singular.
const SINGULAR_RTOL: f64 = 1e-12;
const GAMMA_SNAP: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssumptionDiagnostics {
    /// `None` when the support is empty.
    pub c_min: Option<f64>,
    pub c_max: f64,
    pub gamma: Option<f64>,
    pub a: Option<f64>,
    pub c_b: f64,
    /// Largest tuning parameter covered by the l_inf theory, when the
    /// assumptions hold.
    pub lambda_cap: Option<f64>,
    pub assumptions_hold: bool,
    pub support_size: usize,
}

fn check_truth(x: &DMatrix<f64>, beta_star: &Coefficients) -> Result<()> {
    if beta_star.len() != x.ncols() {
        return Err(Error::Contract(format!(
            "truth has length {}, design has {} columns",
            beta_star.len(),
            x.ncols()
        )));
    }
    Ok(())
}

/// `w(x_i, beta*)` for every row; each entry lies in `(0, 1/4]`.
pub fn hessian_weights(x: &DMatrix<f64>, beta_star: &Coefficients) -> Result<Vec<f64>> {
    check_truth(x, beta_star)?;
    let eta = x * DVector::from_column_slice(&beta_star.beta);
    Ok(eta
        .iter()
        .map(|&t| {
            let t = t + beta_star.intercept;
            sigmoid(t) * sigmoid(-t)
        })
        .collect())
}

/// Largest eigenvalue of `X'X / n`, computed on the smaller Gram matrix.
fn max_gram_eigenvalue(x: &DMatrix<f64>) -> f64 {
    let n = x.nrows() as f64;
    let gram = if x.nrows() < x.ncols() {
        x * x.transpose()
    } else {
        x.transpose() * x
    };
    let eig = SymmetricEigen::new(gram / n);
    eig.eigenvalues
        .iter()
        .fold(f64::NEG_INFINITY, |m, &v| m.max(v))
}

fn max_abs_row_sum(m: &DMatrix<f64>) -> f64 {
    m.row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0_f64, f64::max)
}

fn max_abs_column_sum(m: &DMatrix<f64>) -> f64 {
    m.column_iter()
        .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0_f64, f64::max)
}

pub fn assumption_quantities(
    x: &DMatrix<f64>,
    beta_star: &Coefficients,
    support: &[usize],
) -> Result<AssumptionDiagnostics> {
    check_truth(x, beta_star)?;
    let (n, p) = x.shape();
    if let Some(&j) = support.iter().find(|&&j| j >= p) {
        return Err(Error::Contract(format!("support index {j} out of range")));
    }
    let mut sorted = support.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() != support.len() {
        return Err(Error::Contract("support contains duplicates".into()));
    }

    let c_b = x.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    let c_max = max_gram_eigenvalue(x);
    let s = sorted.len();

    let mut diag = AssumptionDiagnostics {
        c_min: None,
        c_max,
        gamma: None,
        a: None,
        c_b,
        lambda_cap: None,
        assumptions_hold: false,
        support_size: s,
    };
    if s == 0 {
        return Ok(diag);
    }

    let w = hessian_weights(x, beta_star)?;
    let x_s = x.select_columns(&sorted);
    let mut wx_s = x_s.clone();
    for (i, &wi) in w.iter().enumerate() {
        wx_s.row_mut(i).scale_mut(wi);
    }
    let h = x_s.transpose() * &wx_s;

    let eig = SymmetricEigen::new(h.clone() / n as f64);
    let lo = eig.eigenvalues.iter().fold(f64::INFINITY, |m, &v| m.min(v));
    let hi = eig.eigenvalues.iter().fold(0.0_f64, |m, &v| m.max(v));
    // also catches NaN eigenvalues
    if lo.is_nan() || lo <= SINGULAR_RTOL * hi.max(f64::MIN_POSITIVE) {
        diag.c_min = Some(0.0);
        return Ok(diag);
    }
    diag.c_min = Some(lo);

    let Some(chol) = h.clone().cholesky() else {
        diag.c_min = Some(0.0);
        return Ok(diag);
    };
    let h_inv = chol.inverse();
    let inf_norm = max_abs_row_sum(&h_inv);
    let spec_norm = h_inv
        .singular_values()
        .iter()
        .fold(0.0_f64, |m, &v| m.max(v));
    diag.a = Some(inf_norm / spec_norm);

    let complement: Vec<usize> = (0..p)
        .filter(|j| sorted.binary_search(j).is_err())
        .collect();
    let gamma = if complement.is_empty() {
        1.0
    } else {
        let x_sc = x.select_columns(&complement);
        let cross = wx_s.transpose() * x_sc;
        // s x (p - s); its transpose's row sums are these column sums
        let m = chol.solve(&cross);
        let g = 1.0 - max_abs_column_sum(&m);
        // exact collinearity lands within rounding of zero
        if g.abs() <= GAMMA_SNAP {
            0.0
        } else {
            g
        }
    };
    diag.gamma = Some(gamma);

    let c_min = lo;
    diag.assumptions_hold = c_min > 0.0 && gamma > 0.0;
    if diag.assumptions_hold {
        diag.lambda_cap =
            Some(gamma * c_min * c_min / (100.0 * c_b * (2.0 - gamma) * s as f64 * c_max));
    }
    Ok(diag)
}

/// `4 (2 - gamma) / (n gamma) * ||X' eps||_inf`: the smallest tuning
/// parameter for which the noise event holds.
pub fn noise_statistic(x: &DMatrix<f64>, eps: &[f64], gamma: f64) -> f64 {
    let n = x.nrows();
    let sup = (0..x.ncols()).fold(0.0_f64, |m, j| {
        let col = &x.as_slice()[j * n..(j + 1) * n];
        let v: f64 = col.iter().zip(eps).map(|(a, b)| a * b).sum();
        m.max(v.abs())
    });
    4.0 * (2.0 - gamma) / (n as f64 * gamma) * sup
}

pub fn event_holds(x: &DMatrix<f64>, eps: &[f64], gamma: f64, lambda: f64) -> Result<bool> {
    if eps.len() != x.nrows() {
        return Err(Error::Contract(format!(
            "residual length {} does not match {} rows",
            eps.len(),
            x.nrows()
        )));
    }
    if !(gamma > 0.0 && gamma <= 1.0) {
        return Err(Error::param(
            "gamma",
            format!("must lie in (0,1], got {gamma}"),
        ));
    }
    if lambda.is_nan() || lambda <= 0.0 {
        return Err(Error::param("lambda", "must be positive"));
    }
    Ok(noise_statistic(x, eps, gamma) <= lambda)
}

/// Sup-norm error bound `1.5 a lambda / c_min` on the noise event.
pub fn sup_error_bound(diag: &AssumptionDiagnostics, lambda: f64) -> Result<f64> {
    match (diag.assumptions_hold, diag.a, diag.c_min) {
        (true, Some(a), Some(c_min)) => Ok(1.5 * a * lambda / c_min),
        _ => Err(Error::UndefinedBound(
            "design assumptions do not hold for this instance".into(),
        )),
    }
}
