//! Logistic model primitives: data container, coefficients, likelihood and
//! its gradient.
//!
//! The loss is the sample-averaged negative log-likelihood
//!
//! ```text
//! L(beta) = sum_i ( log(1 + exp(x_i' beta)) - y_i x_i' beta ) / n
//! ```
//!
//! evaluated with an overflow-safe `log(1 + exp(t))`.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `log(1 + exp(t))` without overflow for large `|t|`.
#[inline]
pub fn log1p_exp(t: f64) -> f64 {
    if t > 0.0 {
        t + (-t).exp().ln_1p()
    } else {
        t.exp().ln_1p()
    }
}

/// Logistic function `exp(t) / (1 + exp(t))`.
#[inline]
pub fn sigmoid(t: f64) -> f64 {
    if t >= 0.0 {
        1.0 / (1.0 + (-t).exp())
    } else {
        let e = t.exp();
        e / (1.0 + e)
    }
}

/// Design matrix and binary response.
///
/// `X` is stored column-major (nalgebra's layout), so `column(j)` is a
/// contiguous slice; coordinate-wise solvers read it that way.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    x: DMatrix<f64>,
    y: Vec<f64>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: Vec<f64>) -> Result<Self> {
        let (n, p) = x.shape();
        if n == 0 || p == 0 {
            return Err(Error::Contract(format!(
                "design must have n >= 1 and p >= 1, got {n}x{p}"
            )));
        }
        if y.len() != n {
            return Err(Error::Contract(format!(
                "response length {} does not match {} design rows",
                y.len(),
                n
            )));
        }
        if let Some(i) = y.iter().position(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::Contract(format!(
                "response entry {} is {}, expected 0 or 1",
                i, y[i]
            )));
        }
        if let Some(k) = x.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                what: "design matrix",
                index: k,
            });
        }
        Ok(Dataset { x, y })
    }

    /// Builds from row-major values, the order people usually write matrices in.
    pub fn from_row_slice(n: usize, p: usize, values: &[f64], y: Vec<f64>) -> Result<Self> {
        if values.len() != n * p {
            return Err(Error::Contract(format!(
                "expected {} design values, got {}",
                n * p,
                values.len()
            )));
        }
        Self::new(DMatrix::from_row_slice(n, p, values), y)
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }

    pub fn x(&self) -> &DMatrix<f64> {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        let n = self.n();
        &self.x.as_slice()[j * n..(j + 1) * n]
    }

    /// `c_b = max_ij |X_ij|`.
    pub fn max_abs_entry(&self) -> f64 {
        self.x.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Result<Dataset> {
        if let Some(&bad) = rows.iter().find(|&&i| i >= self.n()) {
            return Err(Error::Contract(format!("row index {bad} out of range")));
        }
        let x = self.x.select_rows(rows);
        let y = rows.iter().map(|&i| self.y[i]).collect();
        Dataset::new(x, y)
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Result<Dataset> {
        if let Some(&bad) = cols.iter().find(|&&j| j >= self.p()) {
            return Err(Error::Contract(format!("column index {bad} out of range")));
        }
        let x = self.x.select_columns(cols);
        Dataset::new(x, self.y.clone())
    }

    /// Centers every column and scales it to unit sample standard deviation.
    ///
    /// Constant columns are centered only (their scale stays 1).
    pub fn standardized(&self) -> (Dataset, Standardization) {
        let n = self.n();
        let mut x = self.x.clone();
        let mut means = Vec::with_capacity(self.p());
        let mut scales = Vec::with_capacity(self.p());
        for j in 0..self.p() {
            let col = self.column(j);
            let mean = col.iter().sum::<f64>() / n as f64;
            let var = if n > 1 {
                col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64
            } else {
                0.0
            };
            let sd = var.sqrt();
            let scale = if sd > 0.0 && sd.is_finite() { sd } else { 1.0 };
            for v in x.column_mut(j).iter_mut() {
                *v = (*v - mean) / scale;
            }
            means.push(mean);
            scales.push(scale);
        }
        let data = Dataset {
            x,
            y: self.y.clone(),
        };
        (data, Standardization { means, scales })
    }
}

/// Column centering and scaling applied by [`Dataset::standardized`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Standardization {
    pub means: Vec<f64>,
    pub scales: Vec<f64>,
}

impl Standardization {
    /// Maps coefficients fitted on standardized columns back to the raw
    /// columns. Centering turns into an intercept offset.
    pub fn to_original_scale(&self, coef: &Coefficients) -> Coefficients {
        let beta: Vec<f64> = coef
            .beta
            .iter()
            .zip(&self.scales)
            .map(|(b, s)| b / s)
            .collect();
        let shift: f64 = beta.iter().zip(&self.means).map(|(b, m)| b * m).sum();
        Coefficients {
            beta,
            intercept: coef.intercept - shift,
        }
    }
}

/// Regression coefficients. `intercept` stays 0 unless a solver is asked to
/// fit an unpenalized intercept.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Coefficients {
    pub beta: Vec<f64>,
    #[serde(default)]
    pub intercept: f64,
}

impl Coefficients {
    pub fn new(beta: Vec<f64>) -> Self {
        Coefficients {
            beta,
            intercept: 0.0,
        }
    }

    pub fn zeros(p: usize) -> Self {
        Self::new(vec![0.0; p])
    }

    pub fn len(&self) -> usize {
        self.beta.len()
    }

    pub fn is_empty(&self) -> bool {
        self.beta.is_empty()
    }

    /// Indices of nonzero coordinates, ascending.
    pub fn support(&self) -> Vec<usize> {
        self.beta
            .iter()
            .enumerate()
            .filter(|(_, b)| **b != 0.0)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn l1_norm(&self) -> f64 {
        self.beta.iter().map(|b| b.abs()).sum()
    }

    /// Sup-norm distance between coefficient vectors (intercepts included).
    pub fn sup_distance(&self, other: &Coefficients) -> f64 {
        self.beta
            .iter()
            .zip(&other.beta)
            .fold((self.intercept - other.intercept).abs(), |m, (a, b)| {
                m.max((a - b).abs())
            })
    }

    /// Zeroes every coordinate outside `keep`.
    pub fn restricted_to(&self, keep: &[usize]) -> Coefficients {
        let mut beta = vec![0.0; self.beta.len()];
        for &j in keep {
            beta[j] = self.beta[j];
        }
        Coefficients {
            beta,
            intercept: self.intercept,
        }
    }

    pub fn check_finite(&self) -> Result<()> {
        if let Some(j) = self.beta.iter().position(|b| !b.is_finite()) {
            return Err(Error::NonFinite {
                what: "coefficients",
                index: j,
            });
        }
        if !self.intercept.is_finite() {
            return Err(Error::NonFinite {
                what: "intercept",
                index: 0,
            });
        }
        Ok(())
    }
}

fn check_dims(data: &Dataset, coef: &Coefficients) -> Result<()> {
    if coef.len() != data.p() {
        return Err(Error::Contract(format!(
            "coefficient length {} does not match {} predictors",
            coef.len(),
            data.p()
        )));
    }
    Ok(())
}

/// `X beta + intercept`, accumulated column by column (skips zero coordinates).
pub fn linear_predictor(data: &Dataset, coef: &Coefficients) -> Result<Vec<f64>> {
    check_dims(data, coef)?;
    let mut eta = vec![coef.intercept; data.n()];
    for (j, &b) in coef.beta.iter().enumerate() {
        if b != 0.0 {
            for (e, x) in eta.iter_mut().zip(data.column(j)) {
                *e += x * b;
            }
        }
    }
    Ok(eta)
}

pub fn predicted_probabilities(data: &Dataset, coef: &Coefficients) -> Result<Vec<f64>> {
    Ok(linear_predictor(data, coef)?
        .into_iter()
        .map(sigmoid)
        .collect())
}

/// Sum of per-sample losses for a given linear predictor; shared by the
/// likelihood, deviance and held-out scoring.
pub(crate) fn loss_sum(eta: &[f64], y: &[f64]) -> Result<f64> {
    let mut total = 0.0;
    for (i, (&t, &yi)) in eta.iter().zip(y).enumerate() {
        let term = log1p_exp(t) - yi * t;
        if !term.is_finite() {
            return Err(Error::NonFinite {
                what: "negative log-likelihood",
                index: i,
            });
        }
        total += term;
    }
    Ok(total)
}

pub fn negative_log_likelihood(data: &Dataset, coef: &Coefficients) -> Result<f64> {
    let eta = linear_predictor(data, coef)?;
    Ok(loss_sum(&eta, data.y())? / data.n() as f64)
}

/// `X' (p(beta) - y) / n`.
pub fn gradient(data: &Dataset, coef: &Coefficients) -> Result<Vec<f64>> {
    let probs = predicted_probabilities(data, coef)?;
    let diff: Vec<f64> = probs.iter().zip(data.y()).map(|(p, y)| p - y).collect();
    Ok(gradient_from_residuals(data, &diff))
}

/// `X' v / n` for a vector `v` of length n.
pub(crate) fn gradient_from_residuals(data: &Dataset, v: &[f64]) -> Vec<f64> {
    let n = data.n() as f64;
    (0..data.p()).map(|j| dot(data.column(j), v) / n).collect()
}

/// `y_i - pr(y_i = 1 | x_i)` under the given coefficients.
pub fn residuals(data: &Dataset, beta_star: &Coefficients) -> Result<Vec<f64>> {
    let probs = predicted_probabilities(data, beta_star)?;
    Ok(data.y().iter().zip(&probs).map(|(y, p)| y - p).collect())
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
