//! Simulation harness: equicorrelated Gaussian designs, random sparse truths,
//! and per-method comparisons of support recovery and run time.

use std::time::Instant;

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::baselines::{self, Method, MethodConfig};
use crate::error::{Error, Result};
use crate::model::{sigmoid, Coefficients, Dataset};
use crate::seeds::{self, stream};
use crate::solver::{LambdaGrid, SolverOptions};
use crate::stats::{mean_sd, median};

/// Ratio between the smallest and the largest default grid value.
pub const DEFAULT_LAMBDA_MIN_RATIO: f64 = 1e-4;

/// Rows i.i.d. `N(0, (1 - kappa) I + kappa 11')`, generated as
/// `sqrt(1 - kappa) z_i + sqrt(kappa) g_i 1`.
pub fn generate_design(n: usize, p: usize, kappa: f64, seed: u64) -> Result<DMatrix<f64>> {
    if !(0.0..1.0).contains(&kappa) {
        return Err(Error::param(
            "kappa",
            format!("must lie in [0,1), got {kappa}"),
        ));
    }
    let mut rng = seeds::rng(seed);
    let own = (1.0 - kappa).sqrt();
    let shared = kappa.sqrt();
    let mut x = DMatrix::zeros(n, p);
    for i in 0..n {
        let g: f64 = rng.sample(StandardNormal);
        for j in 0..p {
            let z: f64 = rng.sample(StandardNormal);
            x[(i, j)] = own * z + shared * g;
        }
    }
    Ok(x)
}

/// `s` coordinates chosen uniformly without replacement, each set to +1 or -1
/// with equal probability. Returns the truth and its sorted support.
pub fn generate_truth(p: usize, s: usize, seed: u64) -> Result<(Coefficients, Vec<usize>)> {
    if s > p {
        return Err(Error::param("s", format!("sparsity {s} exceeds p = {p}")));
    }
    let mut rng = seeds::rng(seed);
    let mut support = rand::seq::index::sample(&mut rng, p, s).into_vec();
    support.sort_unstable();
    let mut beta = vec![0.0; p];
    for &j in &support {
        beta[j] = if rng.random::<bool>() { 1.0 } else { -1.0 };
    }
    Ok((Coefficients::new(beta), support))
}

/// Independent Bernoulli responses under the logistic model.
pub fn generate_response(
    x: &DMatrix<f64>,
    beta_star: &Coefficients,
    seed: u64,
) -> Result<Vec<f64>> {
    if beta_star.len() != x.ncols() {
        return Err(Error::Contract(format!(
            "truth has length {}, design has {} columns",
            beta_star.len(),
            x.ncols()
        )));
    }
    let mut rng = seeds::rng(seed);
    let eta = x * nalgebra::DVector::from_column_slice(&beta_star.beta);
    Ok(eta
        .iter()
        .map(|&e| {
            let pr = sigmoid(e + beta_star.intercept);
            if rng.random::<f64>() < pr {
                1.0
            } else {
                0.0
            }
        })
        .collect())
}

/// `n_lambda` equally spaced values on `[1e-4 lambda_max, lambda_max]` with
/// `lambda_max = 10 log(p) / n`.
pub fn default_grid(n: usize, p: usize, n_lambda: usize) -> Result<LambdaGrid> {
    grid_with(n, p, n_lambda, None, DEFAULT_LAMBDA_MIN_RATIO)
}

/// Linear grid with an optional explicit top value.
pub fn grid_with(
    n: usize,
    p: usize,
    n_lambda: usize,
    lambda_max: Option<f64>,
    min_ratio: f64,
) -> Result<LambdaGrid> {
    if n == 0 || p == 0 {
        return Err(Error::param("n, p", "must both be at least 1"));
    }
    if !(min_ratio > 0.0 && min_ratio <= 1.0) {
        return Err(Error::param("lambda_min_ratio", "must lie in (0, 1]"));
    }
    let top = lambda_max.unwrap_or(10.0 * (p as f64).ln() / n as f64);
    if !(top > 0.0 && top.is_finite()) {
        return Err(Error::param(
            "lambda_max",
            format!("top grid value must be positive, got {top} (p = 1 needs an explicit value)"),
        ));
    }
    LambdaGrid::linear(min_ratio * top, top, n_lambda)
}

/// False positives plus false negatives between two index sets.
pub fn hamming_distance(estimated: &[usize], truth: &[usize]) -> usize {
    let fp = estimated.iter().filter(|j| !truth.contains(j)).count();
    let fneg = truth.iter().filter(|j| !estimated.contains(j)).count();
    fp + fneg
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    pub n: usize,
    pub p: usize,
    pub kappa: f64,
    pub s: usize,
    pub n_lambda: usize,
    pub n_reps: usize,
    pub methods: Vec<Method>,
    pub constant_c: f64,
    pub seed: u64,
    pub folds: usize,
    #[serde(default)]
    pub lambda_max: Option<f64>,
    pub lambda_min_ratio: f64,
    /// Run replications sequentially and record wall-clock times. Outside
    /// timing mode no clock is read.
    pub timing_mode: bool,
    pub solver: SolverOptions,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        SimulationConfig {
            n: 200,
            p: 200,
            kappa: 0.5,
            s: 5,
            n_lambda: 500,
            n_reps: 200,
            methods: Method::ALL.to_vec(),
            constant_c: crate::calibration::DEFAULT_C,
            seed: 0,
            folds: 10,
            lambda_max: None,
            lambda_min_ratio: DEFAULT_LAMBDA_MIN_RATIO,
            timing_mode: false,
            solver: SolverOptions::default(),
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 || self.p == 0 {
            return Err(Error::param("n, p", "must both be at least 1"));
        }
        if !(0.0..1.0).contains(&self.kappa) {
            return Err(Error::param("kappa", "must lie in [0,1)"));
        }
        if self.s > self.p {
            return Err(Error::param("s", "must not exceed p"));
        }
        if self.n_lambda == 0 {
            return Err(Error::param("n_lambda", "must be at least 1"));
        }
        if self.n_reps == 0 {
            return Err(Error::param("n_reps", "must be at least 1"));
        }
        if self.methods.is_empty() {
            return Err(Error::param("methods", "at least one method is required"));
        }
        if self.constant_c.is_nan() || self.constant_c < 0.0 {
            return Err(Error::param("constant_c", "must be >= 0"));
        }
        if self.methods.contains(&Method::Cv) && (self.folds < 2 || self.folds > self.n) {
            return Err(Error::param("folds", "need 2 <= folds <= n"));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<LambdaGrid> {
        grid_with(
            self.n,
            self.p,
            self.n_lambda,
            self.lambda_max,
            self.lambda_min_ratio,
        )
    }
}

/// One simulated instance with its truth.
#[derive(Debug, Clone)]
pub struct Instance {
    pub data: Dataset,
    pub truth: Coefficients,
    pub support: Vec<usize>,
}

/// Draws replication `rep` of a configuration. Each replication has its own
/// seeds, so earlier replications never depend on later ones.
pub fn draw_instance(
    n: usize,
    p: usize,
    kappa: f64,
    s: usize,
    seed: u64,
    rep: u64,
) -> Result<Instance> {
    let x = generate_design(n, p, kappa, seeds::derive(seed, &[rep, stream::DESIGN]))?;
    let (truth, support) = generate_truth(p, s, seeds::derive(seed, &[rep, stream::TRUTH]))?;
    let y = generate_response(&x, &truth, seeds::derive(seed, &[rep, stream::RESPONSE]))?;
    Ok(Instance {
        data: Dataset::new(x, y)?,
        truth,
        support,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRecord {
    pub rep: usize,
    pub method: Method,
    pub lambda: Option<f64>,
    pub hamming: Option<usize>,
    pub support_size: Option<usize>,
    /// Wall-clock seconds of the selection, recorded in timing mode only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seconds: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub seconds_mean: f64,
    pub seconds_sd: f64,
    pub seconds_median: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: Method,
    pub hamming_mean: f64,
    pub hamming_sd: f64,
    pub model_size_mean: f64,
    pub replications: usize,
    pub failures: usize,
    /// Wall-clock figures, present in timing mode only.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub timing: Option<Timing>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub methods: Vec<MethodSummary>,
    pub records: Vec<ReplicationRecord>,
}

fn run_replication(
    cfg: &SimulationConfig,
    grid: &LambdaGrid,
    rep: usize,
) -> Vec<ReplicationRecord> {
    let instance = match draw_instance(cfg.n, cfg.p, cfg.kappa, cfg.s, cfg.seed, rep as u64) {
        Ok(i) => i,
        Err(e) => {
            return cfg
                .methods
                .iter()
                .map(|&method| ReplicationRecord {
                    rep,
                    method,
                    lambda: None,
                    hamming: None,
                    support_size: None,
                    seconds: None,
                    error: Some(e.to_string()),
                })
                .collect()
        }
    };
    let method_cfg = MethodConfig {
        constant_c: cfg.constant_c,
        folds: cfg.folds,
        cv_loss: baselines::CvLoss::Deviance,
        seed: seeds::derive(cfg.seed, &[rep as u64]),
        solver: cfg.solver,
    };
    cfg.methods
        .iter()
        .map(|&method| {
            let start = cfg.timing_mode.then(Instant::now);
            let outcome = baselines::select(&instance.data, grid, method, &method_cfg);
            let seconds = start.map(|t| t.elapsed().as_secs_f64());
            match outcome {
                Ok(o) => ReplicationRecord {
                    rep,
                    method,
                    lambda: Some(o.lambda),
                    hamming: Some(hamming_distance(&o.support, &instance.support)),
                    support_size: Some(o.support.len()),
                    seconds,
                    error: None,
                },
                Err(e) => ReplicationRecord {
                    rep,
                    method,
                    lambda: None,
                    hamming: None,
                    support_size: None,
                    seconds,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Runs every replication and method; failures are counted, not fatal.
pub fn run_experiment(cfg: &SimulationConfig) -> Result<ExperimentSummary> {
    cfg.validate()?;
    let grid = cfg.grid()?;
    let reps = 0..cfg.n_reps;

    let nested: Vec<Vec<ReplicationRecord>> = if cfg.timing_mode {
        reps.map(|r| run_replication(cfg, &grid, r)).collect()
    } else {
        #[cfg(feature = "parallel")]
        {
            use rayon::prelude::*;
            reps.into_par_iter()
                .map(|r| run_replication(cfg, &grid, r))
                .collect()
        }
        #[cfg(not(feature = "parallel"))]
        {
            reps.map(|r| run_replication(cfg, &grid, r)).collect()
        }
    };
    let records: Vec<ReplicationRecord> = nested.into_iter().flatten().collect();

    let methods = cfg
        .methods
        .iter()
        .map(|&method| {
            let mine: Vec<&ReplicationRecord> =
                records.iter().filter(|r| r.method == method).collect();
            let ok: Vec<&&ReplicationRecord> = mine.iter().filter(|r| r.error.is_none()).collect();
            let hamming: Vec<f64> = ok
                .iter()
                .filter_map(|r| r.hamming)
                .map(|h| h as f64)
                .collect();
            let sizes: Vec<f64> = ok
                .iter()
                .filter_map(|r| r.support_size)
                .map(|h| h as f64)
                .collect();
            let secs: Vec<f64> = ok.iter().filter_map(|r| r.seconds).collect();
            let (hamming_mean, hamming_sd) = mean_sd(&hamming);
            let timing = cfg.timing_mode.then(|| {
                let (seconds_mean, seconds_sd) = mean_sd(&secs);
                Timing {
                    seconds_mean,
                    seconds_sd,
                    seconds_median: median(&secs),
                }
            });
            MethodSummary {
                method,
                hamming_mean,
                hamming_sd,
                model_size_mean: mean_sd(&sizes).0,
                replications: ok.len(),
                failures: mine.len() - ok.len(),
                timing,
            }
        })
        .collect();
    Ok(ExperimentSummary { methods, records })
}
