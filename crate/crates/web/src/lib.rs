//! WebAssembly bindings for the browser demo. Each export takes plain
//! numbers and returns a JSON string; the `*_json` twins do the work and are
//! callable natively.

use l1logit::baselines::Method;
use l1logit::calibration::validation::{estimate_oracle_lambda, OracleRequest};
use l1logit::calibration::{self, DEFAULT_C};
use l1logit::simulation::{self, draw_instance, hamming_distance, SimulationConfig};
use l1logit::{diagnostics, seeds, solver, LambdaGrid, SolverOptions};
use serde::Serialize;
use wasm_bindgen::prelude::*;

type Out = Result<String, String>;

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

/// Largest number of coefficient curves sent back for plotting.
const MAX_CURVES: usize = 25;

#[derive(Serialize)]
struct Curve {
    /// 1-based predictor index.
    index: usize,
    in_truth: bool,
    values: Vec<f64>,
}

#[derive(Serialize)]
struct PathReport {
    lambdas: Vec<f64>,
    curves: Vec<Curve>,
    /// Test statistic per scanned grid value, largest lambda first.
    trace: Vec<(f64, f64)>,
    lambda_hat: f64,
    threshold: f64,
    support_hat: Vec<usize>,
    support_true: Vec<usize>,
    hamming: usize,
}

/// Draws one instance, fits its path and calibrates it.
pub fn calibration_path_json(
    n: usize,
    p: usize,
    kappa: f64,
    s: usize,
    seed: u64,
    constant_c: f64,
    n_lambda: usize,
) -> Out {
    let inst = draw_instance(n, p, kappa, s, seed, 0).map_err(err)?;
    let grid = simulation::default_grid(n, p, n_lambda).map_err(err)?;
    let path = solver::fit_path(&inst.data, &grid, &SolverOptions::default()).map_err(err)?;
    let res = calibration::result_from_path(&path, constant_c).map_err(err)?;

    let peak = |j: usize| {
        path.points
            .iter()
            .map(|pt| pt.beta.beta[j].abs())
            .fold(0.0_f64, f64::max)
    };
    let mut order: Vec<usize> = (0..p).filter(|&j| peak(j) > 0.0).collect();
    order.sort_by(|&a, &b| peak(b).total_cmp(&peak(a)));
    order.truncate(MAX_CURVES);
    order.sort_unstable();
    let curves = order
        .into_iter()
        .map(|j| Curve {
            index: j + 1,
            in_truth: inst.support.contains(&j),
            values: path.points.iter().map(|pt| pt.beta.beta[j]).collect(),
        })
        .collect();
    let report = PathReport {
        lambdas: grid.values().to_vec(),
        curves,
        trace: res
            .test_trace
            .iter()
            .map(|r| (r.lambda, r.statistic))
            .collect(),
        lambda_hat: res.lambda_hat,
        threshold: 3.0 * constant_c * res.lambda_hat,
        hamming: hamming_distance(&res.support_hat, &inst.support),
        support_hat: res.support_hat.iter().map(|j| j + 1).collect(),
        support_true: inst.support.iter().map(|j| j + 1).collect(),
    };
    serde_json::to_string(&report).map_err(err)
}

/// Mean Hamming distance and model size per method over `reps` instances.
pub fn compare_methods_json(
    n: usize,
    p: usize,
    kappa: f64,
    s: usize,
    reps: usize,
    seed: u64,
    n_lambda: usize,
) -> Out {
    let cfg = SimulationConfig {
        n,
        p,
        kappa,
        s,
        n_lambda,
        n_reps: reps,
        methods: Method::ALL.to_vec(),
        seed,
        folds: 5.min(n),
        ..SimulationConfig::default()
    };
    cfg.validate().map_err(err)?;
    let summary = simulation::run_experiment(&cfg).map_err(err)?;
    serde_json::to_string(&summary.methods).map_err(err)
}

#[derive(Serialize)]
struct CoverageReport {
    lambdas: Vec<f64>,
    coverage: Vec<f64>,
    lambda_star: f64,
    lambda_hat: f64,
    gamma: f64,
}

/// Monte-Carlo coverage of the noise event against the selected value.
pub fn oracle_coverage_json(
    n: usize,
    p: usize,
    s: usize,
    seed: u64,
    draws: usize,
    delta: f64,
) -> Out {
    let inst = draw_instance(n, p, 0.0, s, seed, 0).map_err(err)?;
    let diag = diagnostics::assumption_quantities(inst.data.x(), &inst.truth, &inst.support)
        .map_err(err)?;
    let gamma = diag
        .gamma
        .filter(|g| *g > 0.0 && *g <= 1.0)
        .ok_or("the irrepresentability margin is not positive for this instance")?;
    let default_grid = simulation::default_grid(n, p, 300).map_err(err)?;
    let cal = calibration::calibrate(
        &inst.data,
        &default_grid,
        DEFAULT_C,
        &SolverOptions::default(),
    )
    .map_err(err)?;
    let top = 20.0 * default_grid.max();
    let grid = LambdaGrid::linear(top / 400.0, top, 400).map_err(err)?;
    let request = OracleRequest {
        delta,
        n_draws: draws,
        gamma,
        truth: inst.truth,
    };
    let seed = seeds::derive(seed, &[seeds::stream::ORACLE_DRAW]);
    let est = estimate_oracle_lambda(inst.data.x(), &request, &grid, seed).map_err(err)?;
    let report = CoverageReport {
        lambdas: grid.values().to_vec(),
        coverage: est.coverage,
        lambda_star: est.lambda_star,
        lambda_hat: cal.lambda_hat,
        gamma,
    };
    serde_json::to_string(&report).map_err(err)
}

fn js(out: Out) -> Result<String, JsError> {
    out.map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn calibration_path(
    n: usize,
    p: usize,
    kappa: f64,
    s: usize,
    seed: u32,
    constant_c: f64,
    n_lambda: usize,
) -> Result<String, JsError> {
    js(calibration_path_json(
        n,
        p,
        kappa,
        s,
        seed as u64,
        constant_c,
        n_lambda,
    ))
}

#[wasm_bindgen]
pub fn compare_methods(
    n: usize,
    p: usize,
    kappa: f64,
    s: usize,
    reps: usize,
    seed: u32,
    n_lambda: usize,
) -> Result<String, JsError> {
    js(compare_methods_json(
        n,
        p,
        kappa,
        s,
        reps,
        seed as u64,
        n_lambda,
    ))
}

#[wasm_bindgen]
pub fn oracle_coverage(
    n: usize,
    p: usize,
    s: usize,
    seed: u32,
    draws: usize,
    delta: f64,
) -> Result<String, JsError> {
    js(oracle_coverage_json(n, p, s, seed as u64, draws, delta))
}
