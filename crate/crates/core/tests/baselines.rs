mod common;

use l1logit::baselines::{
    self, cv_folds, information_criterion, loocv_evaluate, refit_unpenalized,
    select_cross_validation, select_information_criterion, Criterion, CvLoss, Method, MethodConfig,
};
use l1logit::model::{gradient, predicted_probabilities};
use l1logit::solver::{fit_path, lambda_zero_threshold};
use l1logit::{Coefficients, Dataset, LambdaGrid, SolverOptions};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn grid_for(data: &Dataset, count: usize) -> LambdaGrid {
    let top = lambda_zero_threshold(data) * 1.01;
    LambdaGrid::linear(top * 0.02, top, count).unwrap()
}

/// `2 sum(log(1 + e^eta) - y eta) / m` by a direct loop.
fn deviance(x: &DMatrix<f64>, y: &[f64], beta: &[f64]) -> f64 {
    2.0 * common::loss(x, y, beta)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn bic_never_selects_more_than_aic(seed in 0u64..1_000_000) {
        let data = common::random_dataset(30, 12, 3, 1.0, seed);
        let path = fit_path(&data, &grid_for(&data, 15), &SolverOptions::default()).unwrap();
        let aic = select_information_criterion(&data, &path, Criterion::Aic).unwrap();
        let bic = select_information_criterion(&data, &path, Criterion::Bic).unwrap();
        prop_assert!(bic.support.len() <= aic.support.len());
    }

    #[test]
    fn folds_partition_the_samples(n in 2usize..300, k_raw in 2usize..20, seed in any::<u64>()) {
        let k = k_raw.min(n);
        let folds = cv_folds(n, k, seed).unwrap();
        prop_assert_eq!(folds.len(), k);
        let mut all: Vec<usize> = folds.iter().flatten().copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        let sizes: Vec<usize> = folds.iter().map(Vec::len).collect();
        prop_assert!(sizes.iter().max().unwrap() - sizes.iter().min().unwrap() <= 1);
    }
}

#[test]
fn criterion_table_by_enumeration() {
    let data = common::random_dataset(100, 10, 3, 1.0, 77);
    let path = fit_path(&data, &grid_for(&data, 30), &SolverOptions::default()).unwrap();
    for (kind, pen) in [(Criterion::Aic, 2.0), (Criterion::Bic, 100f64.ln())] {
        let table: Vec<f64> = path
            .points
            .iter()
            .map(|pt| {
                let df = pt.beta.beta.iter().filter(|&&b| b != 0.0).count() as f64;
                100.0 * deviance(data.x(), data.y(), &pt.beta.beta) + pen * df
            })
            .collect();
        let mut best = table.len() - 1;
        for k in (0..table.len()).rev() {
            if table[k] < table[best] - 1e-9 {
                best = k;
            }
        }
        let sel = select_information_criterion(&data, &path, kind).unwrap();
        assert_eq!(sel.lambda_index, best);
        for (a, b) in sel.score_trace.iter().zip(&table) {
            assert!((a - b).abs() <= 1e-9 * b.abs());
        }
    }
}

#[test]
fn equal_fit_prefers_fewer_coefficients() {
    let data = common::random_dataset(20, 5, 1, 1.0, 1);
    let three = Coefficients::new(vec![1e-300, 1e-300, 1e-300, 0.0, 0.0]);
    let five = Coefficients::new(vec![1e-300; 5]);
    for kind in [Criterion::Aic, Criterion::Bic] {
        assert!(
            information_criterion(&data, &three, kind).unwrap()
                < information_criterion(&data, &five, kind).unwrap()
        );
    }
}

#[test]
fn two_fold_cv_matches_hand_rolled_split() {
    let data = common::random_dataset(40, 8, 2, 1.5, 5);
    let grid = grid_for(&data, 12);
    let opts = SolverOptions::default();
    let folds = cv_folds(40, 2, 99).unwrap();
    let mut mean = vec![0.0; grid.len()];
    for fold in &folds {
        let train: Vec<usize> = (0..40).filter(|i| !fold.contains(i)).collect();
        let path = fit_path(&data.select_rows(&train).unwrap(), &grid, &opts).unwrap();
        let test = data.select_rows(fold).unwrap();
        for (k, pt) in path.points.iter().enumerate() {
            mean[k] += deviance(test.x(), test.y(), &pt.beta.beta) / 2.0;
        }
    }
    let sel = select_cross_validation(&data, &grid, 2, 99, CvLoss::Deviance, &opts).unwrap();
    for (a, b) in sel.score_trace.iter().zip(&mean) {
        assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0), "{a} vs {b}");
    }
    let again = select_cross_validation(&data, &grid, 2, 99, CvLoss::Deviance, &opts).unwrap();
    assert_eq!(sel, again);
}

#[test]
fn leave_one_out_partition_with_k_equal_n() {
    let folds = cv_folds(10, 10, 3).unwrap();
    assert!(folds.iter().all(|f| f.len() == 1));
}

#[test]
fn refit_solves_the_unpenalized_score_equations() {
    let data = common::random_dataset(200, 6, 3, 0.7, 12);
    let support = [0, 1, 2];
    let r = refit_unpenalized(&data, &support, false).unwrap();
    assert!(r.converged && !r.separation_suspect);
    let g = gradient(&data, &r.coefficients).unwrap();
    for &j in &support {
        assert!(g[j].abs() <= 1e-8, "{}", g[j]);
    }
    assert!(r.coefficients.beta[3..].iter().all(|&b| b == 0.0));
}

#[test]
fn refit_flags_separation() {
    let data = Dataset::from_row_slice(
        6,
        1,
        &[-3.0, -2.0, -1.0, 1.0, 2.0, 3.0],
        vec![0.0, 0.0, 0.0, 1.0, 1.0, 1.0],
    )
    .unwrap();
    assert!(
        refit_unpenalized(&data, &[0], false)
            .unwrap()
            .separation_suspect
    );
    let empty = refit_unpenalized(&data, &[], false).unwrap();
    assert_eq!(empty.coefficients, Coefficients::zeros(1));
}

#[test]
fn loocv_matches_scripted_loop() {
    let data = common::random_dataset(6, 3, 1, 2.0, 31);
    let grid = LambdaGrid::linear(0.01, 0.5, 10).unwrap();
    let cfg = MethodConfig::default();
    let report = loocv_evaluate(&data, &grid, Method::Bic, true, &cfg).unwrap();

    let mut sizes = Vec::new();
    let mut errors = Vec::new();
    let mut refit_errors = Vec::new();
    for i in 0..6 {
        let rows: Vec<usize> = (0..6).filter(|&r| r != i).collect();
        let train = data.select_rows(&rows).unwrap();
        let held = data.select_rows(&[i]).unwrap();
        let path = fit_path(&train, &grid, &cfg.solver).unwrap();
        let sel = select_information_criterion(&train, &path, Criterion::Bic).unwrap();
        let p = predicted_probabilities(&held, &sel.beta).unwrap()[0];
        errors.push(f64::from(baselines::classify(p) != held.y()[0]));
        sizes.push(sel.support.len() as f64);
        let r = refit_unpenalized(&train, &sel.support, false).unwrap();
        let p = predicted_probabilities(&held, &r.coefficients).unwrap()[0];
        refit_errors.push(f64::from(baselines::classify(p) != held.y()[0]));
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let sd = |v: &[f64]| {
        let m = mean(v);
        (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (v.len() - 1) as f64).sqrt()
    };
    assert_eq!(report.runs, 6);
    assert_eq!(report.failed, 0);
    assert!((report.model_size_mean - mean(&sizes)).abs() < 1e-12);
    assert!((report.model_size_sd - sd(&sizes)).abs() < 1e-12);
    assert!((report.loocv_error_mean - mean(&errors)).abs() < 1e-12);
    assert!((report.loocv_error_sd - sd(&errors)).abs() < 1e-12);
    assert!((report.loocv_refit_error_mean.unwrap() - mean(&refit_errors)).abs() < 1e-12);
}

#[test]
fn half_probability_counts_as_class_one() {
    // all-zero design: every prediction is exactly one half
    let data = Dataset::from_row_slice(5, 1, &[0.0; 5], vec![1.0, 0.0, 0.0, 1.0, 0.0]).unwrap();
    let grid = LambdaGrid::linear(0.1, 1.0, 3).unwrap();
    let report =
        loocv_evaluate(&data, &grid, Method::Aic, false, &MethodConfig::default()).unwrap();
    assert!((report.loocv_error_mean - 0.6).abs() < 1e-12);
}

#[test]
fn testing_on_pure_noise_selects_almost_nothing() {
    let mut total = 0usize;
    for seed in 0..20 {
        let data = common::random_dataset(100, 30, 0, 0.0, 1000 + seed);
        let grid = l1logit::simulation::default_grid(100, 30, 100).unwrap();
        let out =
            baselines::select(&data, &grid, Method::Testing, &MethodConfig::default()).unwrap();
        total += out.support.len();
    }
    let mean = total as f64 / 20.0;
    assert!(mean <= 1.0, "mean size {mean}");
}
