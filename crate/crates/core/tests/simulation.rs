use l1logit::baselines::Method;
use l1logit::simulation::{
    default_grid, draw_instance, generate_design, generate_response, generate_truth,
    hamming_distance, run_experiment, SimulationConfig,
};
use l1logit::Coefficients;
use nalgebra::DMatrix;
use proptest::prelude::*;

#[test]
fn design_moments_match_equicorrelation() {
    let n = 10_000;
    for kappa in [0.0, 0.5] {
        let x = generate_design(n, 4, kappa, 42).unwrap();
        for j in 0..4 {
            let col = x.column(j);
            let mean = col.mean();
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
            assert!(mean.abs() < 0.04, "mean {mean}");
            assert!((var - 1.0).abs() < 0.05, "var {var}");
        }
        for (a, b) in [(0, 1), (1, 3), (2, 3)] {
            let r = x.column(a).dot(&x.column(b)) / n as f64;
            assert!((r - kappa).abs() < 0.04, "kappa {kappa}: corr {r}");
        }
    }
}

#[test]
fn truth_signs_are_balanced() {
    let (mut plus, mut total) = (0usize, 0usize);
    for seed in 0..400 {
        let (beta, support) = generate_truth(50, 5, seed).unwrap();
        assert_eq!(support.len(), 5);
        assert!(support.windows(2).all(|w| w[0] < w[1]));
        for (j, &b) in beta.beta.iter().enumerate() {
            assert_eq!(b != 0.0, support.contains(&j));
            assert!(b == 0.0 || b.abs() == 1.0);
        }
        plus += support.iter().filter(|&&j| beta.beta[j] > 0.0).count();
        total += 5;
    }
    let frac = plus as f64 / total as f64;
    assert!((frac - 0.5).abs() < 0.05, "{frac}");
}

#[test]
fn null_truth_gives_fair_coins() {
    let x = DMatrix::from_element(10_000, 1, 1.0);
    let y = generate_response(&x, &Coefficients::zeros(1), 5).unwrap();
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    assert!(mean > 0.48 && mean < 0.52);
}

#[test]
fn huge_margin_gives_ones() {
    let x = DMatrix::from_element(1_000, 1, 20.0);
    let y = generate_response(&x, &Coefficients::new(vec![1.0]), 6).unwrap();
    assert!(y.iter().filter(|&&v| v == 1.0).count() >= 999);
}

#[test]
fn same_seed_same_instance() {
    let a = draw_instance(30, 10, 0.3, 2, 9, 4).unwrap();
    let b = draw_instance(30, 10, 0.3, 2, 9, 4).unwrap();
    assert_eq!(a.data, b.data);
    assert_eq!(a.truth, b.truth);
    let c = draw_instance(30, 10, 0.3, 2, 9, 5).unwrap();
    assert_ne!(a.data, c.data);
}

#[test]
fn grid_formula_and_spacing() {
    let g = default_grid(200, 200, 500).unwrap();
    assert!((g.max() - 10.0 * 200f64.ln() / 200.0).abs() < 1e-15);
    assert!((g.min() - 1e-4 * g.max()).abs() < 1e-18);
    let step = g.get(1) - g.get(0);
    for k in 1..g.len() {
        assert!(((g.get(k) - g.get(k - 1)) - step).abs() <= 1e-12 * step.max(1.0) + 1e-15);
    }
    let two = default_grid(200, 200, 2).unwrap();
    assert_eq!(two.values(), &[g.min(), g.max()]);
}

#[test]
fn replications_are_independent_of_thread_schedule() {
    let cfg = SimulationConfig {
        n: 40,
        p: 15,
        s: 2,
        n_lambda: 30,
        n_reps: 4,
        methods: vec![Method::Testing, Method::Bic],
        seed: 3,
        ..SimulationConfig::default()
    };
    let parallel = run_experiment(&cfg).unwrap();
    let serial = run_experiment(&SimulationConfig {
        timing_mode: true,
        ..cfg.clone()
    })
    .unwrap();
    let strip = |s: &l1logit::simulation::ExperimentSummary| {
        s.records
            .iter()
            .map(|r| (r.rep, r.method, r.lambda, r.hamming))
            .collect::<Vec<_>>()
    };
    assert_eq!(strip(&parallel), strip(&serial));
}

#[test]
fn support_recovery_without_correlation() {
    let cfg = SimulationConfig {
        n: 200,
        p: 50,
        kappa: 0.0,
        s: 3,
        n_lambda: 200,
        n_reps: 10,
        methods: vec![Method::Testing, Method::Bic],
        seed: 21,
        ..SimulationConfig::default()
    };
    let summary = run_experiment(&cfg).unwrap();
    let (testing, bic) = (&summary.methods[0], &summary.methods[1]);
    assert_eq!(testing.failures + bic.failures, 0);
    // independent predictors and unit signals: BIC beats the empty model
    // (Hamming s = 3) by a wide margin
    assert!(bic.hamming_mean <= 1.5, "bic: {}", bic.hamming_mean);
    // the threshold keeps testing conservative: never worse than the empty set
    // by more than a stray coordinate
    assert!(
        testing.model_size_mean <= 3.0,
        "{}",
        testing.model_size_mean
    );
    assert!(
        testing.hamming_mean <= 3.0 + 0.5,
        "testing: {}",
        testing.hamming_mean
    );
}

fn index_set(max: usize) -> impl Strategy<Value = Vec<usize>> {
    prop::collection::btree_set(0..max, 0..max).prop_map(|s| s.into_iter().collect())
}

proptest! {
    #[test]
    fn hamming_is_a_metric(a in index_set(30), b in index_set(30), c in index_set(30)) {
        prop_assert_eq!(hamming_distance(&a, &a), 0);
        prop_assert_eq!(hamming_distance(&a, &b), hamming_distance(&b, &a));
        prop_assert!(hamming_distance(&a, &c) <= hamming_distance(&a, &b) + hamming_distance(&b, &c));
        if a != b {
            prop_assert!(hamming_distance(&a, &b) > 0);
        }
    }

    #[test]
    fn hamming_against_empty_is_size(a in index_set(40)) {
        prop_assert_eq!(hamming_distance(&a, &[]), a.len());
    }
}
