//! Independent reference implementations shared by the integration tests.
//! Nothing here calls into the solver.
#![allow(dead_code)]

use l1logit::Dataset;
use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// Gaussian design, sparse truth with `signal` on the first `s` columns,
/// Bernoulli responses. Retries until both classes appear.
pub fn random_dataset(n: usize, p: usize, s: usize, signal: f64, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    loop {
        let x = DMatrix::from_fn(n, p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let y: Vec<f64> = (0..n)
            .map(|i| {
                let eta: f64 = (0..s.min(p)).map(|j| signal * x[(i, j)]).sum();
                let pr = 1.0 / (1.0 + (-eta).exp());
                if rng.random::<f64>() < pr {
                    1.0
                } else {
                    0.0
                }
            })
            .collect();
        let ones = y.iter().filter(|&&v| v == 1.0).count();
        if ones > 0 && ones < n {
            return Dataset::new(x, y).unwrap();
        }
    }
}

/// Mean logistic loss by a plain double loop.
pub fn loss(x: &DMatrix<f64>, y: &[f64], beta: &[f64]) -> f64 {
    let (n, p) = x.shape();
    let mut total = 0.0;
    for i in 0..n {
        let mut eta = 0.0;
        for j in 0..p {
            eta += x[(i, j)] * beta[j];
        }
        let softplus = if eta > 0.0 {
            eta + (-eta).exp().ln_1p()
        } else {
            eta.exp().ln_1p()
        };
        total += softplus - y[i] * eta;
    }
    total / n as f64
}

pub fn loss_gradient(x: &DMatrix<f64>, y: &[f64], beta: &[f64]) -> Vec<f64> {
    let (n, p) = x.shape();
    let mut g = vec![0.0; p];
    for i in 0..n {
        let mut eta = 0.0;
        for j in 0..p {
            eta += x[(i, j)] * beta[j];
        }
        let r = 1.0 / (1.0 + (-eta).exp()) - y[i];
        for j in 0..p {
            g[j] += x[(i, j)] * r / n as f64;
        }
    }
    g
}

pub fn objective(x: &DMatrix<f64>, y: &[f64], beta: &[f64], lambda: f64) -> f64 {
    loss(x, y, beta) + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
}

fn prox(v: &[f64], t: f64) -> Vec<f64> {
    v.iter()
        .map(|&z| z.signum() * (z.abs() - t).max(0.0))
        .collect()
}

/// Accelerated proximal gradient with a fixed `1/L` step and gradient
/// restarts, run until the gradient-map norm drops below `tol`.
/// Returns the minimizer and the final gradient-map norm.
pub fn proximal_gradient(
    x: &DMatrix<f64>,
    y: &[f64],
    lambda: f64,
    tol: f64,
    max_iter: usize,
) -> (Vec<f64>, f64) {
    let (n, p) = x.shape();
    let gram = x.transpose() * x / n as f64;
    let top = SymmetricEigen::new(gram)
        .eigenvalues
        .iter()
        .fold(0.0_f64, |m, &v| m.max(v));
    let step = 4.0 / top;

    let mut beta = vec![0.0; p];
    let mut momentum = beta.clone();
    let mut theta = 1.0_f64;
    let mut map_norm = f64::INFINITY;
    for _ in 0..max_iter {
        let g = loss_gradient(x, y, &momentum);
        let shifted: Vec<f64> = momentum.iter().zip(&g).map(|(b, g)| b - step * g).collect();
        let next = prox(&shifted, step * lambda);

        // gradient map at the plain iterate certifies stationarity
        let g_plain = loss_gradient(x, y, &next);
        let shifted: Vec<f64> = next
            .iter()
            .zip(&g_plain)
            .map(|(b, g)| b - step * g)
            .collect();
        let probe = prox(&shifted, step * lambda);
        map_norm = next
            .iter()
            .zip(&probe)
            .map(|(a, b)| ((a - b) / step).abs())
            .fold(0.0, f64::max);
        if map_norm <= tol {
            return (next, map_norm);
        }

        let restart = momentum
            .iter()
            .zip(next.iter().zip(&beta))
            .map(|(m, (a, b))| (m - a) * (a - b))
            .sum::<f64>()
            > 0.0;
        let theta_next = if restart {
            1.0
        } else {
            (1.0 + (1.0 + 4.0 * theta * theta).sqrt()) / 2.0
        };
        let coef = if restart {
            0.0
        } else {
            (theta - 1.0) / theta_next
        };
        momentum = next
            .iter()
            .zip(&beta)
            .map(|(a, b)| a + coef * (a - b))
            .collect();
        beta = next;
        theta = theta_next;
    }
    (beta, map_norm)
}
