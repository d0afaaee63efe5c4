//! Linear SVM via stochastic subgradient descent on the hinge loss
//! (Pegasos-style schedule). The bias rides along as an implicit constant
//! feature.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ModelParams;

pub fn fit(xs: &[&[f64]], ys: &[f64], c: f64, epochs: usize, seed: u64) -> ModelParams {
    let n = xs.len();
    let dim = xs[0].len();
    let lambda = 1.0 / (c * n as f64);
    let mut weights = vec![0.0; dim];
    let mut bias = 0.0;
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t: u64 = 0;
    for _ in 0..epochs.max(1) {
        order.shuffle(&mut rng);
        for &i in &order {
            t += 1;
            let eta = 1.0 / (lambda * t as f64);
            let margin = ys[i] * (crate::linalg::dot(&weights, xs[i]) + bias);
            let shrink = 1.0 - eta * lambda;
            for w in weights.iter_mut() {
                *w *= shrink;
            }
            bias *= shrink;
            if margin < 1.0 {
                let step = eta * ys[i];
                for (w, &x) in weights.iter_mut().zip(xs[i]) {
                    *w += step * x;
                }
                bias += step;
            }
        }
    }
    ModelParams::Linear { weights, bias }
}
