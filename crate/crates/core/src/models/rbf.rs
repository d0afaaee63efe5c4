//! RBF-kernel SVM trained by dual coordinate ascent on a dense kernel
//! matrix. The bias is absorbed by offsetting the kernel with a constant
//! (`K̃ = K + 1`), which leaves only box constraints on the dual and makes
//! single-coordinate updates exact. Desk-scale corpora keep `n²` affordable.

use ndarray::Array2;

use super::ModelParams;

pub fn kernel(a: &[f64], b: &[f64], gamma: f64) -> f64 {
    let mut dist = 0.0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        dist += d * d;
    }
    (-gamma * dist).exp()
}

pub fn fit(xs: &[&[f64]], ys: &[f64], c: f64, gamma: f64, max_passes: usize) -> ModelParams {
    let n = xs.len();
    let mut gram = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let k = kernel(xs[i], xs[j], gamma) + 1.0;
            gram[[i, j]] = k;
            gram[[j, i]] = k;
        }
    }

    let mut alpha = vec![0.0_f64; n];
    // u_i = Σ_j α_j y_j K̃_ij, maintained incrementally
    let mut u = vec![0.0_f64; n];
    for _ in 0..max_passes.max(1) {
        let mut max_delta = 0.0_f64;
        for i in 0..n {
            let grad = 1.0 - ys[i] * u[i];
            let next = (alpha[i] + grad / gram[[i, i]]).clamp(0.0, c);
            let delta = next - alpha[i];
            if delta.abs() > 1e-14 {
                alpha[i] = next;
                let dy = delta * ys[i];
                let row = gram.row(i);
                for (uj, k) in u.iter_mut().zip(row) {
                    *uj += dy * k;
                }
                max_delta = max_delta.max(delta.abs());
            }
        }
        if max_delta < 1e-8 {
            break;
        }
    }

    // the +1 kernel offset contributes Σ α_i y_i as an implicit bias
    let bias: f64 = alpha.iter().zip(ys).map(|(a, y)| a * y).sum();
    let mut support = Vec::new();
    let mut coeffs = Vec::new();
    for i in 0..n {
        if alpha[i] > 1e-10 {
            support.push(xs[i].to_vec());
            coeffs.push(alpha[i] * ys[i]);
        }
    }
    ModelParams::Rbf {
        support,
        coeffs,
        bias,
        gamma,
    }
}
