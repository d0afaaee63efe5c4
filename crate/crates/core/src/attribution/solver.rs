//! Projected-gradient solver for the box-and-simplex constrained QP
//!
//! ```text
//!     minimize    aᵀ Q a
//!     subject to  Σ a_i = 1,   −1 ≤ a_i ≤ 1
//! ```
//!
//! The projection onto the feasible set shifts all coordinates by a common
//! multiplier found by bisection and clips to the box. Gradient steps use
//! 1/(2·L) with L an upper spectral bound of Q, with Nesterov momentum and
//! function-value restarts layered on top so ill-conditioned covariance
//! matrices converge inside the iteration cap. Everything is deterministic.

use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use crate::linalg::{dot, matvec, spectral_bound};

pub const MAX_ITERATIONS: usize = 100_000;
pub const GRADIENT_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverStats {
    pub iterations: usize,
    pub projected_gradient_norm: f64,
    pub sum_residual: f64,
    pub max_box_violation: f64,
    pub converged: bool,
}

/// Euclidean projection onto `{a : Σa = 1, a ∈ [−1, 1]^m}`: clip a common
/// shift of the input, with the shift multiplier found by bisection.
pub fn project_capped_simplex(z: &[f64], out: &mut [f64]) {
    let m = z.len();
    debug_assert!(m >= 1, "projection needs at least one coordinate");
    let (zmin, zmax) = z
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
    // g(τ) = Σ clamp(z_i − τ, −1, 1) is non-increasing; bracket g(lo) ≥ 1 ≥ g(hi)
    let mut lo = zmin - 1.0;
    let mut hi = zmax + 1.0;
    let g = |tau: f64| -> f64 { z.iter().map(|&v| (v - tau).clamp(-1.0, 1.0)).sum() };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if g(mid) >= 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * (1.0 + lo.abs().max(hi.abs())) {
            break;
        }
    }
    let tau = 0.5 * (lo + hi);
    for (o, &v) in out.iter_mut().zip(z) {
        *o = (v - tau).clamp(-1.0, 1.0);
    }
    // bisection leaves a sub-ulp residual; spread it over interior coordinates
    let sum: f64 = out.iter().sum();
    let residual = 1.0 - sum;
    if residual != 0.0 {
        let interior: Vec<usize> = (0..m)
            .filter(|&i| out[i] > -1.0 + 1e-12 && out[i] < 1.0 - 1e-12)
            .collect();
        if !interior.is_empty() {
            let bump = residual / interior.len() as f64;
            for i in interior {
                out[i] = (out[i] + bump).clamp(-1.0, 1.0);
            }
        }
    }
}

/// Minimize aᵀQa over the capped simplex. Q must be symmetric PSD; the
/// caller guarantees strict positive definiteness for a unique minimizer.
pub fn solve_qp(q: ArrayView2<f64>) -> (Vec<f64>, f64, SolverStats) {
    let m = q.nrows();
    let lipschitz = spectral_bound(q);
    let eta = if lipschitz > 0.0 {
        1.0 / (2.0 * lipschitz)
    } else {
        1.0
    };

    let mut a = vec![1.0 / m as f64; m];
    let mut y = a.clone();
    let mut grad = vec![0.0; m];
    let mut trial = vec![0.0; m];
    let mut next = vec![0.0; m];
    let mut momentum = 1.0_f64;

    let objective = |g: &[f64], a: &[f64]| 0.5 * dot(g, a); // g = 2Qa

    matvec(q, &a, &mut grad);
    grad.iter_mut().for_each(|v| *v *= 2.0);
    let mut obj = objective(&grad, &a);
    let mut pg_norm = f64::INFINITY;
    let mut iterations = 0;

    while iterations < MAX_ITERATIONS {
        iterations += 1;

        // accelerated step from the extrapolated point
        matvec(q, &y, &mut grad);
        for i in 0..m {
            trial[i] = y[i] - eta * 2.0 * grad[i];
        }
        project_capped_simplex(&trial, &mut next);

        // stationarity is measured at the new iterate itself
        matvec(q, &next, &mut grad);
        grad.iter_mut().for_each(|v| *v *= 2.0);
        let next_obj = objective(&grad, &next);
        for i in 0..m {
            trial[i] = next[i] - eta * grad[i];
        }
        let mut mapped = vec![0.0; m];
        project_capped_simplex(&trial, &mut mapped);
        pg_norm = next
            .iter()
            .zip(&mapped)
            .map(|(a, b)| ((a - b) / eta).powi(2))
            .sum::<f64>()
            .sqrt();

        if next_obj > obj {
            // momentum overshot; restart from the current point
            momentum = 1.0;
            y.copy_from_slice(&next);
        } else {
            let momentum_next = 0.5 * (1.0 + (1.0 + 4.0 * momentum * momentum).sqrt());
            let beta = (momentum - 1.0) / momentum_next;
            for i in 0..m {
                y[i] = next[i] + beta * (next[i] - a[i]);
            }
            momentum = momentum_next;
        }
        a.copy_from_slice(&next);
        obj = next_obj;

        if pg_norm < GRADIENT_TOLERANCE {
            break;
        }
    }

    let sum_residual = (a.iter().sum::<f64>() - 1.0).abs();
    let max_box_violation = a
        .iter()
        .map(|v| (v.abs() - 1.0).max(0.0))
        .fold(0.0_f64, f64::max);
    let stats = SolverStats {
        iterations,
        projected_gradient_norm: pg_norm,
        sum_residual,
        max_box_violation,
        converged: pg_norm < GRADIENT_TOLERANCE,
    };
    (a, obj, stats)
}
