//! Dense linear-algebra primitives shared by the solvers.
//!
//! Everything here is plain `f64` with deterministic evaluation order; no
//! BLAS/LAPACK backing, which keeps results bit-reproducible across machines.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2};

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// y = M·x for a square symmetric matrix stored densely.
pub fn matvec(m: ArrayView2<f64>, x: &[f64], y: &mut [f64]) {
    let n = x.len();
    debug_assert_eq!(m.nrows(), n);
    for i in 0..n {
        let row = m.row(i);
        let mut acc = 0.0;
        for j in 0..n {
            acc += row[j] * x[j];
        }
        y[i] = acc;
    }
}

/// Largest-eigenvalue upper estimate by power iteration. Deterministic start
/// vector; returns a value ≥ λ_max within a small safety factor for symmetric
/// PSD input, falling back to the Gershgorin-style `n · max_diag` bound when
/// iteration cannot make progress (e.g. the zero matrix).
pub fn spectral_bound(m: ArrayView2<f64>) -> f64 {
    let n = m.nrows();
    if n == 0 {
        return 0.0;
    }
    let max_diag = (0..n).map(|i| m[[i, i]]).fold(0.0_f64, f64::max);
    let fallback = (n as f64) * max_diag;
    if fallback == 0.0 {
        return 0.0;
    }
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 % 7.0) * 0.125).collect();
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let mut mv = vec![0.0; n];
    let mut lambda = 0.0_f64;
    for _ in 0..60 {
        matvec(m, &v, &mut mv);
        let next = dot(&v, &mv);
        let norm = dot(&mv, &mv).sqrt();
        if norm <= f64::MIN_POSITIVE {
            return fallback;
        }
        for (vi, mi) in v.iter_mut().zip(&mv) {
            *vi = mi / norm;
        }
        if (next - lambda).abs() <= 1e-10 * next.abs() {
            lambda = next;
            break;
        }
        lambda = next;
    }
    // power iteration approaches λ_max from below; pad, and never exceed the
    // coarse bound
    (lambda.abs() * 1.05).min(fallback).max(max_diag)
}

/// Solve A·x = b for symmetric positive definite A via Cholesky.
/// Returns `None` when a pivot collapses (A not PD to working precision).
pub fn cholesky_solve(a: ArrayView2<f64>, b: ArrayView1<f64>) -> Option<Array1<f64>> {
    let l = cholesky(a)?;
    let n = b.len();
    // forward substitution L·y = b
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut acc = b[i];
        for j in 0..i {
            acc -= l[[i, j]] * y[j];
        }
        y[i] = acc / l[[i, i]];
    }
    // back substitution Lᵀ·x = y
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut acc = y[i];
        for j in i + 1..n {
            acc -= l[[j, i]] * x[j];
        }
        x[i] = acc / l[[i, i]];
    }
    Some(Array1::from_vec(x))
}

/// Lower-triangular Cholesky factor of a symmetric PD matrix.
pub fn cholesky(a: ArrayView2<f64>) -> Option<Array2<f64>> {
    let n = a.nrows();
    let scale = (0..n).map(|i| a[[i, i]].abs()).fold(0.0_f64, f64::max);
    let mut l = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut acc = a[[i, j]];
            for k in 0..j {
                acc -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if acc <= scale * 1e-14 || !acc.is_finite() {
                    return None;
                }
                l[[i, j]] = acc.sqrt();
            } else {
                l[[i, j]] = acc / l[[j, j]];
            }
        }
    }
    Some(l)
}
