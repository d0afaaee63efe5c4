//! Feature attribution by constrained variance minimization.
//!
//! The response rows of the perturbation stage are treated as correlated
//! random returns; their sample covariance `Q` (ridge-regularized so zero
//! rows never make it singular) feeds the program `min aᵀQa` over the
//! capped simplex `{Σa = 1, a ∈ [−1,1]^m}`. The minimizer is the
//! attribution vector, index-aligned with the vocabulary.

mod solver;

pub use solver::{project_capped_simplex, SolverStats, GRADIENT_TOLERANCE, MAX_ITERATIONS};

use ndarray::{Array2, ArrayView2};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{FeatureVector, Label};
use crate::models::Scorer;
use crate::perturbation::{perturb, respond_mixed, PerturbationError, ResponseMatrix};

#[derive(Debug, Error)]
pub enum AttributionError {
    #[error("singular covariance; increase lambda")]
    SingularCovariance,
    #[error(transparent)]
    Perturbation(#[from] PerturbationError),
    #[error("solver returned an infeasible attribution: {0}")]
    Infeasible(String),
}

/// Ridge-regularized sample covariance of the response rows.
#[derive(Debug, Clone)]
pub struct CovarianceMatrix {
    q: Array2<f64>,
    regularization: f64,
}

impl CovarianceMatrix {
    pub fn matrix(&self) -> ArrayView2<'_, f64> {
        self.q.view()
    }

    pub fn m(&self) -> usize {
        self.q.nrows()
    }

    pub fn regularization(&self) -> f64 {
        self.regularization
    }

    /// Build directly from a symmetric PSD matrix plus ridge (tests and
    /// solver probes).
    pub fn from_matrix(q: Array2<f64>, regularization: f64) -> CovarianceMatrix {
        assert_eq!(q.nrows(), q.ncols());
        CovarianceMatrix { q, regularization }
    }
}

/// Scale-aware default ridge: `1e-6 · trace(Q_raw)/m`, floored at `1e-9`.
pub fn default_lambda(raw_trace: f64, m: usize) -> f64 {
    if m == 0 {
        return 1e-9;
    }
    (1e-6 * raw_trace / m as f64).max(1e-9)
}

/// Sample covariance (normalized by `K−1`) of the response rows, pairing
/// entries by the shared schedule index, plus `lambda` on the diagonal.
pub fn covariance(r: &ResponseMatrix, lambda: f64) -> CovarianceMatrix {
    assert!(lambda >= 0.0, "lambda must be non-negative");
    assert!(r.k() >= 2, "covariance needs at least two schedule steps");
    let m = r.num_features();
    let k = r.k();
    let means = r.row_means();
    let mut q = Array2::<f64>::zeros((m, m));
    let ratios = r.ratios();
    for i in 0..m {
        for j in 0..=i {
            let mut acc = 0.0;
            for s in 0..k {
                acc += (ratios[[i, s]] - means[i]) * (ratios[[j, s]] - means[j]);
            }
            let cov = acc / (k - 1) as f64;
            q[[i, j]] = cov;
            q[[j, i]] = cov;
        }
    }
    for i in 0..m {
        q[[i, i]] += lambda;
    }
    CovarianceMatrix {
        q,
        regularization: lambda,
    }
}

/// The attribution vector: a feasible minimizer of `aᵀQa` together with the
/// achieved objective and solver diagnostics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttributionVector {
    a: Vec<f64>,
    objective: f64,
    stats: SolverStats,
}

impl AttributionVector {
    pub fn values(&self) -> &[f64] {
        &self.a
    }

    pub fn len(&self) -> usize {
        self.a.len()
    }

    pub fn is_empty(&self) -> bool {
        self.a.is_empty()
    }

    pub fn objective(&self) -> f64 {
        self.objective
    }

    pub fn stats(&self) -> &SolverStats {
        &self.stats
    }

    /// Indices ranked by (attribution desc, vocabulary index asc).
    pub fn ranking(&self) -> Vec<usize> {
        ranked_indices(&self.a)
    }
}

/// Stable ranking: descending by value, ascending index on ties.
pub fn ranked_indices(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&i, &j| values[j].total_cmp(&values[i]).then(i.cmp(&j)));
    idx
}

/// Solve the constrained minimum-variance program for a PD covariance.
pub fn solve_attribution(q: &CovarianceMatrix) -> Result<AttributionVector, AttributionError> {
    if q.m() == 0 {
        return Err(AttributionError::SingularCovariance);
    }
    // positive definiteness gate; zero regularization with degenerate
    // responses lands here
    if crate::linalg::cholesky(q.matrix()).is_none() {
        return Err(AttributionError::SingularCovariance);
    }
    let (a, objective, stats) = solver::solve_qp(q.matrix());
    if stats.sum_residual > 1e-8 || stats.max_box_violation > 1e-10 {
        return Err(AttributionError::Infeasible(format!(
            "sum residual {:.3e}, box violation {:.3e}",
            stats.sum_residual, stats.max_box_violation
        )));
    }
    Ok(AttributionVector {
        a,
        objective,
        stats,
    })
}

/// Best objective decrease achievable by any feasible pairwise transfer
/// `a_i += δ, a_j −= δ`. A (near-)optimal point returns ≈ 0; used as a
/// direct local-optimality probe for this constraint geometry.
pub fn pairwise_transfer_improvement(q: ArrayView2<f64>, a: &[f64], delta: f64) -> f64 {
    let m = a.len();
    let mut qa = vec![0.0; m];
    crate::linalg::matvec(q, a, &mut qa);
    let mut best = 0.0_f64;
    for i in 0..m {
        if a[i] + delta > 1.0 {
            continue;
        }
        for j in 0..m {
            if i == j || a[j] - delta < -1.0 {
                continue;
            }
            let change = 2.0 * delta * (qa[i] - qa[j])
                + delta * delta * (q[[i, i]] + q[[j, j]] - 2.0 * q[[i, j]]);
            if -change > best {
                best = -change;
            }
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExplainConfig {
    /// Perturbation steps per feature.
    pub k: usize,
    /// Ridge override; defaults to the scale-aware rule when unset.
    pub lambda: Option<f64>,
    /// Class whose probability drives the response; defaults to the
    /// predicted class of the base vector.
    pub target_class: Option<Label>,
    /// Scoring batch size (affects scheduling only, never results).
    pub batch_size: usize,
}

impl Default for ExplainConfig {
    fn default() -> Self {
        ExplainConfig {
            k: 50,
            lambda: None,
            target_class: None,
            batch_size: 256,
        }
    }
}

/// Full local explanation: perturb, collect responses, estimate covariance,
/// minimize variance.
pub fn explain(
    x: &FeatureVector,
    scorer: &dyn Scorer,
    config: &ExplainConfig,
) -> Result<AttributionVector, AttributionError> {
    explain_with_base_scorer(x, scorer, scorer, config)
}

/// Like [`explain`] but anchoring the base score on a separate scorer (the
/// teacher), while the perturbed points go through `scorer` (the surrogate).
pub fn explain_with_base_scorer(
    x: &FeatureVector,
    scorer: &dyn Scorer,
    base_scorer: &dyn Scorer,
    config: &ExplainConfig,
) -> Result<AttributionVector, AttributionError> {
    let pset = perturb(x, config.k)?;
    let response = respond_mixed(
        &pset,
        scorer,
        base_scorer,
        config.target_class,
        config.batch_size,
    )?;
    let raw_trace = {
        let k = response.k();
        let means = response.row_means();
        let ratios = response.ratios();
        (0..response.num_features())
            .map(|i| {
                (0..k)
                    .map(|s| (ratios[[i, s]] - means[i]).powi(2))
                    .sum::<f64>()
                    / (k - 1) as f64
            })
            .sum()
    };
    let lambda = config
        .lambda
        .unwrap_or_else(|| default_lambda(raw_trace, response.num_features()));
    let q = covariance(&response, lambda);
    solve_attribution(&q)
}
