//! Per-feature multiplicative perturbation and the scorer's response.
//!
//! For a base vector with `m` features and a step count `K`, the perturbed
//! set holds `K·m` vectors: entry `(i, k)` equals the base everywhere except
//! coordinate `i`, which is scaled by `α⁽ᵏ⁾ = k/(K−1)` for `k = 0..K`. The
//! response matrix collects the relative change of the scorer's
//! predicted-class probability on each perturbed point.

use ndarray::Array2;
use rayon::prelude::*;
use thiserror::Error;

use crate::corpus::{FeatureVector, Label};
use crate::models::{ModelError, Scorer};

/// Bases scoring below this are refused: the relative response ratio is
/// undefined at zero and wildly amplified near it.
pub const BASE_SCORE_FLOOR: f64 = 1e-6;

#[derive(Debug, Error)]
pub enum PerturbationError {
    #[error("k must be at least 2, got {0}")]
    KTooSmall(usize),
    #[error("scorer expects {expected} features, base has {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("degenerate base score {score:.3e} below floor {floor:.0e}")]
    DegenerateBaseScore { score: f64, floor: f64 },
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// The lazily-materialized `K × m` perturbation grid around one base vector.
#[derive(Debug, Clone)]
pub struct PerturbationSet {
    base: FeatureVector,
    alphas: Vec<f64>,
}

impl PerturbationSet {
    pub fn base(&self) -> &FeatureVector {
        &self.base
    }

    /// The shared scaling schedule, strictly increasing over `[0, 1]`.
    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn k(&self) -> usize {
        self.alphas.len()
    }

    pub fn num_features(&self) -> usize {
        self.base.len()
    }

    /// Total number of perturbed points, `K·m`.
    pub fn len(&self) -> usize {
        self.k() * self.num_features()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Materialize the perturbed vector for feature `i` at step `k`.
    pub fn vector_at(&self, feature: usize, step: usize) -> FeatureVector {
        let scaled = self.alphas[step] * self.base.value(feature);
        self.base.with_value_at(feature, scaled)
    }
}

/// Relative prediction-score changes, one row per feature, one column per
/// schedule step.
#[derive(Debug, Clone)]
pub struct ResponseMatrix {
    r: Array2<f64>,
    mu: Vec<f64>,
    base_score: f64,
    target_class: Label,
}

impl ResponseMatrix {
    pub fn ratios(&self) -> &Array2<f64> {
        &self.r
    }

    pub fn num_features(&self) -> usize {
        self.r.nrows()
    }

    pub fn k(&self) -> usize {
        self.r.ncols()
    }

    /// Per-feature mean response over the schedule.
    pub fn row_means(&self) -> &[f64] {
        &self.mu
    }

    pub fn base_score(&self) -> f64 {
        self.base_score
    }

    pub fn target_class(&self) -> Label {
        self.target_class
    }
}

/// Build the perturbation grid. The schedule includes both endpoints: α = 0
/// probes full ablation of a feature, α = 1 anchors the zero-change
/// reference.
pub fn perturb(base: &FeatureVector, k: usize) -> Result<PerturbationSet, PerturbationError> {
    if k < 2 {
        return Err(PerturbationError::KTooSmall(k));
    }
    let alphas: Vec<f64> = (0..k).map(|i| i as f64 / (k - 1) as f64).collect();
    Ok(PerturbationSet {
        base: base.clone(),
        alphas,
    })
}

/// Score every perturbed point and assemble the response matrix, using one
/// scorer for everything.
pub fn respond(
    pset: &PerturbationSet,
    scorer: &dyn Scorer,
    target_class: Option<Label>,
    batch_size: usize,
) -> Result<ResponseMatrix, PerturbationError> {
    respond_mixed(pset, scorer, scorer, target_class, batch_size)
}

/// Score perturbed points with `scorer` but take the reference score of the
/// base vector from `base_scorer`. This supports the surrogate workflow
/// where a distilled model scores the perturbations while the original
/// black box anchors the base prediction.
pub fn respond_mixed(
    pset: &PerturbationSet,
    scorer: &dyn Scorer,
    base_scorer: &dyn Scorer,
    target_class: Option<Label>,
    batch_size: usize,
) -> Result<ResponseMatrix, PerturbationError> {
    let m = pset.num_features();
    let k = pset.k();
    if scorer.num_features() != m {
        return Err(PerturbationError::DimensionMismatch {
            expected: scorer.num_features(),
            got: m,
        });
    }
    let base_scores = base_scorer.score(pset.base())?;
    let target = target_class.unwrap_or_else(|| base_scores.predicted());
    let base = base_scores.prob_of(target);
    if base < BASE_SCORE_FLOOR {
        return Err(PerturbationError::DegenerateBaseScore {
            score: base,
            floor: BASE_SCORE_FLOOR,
        });
    }
    let denom = base.max(BASE_SCORE_FLOOR);

    // zero-valued coordinates cannot move under multiplicative scaling, so
    // their rows are exactly zero; skip the scorer for them
    let active: Vec<usize> = (0..m).filter(|&i| pset.base().value(i) != 0.0).collect();
    let cells: Vec<(usize, usize)> = active
        .iter()
        .flat_map(|&i| (0..k).map(move |s| (i, s)))
        .collect();

    let batch = batch_size.max(1);
    let scored: Result<Vec<Vec<(usize, usize, f64)>>, PerturbationError> = cells
        .par_chunks(batch)
        .map(|chunk| {
            chunk
                .iter()
                .map(|&(i, s)| {
                    let x = pset.vector_at(i, s);
                    let scores = scorer.score(&x)?;
                    Ok((i, s, (scores.prob_of(target) - base) / denom))
                })
                .collect()
        })
        .collect();

    let mut r = Array2::<f64>::zeros((m, k));
    for (i, s, val) in scored?.into_iter().flatten() {
        r[[i, s]] = val;
    }
    let mu: Vec<f64> = (0..m)
        .map(|i| r.row(i).iter().sum::<f64>() / k as f64)
        .collect();
    Ok(ResponseMatrix {
        r,
        mu,
        base_score: base,
        target_class: target,
    })
}
