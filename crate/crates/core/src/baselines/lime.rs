//! Local linear surrogate on binary-masked neighbors.
//!
//! Present features of the instance are switched off in random subsets; the
//! scorer's predicted-class probability on each masked copy is regressed on
//! the mask bits with weights `exp(−d²/width²)` where `d` is the mask's
//! Hamming distance from the full instance. Ridge regularization keeps the
//! fit stable; coefficients for absent features are zero by definition.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::BaselineError;
use crate::corpus::FeatureVector;
use crate::models::Scorer;

#[derive(Debug, Clone, PartialEq)]
pub struct LimeConfig {
    pub num_samples: usize,
    /// Kernel width; defaults to `0.75·√m` when unset.
    pub kernel_width: Option<f64>,
    pub ridge: f64,
    pub seed: u64,
}

impl Default for LimeConfig {
    fn default() -> Self {
        LimeConfig {
            num_samples: 1000,
            kernel_width: None,
            ridge: 1e-3,
            seed: 0,
        }
    }
}

pub fn explain_lime_style(
    x: &FeatureVector,
    scorer: &dyn Scorer,
    config: &LimeConfig,
) -> Result<Vec<f64>, BaselineError> {
    let m = x.len();
    let present: Vec<usize> = (0..m).filter(|&i| x.value(i) > 0.0).collect();
    let p = present.len();
    if p == 0 {
        return Err(BaselineError::DegenerateInput(
            "instance has no present features".into(),
        ));
    }
    if config.num_samples < p + 2 {
        return Err(BaselineError::BudgetTooSmall {
            budget: config.num_samples,
            needed: p + 2,
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let n = config.num_samples;
    let mut masks: Vec<Vec<bool>> = Vec::with_capacity(n);
    masks.push(vec![true; p]); // anchor the unmasked instance
    for _ in 1..n {
        masks.push((0..p).map(|_| rng.random_bool(0.5)).collect());
    }
    if masks.iter().all(|mask| mask == &masks[0]) {
        return Err(BaselineError::SingularRegression(
            "all sampled masks identical".into(),
        ));
    }

    let target = scorer.score(x)?.predicted();
    let responses: Vec<f64> = masks
        .par_iter()
        .map(|mask| {
            let mut masked = x.clone();
            for (j, &keep) in mask.iter().enumerate() {
                if !keep {
                    masked = masked.with_value_at(present[j], 0.0);
                }
            }
            scorer.score(&masked).map(|s| s.prob_of(target))
        })
        .collect::<Result<_, _>>()?;

    let width = config
        .kernel_width
        .unwrap_or_else(|| 0.75 * (m as f64).sqrt());
    let width2 = (width * width).max(f64::MIN_POSITIVE);
    let weights: Vec<f64> = masks
        .iter()
        .map(|mask| {
            let d = mask.iter().filter(|keep| !**keep).count() as f64;
            (-d * d / width2).exp()
        })
        .collect();

    // weighted ridge over [intercept | mask bits]; intercept unpenalized
    let cols = p + 1;
    let mut ata = Array2::<f64>::zeros((cols, cols));
    let mut atb = Array1::<f64>::zeros(cols);
    let mut row = vec![0.0; cols];
    for ((mask, &w), &y) in masks.iter().zip(&weights).zip(&responses) {
        row[0] = 1.0;
        for (j, &keep) in mask.iter().enumerate() {
            row[j + 1] = if keep { 1.0 } else { 0.0 };
        }
        for a in 0..cols {
            let wa = w * row[a];
            if wa == 0.0 {
                continue;
            }
            for b in a..cols {
                ata[[a, b]] += wa * row[b];
            }
            atb[a] += wa * y;
        }
    }
    for a in 0..cols {
        for b in 0..a {
            ata[[a, b]] = ata[[b, a]];
        }
    }
    for j in 1..cols {
        ata[[j, j]] += config.ridge;
    }

    let beta = crate::linalg::cholesky_solve(ata.view(), atb.view()).ok_or_else(|| {
        BaselineError::SingularRegression("normal equations not positive definite".into())
    })?;

    let mut coefficients = vec![0.0; m];
    for (j, &i) in present.iter().enumerate() {
        coefficients[i] = beta[j + 1];
    }
    Ok(coefficients)
}
