//! Shapley-kernel weighted least squares with a zero-vector background.
//!
//! Coalitions over the instance's present features are scored with absent
//! members zeroed (absence semantics match TF-IDF zeros). The efficiency
//! constraint — values sum to `f(x) − f(0)` — is eliminated analytically, so
//! it holds exactly whatever the coalition sample. Small instances
//! enumerate every proper coalition, which reproduces exact Shapley values;
//! larger ones sample distinct coalitions under a seeded generator.

use ndarray::{Array1, Array2};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::BaselineError;
use crate::corpus::FeatureVector;
use crate::models::Scorer;

#[derive(Debug, Clone, PartialEq)]
pub struct KshapConfig {
    /// Coalition budget in sampled mode.
    pub budget: usize,
    /// Present-feature count up to which every coalition is enumerated.
    pub exact_limit: usize,
    pub seed: u64,
}

impl Default for KshapConfig {
    fn default() -> Self {
        KshapConfig {
            budget: 2048,
            exact_limit: 12,
            seed: 0,
        }
    }
}

fn n_choose_k(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0_f64;
    for i in 0..k {
        acc *= (n - i) as f64;
        acc /= (i + 1) as f64;
    }
    acc
}

/// Shapley kernel weight for a proper coalition of size `s` out of `p`.
fn kernel_weight(p: usize, s: usize) -> f64 {
    (p as f64 - 1.0) / (n_choose_k(p, s) * (s * (p - s)) as f64)
}

pub fn explain_kshap_style(
    x: &FeatureVector,
    scorer: &dyn Scorer,
    config: &KshapConfig,
) -> Result<Vec<f64>, BaselineError> {
    let m = x.len();
    let present: Vec<usize> = (0..m).filter(|&i| x.value(i) > 0.0).collect();
    let p = present.len();
    if p == 0 {
        return Err(BaselineError::DegenerateInput(
            "instance has no present features".into(),
        ));
    }

    let target = scorer.score(x)?.predicted();
    let f_x = scorer.score(x)?.prob_of(target);
    let zero = FeatureVector::from_values(vec![0.0; m], x.vocabulary_ref());
    let f_0 = scorer.score(&zero)?.prob_of(target);
    let diff = f_x - f_0;

    let mut values = vec![0.0; m];
    if p == 1 {
        values[present[0]] = diff;
        return Ok(values);
    }

    let total = if p < 64 { (1u64 << p) - 2 } else { u64::MAX };
    let exact = p <= config.exact_limit || u128::from(total) <= config.budget as u128;
    let coalitions: Vec<Vec<bool>> = if exact {
        (1..=total)
            .map(|bits| (0..p).map(|j| bits >> j & 1 == 1).collect())
            .filter(|z: &Vec<bool>| z.iter().any(|b| !b))
            .collect()
    } else {
        if config.budget < p + 2 {
            return Err(BaselineError::BudgetTooSmall {
                budget: config.budget,
                needed: p + 2,
            });
        }
        sample_coalitions(p, config.budget, config.seed)
    };

    let played: Vec<f64> = coalitions
        .par_iter()
        .map(|z| {
            let mut masked = x.clone();
            for (j, &on) in z.iter().enumerate() {
                if !on {
                    masked = masked.with_value_at(present[j], 0.0);
                }
            }
            scorer.score(&masked).map(|s| s.prob_of(target))
        })
        .collect::<Result<_, _>>()?;

    // eliminate the efficiency constraint: solve for the first p−1 values,
    // the last is diff − Σ others
    let cols = p - 1;
    let mut ata = Array2::<f64>::zeros((cols, cols));
    let mut atb = Array1::<f64>::zeros(cols);
    let mut row = vec![0.0; cols];
    for (z, &fz) in coalitions.iter().zip(&played) {
        let s = z.iter().filter(|b| **b).count();
        let w = kernel_weight(p, s);
        let z_last = if z[p - 1] { 1.0 } else { 0.0 };
        for j in 0..cols {
            row[j] = (if z[j] { 1.0 } else { 0.0 }) - z_last;
        }
        let y = fz - f_0 - z_last * diff;
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

    let beta = crate::linalg::cholesky_solve(ata.view(), atb.view()).ok_or_else(|| {
        BaselineError::SingularRegression(
            "coalition design does not span the feature space".into(),
        )
    })?;

    let mut leading_sum = 0.0;
    for j in 0..cols {
        values[present[j]] = beta[j];
        leading_sum += beta[j];
    }
    values[present[p - 1]] = diff - leading_sum;
    Ok(values)
}

/// Distinct proper coalitions: all singletons first, then their
/// complements, then seeded random subsets of intermediate sizes drawn from
/// the kernel's size distribution.
fn sample_coalitions(p: usize, budget: usize, seed: u64) -> Vec<Vec<bool>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = std::collections::HashSet::new();
    let mut out: Vec<Vec<bool>> = Vec::with_capacity(budget);

    let push = |z: Vec<bool>, seen: &mut std::collections::HashSet<Vec<bool>>,
                out: &mut Vec<Vec<bool>>| {
        if seen.insert(z.clone()) {
            out.push(z);
        }
    };

    for j in 0..p {
        if out.len() >= budget {
            return out;
        }
        let mut z = vec![false; p];
        z[j] = true;
        push(z, &mut seen, &mut out);
    }
    for j in 0..p {
        if out.len() >= budget {
            return out;
        }
        let mut z = vec![true; p];
        z[j] = false;
        push(z, &mut seen, &mut out);
    }

    // size distribution ∝ aggregated kernel mass (p−1)/(s(p−s))
    let sizes: Vec<usize> = (2..p.saturating_sub(1)).collect();
    if sizes.is_empty() {
        return out;
    }
    let mass: Vec<f64> = sizes
        .iter()
        .map(|&s| (p as f64 - 1.0) / ((s * (p - s)) as f64))
        .collect();
    let mass_total: f64 = mass.iter().sum();

    let mut tries = 0usize;
    let max_tries = budget.saturating_mul(30);
    while out.len() < budget && tries < max_tries {
        tries += 1;
        let mut pick = rng.random_range(0.0..mass_total);
        let mut s = sizes[0];
        for (&size, &w) in sizes.iter().zip(&mass) {
            if pick < w {
                s = size;
                break;
            }
            pick -= w;
        }
        let mut z = vec![false; p];
        let mut remaining = s;
        while remaining > 0 {
            let j = rng.random_range(0..p);
            if !z[j] {
                z[j] = true;
                remaining -= 1;
            }
        }
        push(z, &mut seen, &mut out);
    }
    out
}
