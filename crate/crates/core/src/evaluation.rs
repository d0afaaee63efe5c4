//! Quantitative harness for explanation quality.
//!
//! Three probes: the good-explanation metric over adversarial candidates
//! (what fraction of camouflage tokens received positive attribution, swept
//! over tolerance thresholds), a functional breakdown of that metric by
//! prediction-score and activated-count bins, and fidelity curves that
//! remove top-attributed features from a sample (deduction) or graft them
//! into an opposite-class sample (augmentation) and watch the predictions.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::adversarial::AdversarialCandidate;
use crate::attribution::ranked_indices;
use crate::corpus::{FeatureVector, Label, Vocabulary};
use crate::explainers::{Explainer, ExplainerError};
use crate::models::{ModelError, Scorer};

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("candidate has zero activated tokens")]
    NoActivatedTokens,
    #[error("activated token {0:?} not in vocabulary")]
    TokenNotInVocabulary(String),
    #[error("attribution length {got} does not match feature count {expected}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("empty {0} set")]
    EmptySet(&'static str),
    #[error("malware and benign sets overlap")]
    OverlappingSets,
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Explainer(#[from] ExplainerError),
}

/// Map a candidate's activated tokens to vocabulary indices.
pub fn activated_indices(
    candidate: &AdversarialCandidate,
    vocab: &Vocabulary,
) -> Result<Vec<usize>, EvalError> {
    candidate
        .activated
        .iter()
        .map(|t| {
            vocab
                .index_of(t)
                .ok_or_else(|| EvalError::TokenNotInVocabulary(t.to_string()))
        })
        .collect()
}

/// An adversarial candidate joined with an attribution over the same index
/// space, ready for metric computation.
#[derive(Debug, Clone, PartialEq)]
pub struct ExplainedCandidate {
    pub activated_indices: Vec<usize>,
    pub attribution: Vec<f64>,
    /// Benign probability under the explained scorer.
    pub benign_score: f64,
}

/// True iff strictly more than `threshold` of the activated features carry
/// positive attribution.
pub fn good_explanation(
    activated: &[usize],
    attribution: &[f64],
    threshold: f64,
) -> Result<bool, EvalError> {
    if activated.is_empty() {
        return Err(EvalError::NoActivatedTokens);
    }
    if let Some(&bad) = activated.iter().find(|&&i| i >= attribution.len()) {
        return Err(EvalError::LengthMismatch {
            expected: bad + 1,
            got: attribution.len(),
        });
    }
    let positive = activated.iter().filter(|&&i| attribution[i] > 0.0).count();
    Ok(positive as f64 / activated.len() as f64 > threshold)
}

pub const GOOD_THRESHOLDS: [f64; 10] = [0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoodExplanationResult {
    pub thresholds: Vec<f64>,
    /// Fraction of candidates counted good at each threshold;
    /// non-increasing by construction.
    pub fractions: Vec<f64>,
    /// Per-candidate (activated count, positively-attributed count).
    pub details: Vec<(usize, usize)>,
}

pub fn sweep_good_explanation(
    items: &[ExplainedCandidate],
) -> Result<GoodExplanationResult, EvalError> {
    let mut details = Vec::with_capacity(items.len());
    for item in items {
        if item.activated_indices.is_empty() {
            return Err(EvalError::NoActivatedTokens);
        }
        if let Some(&bad) = item
            .activated_indices
            .iter()
            .find(|&&i| i >= item.attribution.len())
        {
            return Err(EvalError::LengthMismatch {
                expected: bad + 1,
                got: item.attribution.len(),
            });
        }
        let positive = item
            .activated_indices
            .iter()
            .filter(|&&i| item.attribution[i] > 0.0)
            .count();
        details.push((item.activated_indices.len(), positive));
    }
    let fractions = GOOD_THRESHOLDS
        .iter()
        .map(|&thr| {
            if details.is_empty() {
                return 0.0;
            }
            let good = details
                .iter()
                .filter(|(total, positive)| *positive as f64 / *total as f64 > thr)
                .count();
            good as f64 / details.len() as f64
        })
        .collect();
    Ok(GoodExplanationResult {
        thresholds: GOOD_THRESHOLDS.to_vec(),
        fractions,
        details,
    })
}

pub const SCORE_BIN_LABELS: [&str; 5] =
    ["(0.5,0.6]", "(0.6,0.7]", "(0.7,0.8]", "(0.8,0.9]", "(0.9,1.0]"];
pub const COUNT_BIN_LABELS: [&str; 3] = ["(0,30]", "(30,50]", "50+"];

fn count_bin(activated: usize) -> usize {
    if activated <= 30 {
        0
    } else if activated <= 50 {
        1
    } else {
        2
    }
}

/// Good-explanation fractions broken down by benign-score interval (rows)
/// and activated-feature count (columns). Empty cells are `None`, never 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalBins {
    pub good_threshold: f64,
    pub cells: [[Option<f64>; 3]; 5],
    pub populations: [[usize; 3]; 5],
}

pub fn functional_analysis(
    items: &[ExplainedCandidate],
    good_threshold: f64,
) -> Result<FunctionalBins, EvalError> {
    let mut good = [[0usize; 3]; 5];
    let mut populations = [[0usize; 3]; 5];
    for item in items {
        let Some(row) = crate::adversarial::score_bin(item.benign_score) else {
            continue;
        };
        let col = count_bin(item.activated_indices.len());
        populations[row][col] += 1;
        if good_explanation(&item.activated_indices, &item.attribution, good_threshold)? {
            good[row][col] += 1;
        }
    }
    let mut cells = [[None; 3]; 5];
    for row in 0..5 {
        for col in 0..3 {
            if populations[row][col] > 0 {
                cells[row][col] = Some(good[row][col] as f64 / populations[row][col] as f64);
            }
        }
    }
    Ok(FunctionalBins {
        good_threshold,
        cells,
        populations,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FidelityMode {
    Deduction,
    Augmentation,
}

/// PCR per manipulated-feature count. For deduction, PCR is the fraction of
/// samples keeping their own class (lower is better); for augmentation, the
/// fraction of recipients flipped to the source class (higher is better).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityCurve {
    pub mode: FidelityMode,
    pub method: String,
    pub ns: Vec<usize>,
    pub pcr: Vec<f64>,
}

/// Zero out each sample's top-n attributed features and rescore. Samples
/// the scorer misclassifies up front are excluded, so PCR at n = 0 is 1.
pub fn deduction_test(
    dataset: &[(FeatureVector, Label)],
    scorer: &dyn Scorer,
    explainer: &dyn Explainer,
    max_features: usize,
) -> Result<FidelityCurve, EvalError> {
    if dataset.is_empty() {
        return Err(EvalError::EmptySet("dataset"));
    }
    let mut kept: Vec<&(FeatureVector, Label)> = Vec::new();
    for pair in dataset {
        if scorer.score(&pair.0)?.predicted() == pair.1 {
            kept.push(pair);
        }
    }
    if kept.is_empty() {
        return Err(EvalError::EmptySet("correctly-classified dataset"));
    }
    let m = kept[0].0.len();
    let max_n = max_features.min(m);

    let rankings: Vec<(usize, Vec<usize>)> = kept
        .par_iter()
        .enumerate()
        .map(|(idx, (x, _))| {
            let attribution = explainer.attribute(x, scorer)?;
            Ok((idx, ranked_indices(&attribution)))
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    let mut ordered = rankings;
    ordered.sort_by_key(|(idx, _)| *idx);

    let mut ns = Vec::with_capacity(max_n + 1);
    let mut pcr = Vec::with_capacity(max_n + 1);
    for n in 0..=max_n {
        let retained: usize = ordered
            .par_iter()
            .map(|(idx, ranking)| {
                let (x, label) = kept[*idx];
                let mut manipulated = x.clone();
                for &feat in ranking.iter().take(n) {
                    manipulated = manipulated.with_value_at(feat, 0.0);
                }
                let predicted = scorer.score(&manipulated)?.predicted();
                Ok(usize::from(predicted == *label))
            })
            .sum::<Result<usize, EvalError>>()?;
        ns.push(n);
        pcr.push(retained as f64 / ordered.len() as f64);
    }
    Ok(FidelityCurve {
        mode: FidelityMode::Deduction,
        method: explainer.name().to_string(),
        ns,
        pcr,
    })
}

/// Copy each malware sample's top-n attributed feature values into a paired
/// benign sample (source value overwrites) and rescore the recipient. PCR is
/// the fraction of recipients classified as malware. Only malware samples
/// the scorer actually detects act as sources; recipients are not filtered,
/// so PCR at n = 0 is the benign set's baseline false-positive rate.
pub fn augmentation_test(
    malware: &[FeatureVector],
    benign: &[FeatureVector],
    scorer: &dyn Scorer,
    explainer: &dyn Explainer,
    max_features: usize,
) -> Result<FidelityCurve, EvalError> {
    if malware.is_empty() {
        return Err(EvalError::EmptySet("malware"));
    }
    if benign.is_empty() {
        return Err(EvalError::EmptySet("benign"));
    }
    if malware.iter().any(|m| benign.iter().any(|b| b == m)) {
        return Err(EvalError::OverlappingSets);
    }
    let mut sources: Vec<&FeatureVector> = Vec::new();
    for x in malware {
        if scorer.score(x)?.predicted() == Label::Malware {
            sources.push(x);
        }
    }
    if sources.is_empty() {
        return Err(EvalError::EmptySet("detected-malware"));
    }
    let m = sources[0].len();
    let max_n = max_features.min(m);

    let rankings: Vec<(usize, Vec<usize>)> = sources
        .par_iter()
        .enumerate()
        .map(|(idx, x)| {
            let attribution = explainer.attribute(x, scorer)?;
            Ok((idx, ranked_indices(&attribution)))
        })
        .collect::<Result<Vec<_>, EvalError>>()?;
    let mut ordered = rankings;
    ordered.sort_by_key(|(idx, _)| *idx);

    let mut ns = Vec::with_capacity(max_n + 1);
    let mut pcr = Vec::with_capacity(max_n + 1);
    for n in 0..=max_n {
        let flipped: usize = ordered
            .par_iter()
            .map(|(idx, ranking)| {
                let source = sources[*idx];
                let recipient = &benign[*idx % benign.len()];
                let mut grafted = recipient.clone();
                for &feat in ranking.iter().take(n) {
                    grafted = grafted.with_value_at(feat, source.value(feat));
                }
                let predicted = scorer.score(&grafted)?.predicted();
                Ok(usize::from(predicted == Label::Malware))
            })
            .sum::<Result<usize, EvalError>>()?;
        ns.push(n);
        pcr.push(flipped as f64 / ordered.len() as f64);
    }
    Ok(FidelityCurve {
        mode: FidelityMode::Augmentation,
        method: explainer.name().to_string(),
        ns,
        pcr,
    })
}

/// Confusion-matrix summary with malware as the positive class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassificationReport {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub mcc: Option<f64>,
    pub mcc_reason: Option<String>,
}

pub fn classify_metrics(
    scorer: &dyn Scorer,
    dataset: &[(FeatureVector, Label)],
) -> Result<ClassificationReport, EvalError> {
    if dataset.is_empty() {
        return Err(EvalError::EmptySet("dataset"));
    }
    let (mut tp, mut fp, mut tn, mut fn_) = (0usize, 0usize, 0usize, 0usize);
    for (x, label) in dataset {
        let predicted = scorer.score(x)?.predicted();
        match (label, predicted) {
            (Label::Malware, Label::Malware) => tp += 1,
            (Label::Malware, Label::Benign) => fn_ += 1,
            (Label::Benign, Label::Malware) => fp += 1,
            (Label::Benign, Label::Benign) => tn += 1,
        }
    }
    let ratio = |num: usize, den: usize| {
        if den == 0 {
            None
        } else {
            Some(num as f64 / den as f64)
        }
    };
    let tpr = ratio(tp, tp + fn_);
    let fpr = ratio(fp, fp + tn);
    let (mcc, mcc_reason) = if tp + fn_ == 0 || fp + tn == 0 {
        (None, Some("single-class corpus".to_string()))
    } else {
        let denom = ((tp + fp) as f64 * (tp + fn_) as f64 * (tn + fp) as f64 * (tn + fn_) as f64)
            .sqrt();
        if denom == 0.0 {
            // degenerate predictions on a two-class corpus: no skill
            (Some(0.0), None)
        } else {
            let num = (tp * tn) as f64 - (fp * fn_) as f64;
            (Some(num / denom), None)
        }
    };
    Ok(ClassificationReport {
        tp,
        fp,
        tn,
        fn_,
        tpr,
        fpr,
        mcc,
        mcc_reason,
    })
}

/// Spearman rank correlation; `None` when either side has zero rank
/// variance.
pub fn spearman(a: &[f64], b: &[f64]) -> Option<f64> {
    assert_eq!(a.len(), b.len());
    let n = a.len();
    if n < 2 {
        return None;
    }
    let rank = |v: &[f64]| -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&i, &j| v[i].total_cmp(&v[j]));
        let mut ranks = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                ranks[k] = avg;
            }
            i = j + 1;
        }
        ranks
    };
    let ra = rank(a);
    let rb = rank(b);
    let mean = (n as f64 + 1.0) / 2.0;
    let mut cov = 0.0;
    let mut var_a = 0.0;
    let mut var_b = 0.0;
    for i in 0..n {
        let da = ra[i] - mean;
        let db = rb[i] - mean;
        cov += da * db;
        var_a += da * da;
        var_b += db * db;
    }
    if var_a == 0.0 || var_b == 0.0 {
        return None;
    }
    Some(cov / (var_a.sqrt() * var_b.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::test_scorers::{ClampedLinearScorer, ConstantScorer};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn fv(values: Vec<f64>) -> FeatureVector {
        FeatureVector::from_values(values, 0)
    }

    #[test]
    fn good_explanation_counting_rule() {
        // all positive at a high bar
        let attribution = vec![0.2, 0.1, 0.3, 0.05, 0.4];
        assert!(good_explanation(&[0, 1, 2, 3, 4], &attribution, 0.9).unwrap());
        // 2 of 5 positive is not > 0.5
        let attribution = vec![0.2, 0.1, -0.3, -0.05, -0.4];
        assert!(!good_explanation(&[0, 1, 2, 3, 4], &attribution, 0.5).unwrap());
        // exactly at the threshold is not good (strict >)
        let attribution = vec![0.2, -0.1];
        assert!(!good_explanation(&[0, 1], &attribution, 0.5).unwrap());
        assert!(matches!(
            good_explanation(&[], &attribution, 0.1),
            Err(EvalError::NoActivatedTokens)
        ));
    }

    fn random_items(seed: u64, n: usize) -> Vec<ExplainedCandidate> {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                let m = rng.random_range(1..80);
                let attribution: Vec<f64> =
                    (0..m).map(|_| rng.random_range(-1.0..1.0)).collect();
                let count = rng.random_range(1..=m);
                let mut indices: Vec<usize> = (0..m).collect();
                use rand::seq::SliceRandom;
                indices.shuffle(&mut rng);
                indices.truncate(count);
                ExplainedCandidate {
                    activated_indices: indices,
                    attribution,
                    benign_score: rng.random_range(0.5001..1.0),
                }
            })
            .collect()
    }

    #[test]
    fn sweep_is_all_ones_for_all_positive_attributions() {
        let items = vec![ExplainedCandidate {
            activated_indices: vec![0, 1, 2],
            attribution: vec![0.5, 0.2, 0.1],
            benign_score: 0.7,
        }];
        let result = sweep_good_explanation(&items).unwrap();
        for f in &result.fractions {
            assert_eq!(*f, 1.0);
        }
    }

    proptest! {
        #[test]
        fn sweep_is_monotone_non_increasing(seed in 0u64..300) {
            let items = random_items(seed, 40);
            let result = sweep_good_explanation(&items).unwrap();
            for w in result.fractions.windows(2) {
                prop_assert!(w[1] <= w[0] + 1e-12);
            }
        }

        #[test]
        fn sweep_agrees_with_naive_recount(seed in 300u64..450) {
            let items = random_items(seed, 25);
            let result = sweep_good_explanation(&items).unwrap();
            for (t, &thr) in GOOD_THRESHOLDS.iter().enumerate() {
                let naive = items.iter().filter(|it| {
                    let pos = it.activated_indices.iter()
                        .filter(|&&i| it.attribution[i] > 0.0)
                        .count();
                    pos as f64 / it.activated_indices.len() as f64 > thr
                }).count();
                prop_assert_eq!(result.fractions[t], naive as f64 / items.len() as f64);
            }
        }
    }

    #[test]
    fn functional_analysis_places_single_candidate() {
        let items = vec![ExplainedCandidate {
            activated_indices: (0..10).collect(),
            attribution: vec![1.0; 10],
            benign_score: 0.95,
        }];
        let bins = functional_analysis(&items, 0.4).unwrap();
        assert_eq!(bins.cells[4][0], Some(1.0));
        assert_eq!(bins.populations[4][0], 1);
        // all other cells are n/a, not zero
        for row in 0..5 {
            for col in 0..3 {
                if (row, col) != (4, 0) {
                    assert_eq!(bins.cells[row][col], None);
                }
            }
        }
    }

    #[test]
    fn functional_analysis_matches_double_loop_recount() {
        let items = random_items(77, 60);
        let bins = functional_analysis(&items, 0.4).unwrap();
        for (row, &(lo, hi)) in crate::adversarial::SCORE_BIN_EDGES.iter().enumerate() {
            for col in 0..3 {
                let cell: Vec<&ExplainedCandidate> = items
                    .iter()
                    .filter(|it| it.benign_score > lo && it.benign_score <= hi)
                    .filter(|it| count_bin(it.activated_indices.len()) == col)
                    .collect();
                assert_eq!(bins.populations[row][col], cell.len());
                if cell.is_empty() {
                    assert_eq!(bins.cells[row][col], None);
                } else {
                    let good = cell
                        .iter()
                        .filter(|it| {
                            good_explanation(&it.activated_indices, &it.attribution, 0.4)
                                .unwrap()
                        })
                        .count();
                    assert_eq!(
                        bins.cells[row][col],
                        Some(good as f64 / cell.len() as f64)
                    );
                }
            }
        }
    }

    /// Explainer stub whose ranking is fixed up front.
    struct FixedExplainer {
        values: Vec<f64>,
    }

    impl Explainer for FixedExplainer {
        fn name(&self) -> &str {
            "fixed"
        }

        fn attribute(
            &self,
            _x: &FeatureVector,
            _scorer: &dyn Scorer,
        ) -> Result<Vec<f64>, ExplainerError> {
            Ok(self.values.clone())
        }
    }

    /// Seeded random explainer for sanity-ordering comparisons.
    struct RandomExplainer {
        seed: u64,
    }

    impl Explainer for RandomExplainer {
        fn name(&self) -> &str {
            "random"
        }

        fn attribute(
            &self,
            x: &FeatureVector,
            _scorer: &dyn Scorer,
        ) -> Result<Vec<f64>, ExplainerError> {
            use rand::Rng;
            use rand::SeedableRng;
            let mut h = crate::util::Fnv1a::new();
            for v in x.values() {
                h.write_f64(*v);
            }
            let mut rng =
                rand_chacha::ChaCha8Rng::seed_from_u64(self.seed ^ h.finish());
            Ok((0..x.len()).map(|_| rng.random_range(-1.0..1.0)).collect())
        }
    }

    /// Planted sparse linear model: features 0..3 carry all decision mass.
    fn planted_scorer(m: usize) -> ClampedLinearScorer {
        let mut weights = vec![0.0; m];
        weights[0] = 0.25;
        weights[1] = 0.2;
        weights[2] = 0.15;
        ClampedLinearScorer {
            weights,
            bias: 0.2,
        }
    }

    fn planted_dataset(m: usize, seed: u64) -> Vec<(FeatureVector, Label)> {
        use rand::Rng;
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::new();
        for _ in 0..30 {
            // malware: planted features on
            let mut v: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..0.3)).collect();
            v[0] = rng.random_range(0.8..1.2);
            v[1] = rng.random_range(0.8..1.2);
            v[2] = rng.random_range(0.8..1.2);
            out.push((fv(v), Label::Malware));
            // benign: planted features off
            let mut v: Vec<f64> = (0..m).map(|_| rng.random_range(0.0..0.3)).collect();
            v[0] = 0.0;
            v[1] = 0.0;
            v[2] = 0.0;
            out.push((fv(v), Label::Benign));
        }
        out
    }

    #[test]
    fn oracle_explainer_collapses_deduction_pcr() {
        let m = 12;
        let scorer = planted_scorer(m);
        // explain the detected malware population; benign samples cannot
        // flip under deduction of features they never had
        let dataset: Vec<(FeatureVector, Label)> = planted_dataset(m, 1)
            .into_iter()
            .filter(|(_, l)| *l == Label::Malware)
            .collect();
        // oracle: knows the planted weights
        let mut oracle_values = vec![0.0; m];
        oracle_values[0] = 3.0;
        oracle_values[1] = 2.0;
        oracle_values[2] = 1.0;
        let oracle = FixedExplainer {
            values: oracle_values,
        };
        let curve = deduction_test(&dataset, &scorer, &oracle, 3).unwrap();
        assert_eq!(curve.pcr[0], 1.0, "PCR at n=0 must be 1");
        // removing all planted features flips every malware sample
        assert!(
            curve.pcr[3] < 0.2,
            "PCR after removing planted features: {:?}",
            curve.pcr
        );
    }

    #[test]
    fn random_explainer_never_beats_the_oracle_on_deduction() {
        let m = 12;
        let scorer = planted_scorer(m);
        let dataset = planted_dataset(m, 2);
        let mut oracle_values = vec![0.0; m];
        oracle_values[0] = 3.0;
        oracle_values[1] = 2.0;
        oracle_values[2] = 1.0;
        let oracle = FixedExplainer {
            values: oracle_values,
        };
        let random = RandomExplainer { seed: 4 };
        let oracle_curve = deduction_test(&dataset, &scorer, &oracle, 3).unwrap();
        let random_curve = deduction_test(&dataset, &scorer, &random, 3).unwrap();
        for (o, r) in oracle_curve.pcr.iter().zip(&random_curve.pcr) {
            assert!(o <= &(r + 1e-12), "oracle {o} vs random {r}");
        }
    }

    #[test]
    fn oracle_augmentation_flips_recipients() {
        let m = 12;
        let scorer = planted_scorer(m);
        let dataset = planted_dataset(m, 3);
        let malware: Vec<FeatureVector> = dataset
            .iter()
            .filter(|(_, l)| *l == Label::Malware)
            .map(|(x, _)| x.clone())
            .collect();
        let benign: Vec<FeatureVector> = dataset
            .iter()
            .filter(|(_, l)| *l == Label::Benign)
            .map(|(x, _)| x.clone())
            .collect();
        let mut oracle_values = vec![0.0; m];
        oracle_values[0] = 3.0;
        oracle_values[1] = 2.0;
        oracle_values[2] = 1.0;
        let oracle = FixedExplainer {
            values: oracle_values,
        };
        let curve = augmentation_test(&malware, &benign, &scorer, &oracle, 3).unwrap();
        // n=0 equals the benign baseline malware rate (FPR ≈ 0 here)
        assert_abs_diff_eq!(curve.pcr[0], 0.0, epsilon = 1e-12);
        assert!(
            curve.pcr[3] > 0.8,
            "grafting planted features should flip recipients: {:?}",
            curve.pcr
        );
    }

    #[test]
    fn augmentation_rejects_overlapping_sets() {
        let shared = fv(vec![0.5, 0.5]);
        let err = augmentation_test(
            &[shared.clone()],
            &[shared],
            &ConstantScorer {
                dim: 2,
                p_malware: 0.9,
            },
            &FixedExplainer {
                values: vec![1.0, 0.0],
            },
            1,
        );
        assert!(matches!(err, Err(EvalError::OverlappingSets)));
    }

    #[test]
    fn deduction_truncates_n_at_feature_count() {
        let scorer = planted_scorer(4);
        let dataset = planted_dataset(4, 5);
        let oracle = FixedExplainer {
            values: vec![3.0, 2.0, 1.0, 0.0],
        };
        let curve = deduction_test(&dataset, &scorer, &oracle, 99).unwrap();
        assert_eq!(curve.ns.last(), Some(&4));
    }

    #[test]
    fn perfect_predictions_have_unit_mcc() {
        let scorer = planted_scorer(6);
        let dataset = planted_dataset(6, 6);
        let report = classify_metrics(&scorer, &dataset).unwrap();
        assert_eq!(report.mcc, Some(1.0));
        assert_eq!(report.tpr, Some(1.0));
        assert_eq!(report.fpr, Some(0.0));
    }

    #[test]
    fn all_positive_predictor_has_zero_mcc_on_balanced_data() {
        let scorer = ConstantScorer {
            dim: 2,
            p_malware: 0.9,
        };
        let dataset = vec![
            (fv(vec![0.1, 0.2]), Label::Malware),
            (fv(vec![0.3, 0.1]), Label::Benign),
            (fv(vec![0.2, 0.4]), Label::Malware),
            (fv(vec![0.5, 0.0]), Label::Benign),
        ];
        let report = classify_metrics(&scorer, &dataset).unwrap();
        assert_eq!(report.mcc, Some(0.0));
    }

    #[test]
    fn single_class_corpus_reports_null_mcc_with_reason() {
        let scorer = ConstantScorer {
            dim: 2,
            p_malware: 0.9,
        };
        let dataset = vec![
            (fv(vec![0.1, 0.2]), Label::Malware),
            (fv(vec![0.2, 0.4]), Label::Malware),
        ];
        let report = classify_metrics(&scorer, &dataset).unwrap();
        assert_eq!(report.mcc, None);
        assert_eq!(report.mcc_reason.as_deref(), Some("single-class corpus"));
    }

    #[test]
    fn spearman_handles_perfect_and_reversed_order() {
        let a = [1.0, 2.0, 3.0, 4.0];
        let b = [10.0, 20.0, 30.0, 40.0];
        assert_abs_diff_eq!(spearman(&a, &b).unwrap(), 1.0, epsilon = 1e-12);
        let c = [4.0, 3.0, 2.0, 1.0];
        assert_abs_diff_eq!(spearman(&a, &c).unwrap(), -1.0, epsilon = 1e-12);
        assert_eq!(spearman(&[1.0, 1.0], &[2.0, 3.0]), None);
    }
}
