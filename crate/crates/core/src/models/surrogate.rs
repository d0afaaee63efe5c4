//! Surrogate distillation: train an SVM on a black-box teacher's predicted
//! labels so that perturbation-based explanation can proceed when the
//! teacher itself cannot be perturbed cheaply. Fidelity is measured, never
//! assumed: the held-out label-agreement rate is recorded on the model.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{train, ModelError, Scorer, TrainConfig, TrainedModel};
use crate::corpus::{FeatureVector, Label};

#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateConfig {
    pub train: TrainConfig,
    /// Fraction of the dataset held out for the agreement measurement.
    pub holdout_fraction: f64,
    pub seed: u64,
}

impl Default for SurrogateConfig {
    fn default() -> Self {
        SurrogateConfig {
            train: TrainConfig::default(),
            holdout_fraction: 0.2,
            seed: 0,
        }
    }
}

pub fn train_surrogate(
    teacher: &dyn Scorer,
    dataset: &[FeatureVector],
    config: &SurrogateConfig,
) -> Result<TrainedModel, ModelError> {
    if dataset.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    if !(0.0..1.0).contains(&config.holdout_fraction) {
        return Err(ModelError::InvalidConfig(format!(
            "holdout fraction {} outside [0, 1)",
            config.holdout_fraction
        )));
    }
    let labels: Vec<Label> = dataset
        .iter()
        .map(|x| teacher.score(x).map(|s| s.predicted()))
        .collect::<Result<_, _>>()?;
    let malware = labels.iter().filter(|l| **l == Label::Malware).count();
    if malware == 0 || malware == labels.len() {
        return Err(ModelError::DegenerateTeacher);
    }

    let mut idx: Vec<usize> = (0..dataset.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    idx.shuffle(&mut rng);
    let holdout_n = ((dataset.len() as f64 * config.holdout_fraction).ceil() as usize)
        .clamp(1, dataset.len() - 1);
    let (holdout_idx, train_idx) = idx.split_at(holdout_n);

    let train_set: Vec<(FeatureVector, Label)> = train_idx
        .iter()
        .map(|&i| (dataset[i].clone(), labels[i]))
        .collect();
    // tiny splits can leave the training side single-class; fall back to the
    // whole dataset and measure agreement in-sample
    let (fit_set, agreement_idx): (Vec<(FeatureVector, Label)>, &[usize]) = {
        let m = train_set.iter().filter(|(_, l)| *l == Label::Malware).count();
        if m == 0 || m == train_set.len() {
            (
                dataset
                    .iter()
                    .cloned()
                    .zip(labels.iter().copied())
                    .collect(),
                &idx[..],
            )
        } else {
            (train_set, holdout_idx)
        }
    };

    let mut model = train(&fit_set, &config.train)?;
    let agree = agreement_idx
        .iter()
        .filter(|&&i| {
            model
                .score(&dataset[i])
                .map(|s| s.predicted() == labels[i])
                .unwrap_or(false)
        })
        .count();
    model.meta.surrogate_agreement = Some(agree as f64 / agreement_idx.len() as f64);
    Ok(model)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{embed, fit_vocabulary, generate_synthetic, SyntheticConfig};
    use crate::models::test_scorers::ConstantScorer;
    use crate::models::ModelKind;

    fn embedded_corpus(seed: u64) -> (Vec<FeatureVector>, Vec<Label>) {
        let cfg = SyntheticConfig {
            malware: 80,
            benign: 80,
            vocab: 50,
            signal: 6,
            noise: 0.1,
            seed,
        };
        let corpus = generate_synthetic(&cfg).unwrap();
        let vocab = fit_vocabulary(&corpus).unwrap();
        let xs = corpus.iter().map(|s| embed(s, &vocab).unwrap()).collect();
        let ys = corpus.iter().map(|s| s.label).collect();
        (xs, ys)
    }

    #[test]
    fn self_distillation_agrees_with_itself() {
        let (xs, ys) = embedded_corpus(3);
        let data: Vec<_> = xs.iter().cloned().zip(ys.iter().copied()).collect();
        let teacher = train(&data, &TrainConfig::default()).unwrap();
        let surrogate = train_surrogate(&teacher, &xs, &SurrogateConfig::default()).unwrap();
        let agreement = surrogate.meta().surrogate_agreement.unwrap();
        assert!(agreement >= 0.99, "self-distillation agreement {agreement}");
    }

    #[test]
    fn constant_teacher_is_rejected() {
        let (xs, _) = embedded_corpus(4);
        let teacher = ConstantScorer {
            dim: xs[0].len(),
            p_malware: 0.9,
        };
        assert!(matches!(
            train_surrogate(&teacher, &xs, &SurrogateConfig::default()),
            Err(ModelError::DegenerateTeacher)
        ));
    }

    #[test]
    fn linear_surrogate_tracks_rbf_teacher() {
        let (xs, ys) = embedded_corpus(5);
        let data: Vec<_> = xs.iter().cloned().zip(ys.iter().copied()).collect();
        let teacher = train(
            &data,
            &TrainConfig {
                kind: ModelKind::RbfSvm,
                gamma: 1.0,
                ..Default::default()
            },
        )
        .unwrap();
        let surrogate = train_surrogate(&teacher, &xs, &SurrogateConfig::default()).unwrap();
        let agreement = surrogate.meta().surrogate_agreement.unwrap();
        assert!(agreement >= 0.95, "rbf->linear agreement {agreement}");
    }
}
