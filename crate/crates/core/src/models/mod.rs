//! Black-box scoring contract and the built-in trainable classifiers.
//!
//! [`Scorer`] is the behavioral contract every other module consumes: a pure
//! mapping from a feature vector to a malware/benign probability pair. The
//! shipped implementations are a linear SVM (stochastic subgradient on hinge
//! loss) and an RBF-kernel SVM (dual coordinate ascent on a dense kernel
//! matrix), both calibrated to probabilities by a monotone sigmoid fitted on
//! training decision values. [`train_surrogate`] distills any external
//! scorer into a trainable stand-in for perturbation-based explanation.

mod calibration;
mod linear;
mod rbf;
mod store;
mod surrogate;

pub use calibration::Calibration;
pub use store::{load_bundle, load_model, save_bundle, save_model, ModelBundle};
pub use surrogate::{train_surrogate, SurrogateConfig};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{FeatureVector, Label};
use crate::util::Fnv1a;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("dataset contains a single class ({0})")]
    SingleClass(Label),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("vectors embed under different vocabularies")]
    VocabularyMismatch,
    #[error("degenerate teacher: predicts a single class on the distillation set")]
    DegenerateTeacher,
    #[error("model file version mismatch: found {found}, supported {supported}")]
    VersionMismatch { found: u32, supported: u32 },
    #[error("model file parse error: {0}")]
    Parse(String),
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Probability pair returned by a scorer. Always sums to one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassScores {
    p_malware: f64,
    p_benign: f64,
}

impl ClassScores {
    pub fn from_malware_prob(p: f64) -> ClassScores {
        assert!(
            p.is_finite() && (0.0..=1.0).contains(&p),
            "malware probability {p} outside [0, 1]"
        );
        ClassScores {
            p_malware: p,
            p_benign: 1.0 - p,
        }
    }

    pub fn p_malware(&self) -> f64 {
        self.p_malware
    }

    pub fn p_benign(&self) -> f64 {
        self.p_benign
    }

    pub fn prob_of(&self, label: Label) -> f64 {
        match label {
            Label::Malware => self.p_malware,
            Label::Benign => self.p_benign,
        }
    }

    /// Predicted class; an exact tie goes to benign.
    pub fn predicted(&self) -> Label {
        if self.p_malware > 0.5 {
            Label::Malware
        } else {
            Label::Benign
        }
    }
}

/// The black-box classifier contract. Implementations must be pure: repeated
/// calls on the same input return identical scores, and concurrent calls are
/// safe.
pub trait Scorer: Send + Sync {
    fn score(&self, x: &FeatureVector) -> Result<ClassScores, ModelError>;
    fn num_features(&self) -> usize;
    fn kind(&self) -> &str {
        "scorer"
    }
    fn fingerprint(&self) -> u64 {
        0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    LinearSvm,
    RbfSvm,
}

impl ModelKind {
    pub fn name(&self) -> &'static str {
        match self {
            ModelKind::LinearSvm => "linear_svm",
            ModelKind::RbfSvm => "rbf_svm",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum ModelParams {
    Linear {
        weights: Vec<f64>,
        bias: f64,
    },
    Rbf {
        support: Vec<Vec<f64>>,
        /// `alpha_i * y_i` per support vector.
        coeffs: Vec<f64>,
        bias: f64,
        gamma: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelMeta {
    pub train_seed: u64,
    pub c: f64,
    /// Held-out label agreement with the teacher, when distilled.
    pub surrogate_agreement: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub kind: ModelKind,
    /// Soft-margin constant. `None` selects from [`C_GRID`] on a validation
    /// split.
    pub c: Option<f64>,
    pub gamma: f64,
    /// Epochs for the linear subgradient loop.
    pub epochs: usize,
    /// Full-coordinate passes for the kernel dual ascent.
    pub max_passes: usize,
    pub seed: u64,
}

pub const C_GRID: [f64; 3] = [0.1, 1.0, 10.0];

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            kind: ModelKind::LinearSvm,
            c: None,
            gamma: 1.0,
            epochs: 60,
            max_passes: 200,
            seed: 0,
        }
    }
}

/// A trained, calibrated SVM.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub(crate) kind: ModelKind,
    pub(crate) dim: usize,
    pub(crate) vocabulary_ref: u64,
    pub(crate) params: ModelParams,
    pub(crate) calibration: Calibration,
    pub(crate) meta: ModelMeta,
}

impl TrainedModel {
    pub fn model_kind(&self) -> ModelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vocabulary_ref(&self) -> u64 {
        self.vocabulary_ref
    }

    pub fn meta(&self) -> &ModelMeta {
        &self.meta
    }

    pub fn calibration(&self) -> &Calibration {
        &self.calibration
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    /// Raw decision value; positive means malware-side of the margin.
    pub fn decision(&self, values: &[f64]) -> Result<f64, ModelError> {
        if values.len() != self.dim {
            return Err(ModelError::DimensionMismatch {
                expected: self.dim,
                got: values.len(),
            });
        }
        Ok(match &self.params {
            ModelParams::Linear { weights, bias } => crate::linalg::dot(weights, values) + bias,
            ModelParams::Rbf {
                support,
                coeffs,
                bias,
                gamma,
            } => {
                let mut acc = *bias;
                for (sv, coeff) in support.iter().zip(coeffs) {
                    acc += coeff * rbf::kernel(sv, values, *gamma);
                }
                acc
            }
        })
    }

    /// Stable hash over everything that determines scoring behavior.
    pub fn parameter_fingerprint(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write_str(self.kind.name());
        h.write_u64(self.dim as u64);
        h.write_u64(self.vocabulary_ref);
        match &self.params {
            ModelParams::Linear { weights, bias } => {
                for w in weights {
                    h.write_f64(*w);
                }
                h.write_f64(*bias);
            }
            ModelParams::Rbf {
                support,
                coeffs,
                bias,
                gamma,
            } => {
                for sv in support {
                    for v in sv {
                        h.write_f64(*v);
                    }
                }
                for c in coeffs {
                    h.write_f64(*c);
                }
                h.write_f64(*bias);
                h.write_f64(*gamma);
            }
        }
        h.write_f64(self.calibration.slope);
        h.write_f64(self.calibration.offset);
        h.finish()
    }
}

impl Scorer for TrainedModel {
    fn score(&self, x: &FeatureVector) -> Result<ClassScores, ModelError> {
        let d = self.decision(x.values())?;
        Ok(ClassScores::from_malware_prob(self.calibration.probability(d)))
    }

    fn num_features(&self) -> usize {
        self.dim
    }

    fn kind(&self) -> &str {
        self.kind.name()
    }

    fn fingerprint(&self) -> u64 {
        self.parameter_fingerprint()
    }
}

fn check_dataset(dataset: &[(FeatureVector, Label)]) -> Result<(usize, u64), ModelError> {
    let (first, _) = dataset.first().ok_or(ModelError::EmptyDataset)?;
    let dim = first.len();
    let vocab_ref = first.vocabulary_ref();
    for (x, _) in dataset {
        if x.len() != dim {
            return Err(ModelError::DimensionMismatch {
                expected: dim,
                got: x.len(),
            });
        }
        if x.vocabulary_ref() != vocab_ref {
            return Err(ModelError::VocabularyMismatch);
        }
    }
    let malware = dataset.iter().filter(|(_, l)| *l == Label::Malware).count();
    if malware == 0 {
        return Err(ModelError::SingleClass(Label::Benign));
    }
    if malware == dataset.len() {
        return Err(ModelError::SingleClass(Label::Malware));
    }
    Ok((dim, vocab_ref))
}

/// Train a calibrated SVM. When `config.c` is unset, the soft-margin
/// constant comes from a small fixed grid scored on a held-out fifth of the
/// data, after which the model is refit on everything.
pub fn train(
    dataset: &[(FeatureVector, Label)],
    config: &TrainConfig,
) -> Result<TrainedModel, ModelError> {
    let (dim, vocab_ref) = check_dataset(dataset)?;
    if config.gamma <= 0.0 && config.kind == ModelKind::RbfSvm {
        return Err(ModelError::InvalidConfig(format!(
            "gamma must be positive, got {}",
            config.gamma
        )));
    }

    let xs: Vec<&[f64]> = dataset.iter().map(|(x, _)| x.values()).collect();
    let ys: Vec<f64> = dataset
        .iter()
        .map(|(_, l)| if *l == Label::Malware { 1.0 } else { -1.0 })
        .collect();

    let c = match config.c {
        Some(c) if c > 0.0 => c,
        Some(c) => {
            return Err(ModelError::InvalidConfig(format!(
                "c must be positive, got {c}"
            )))
        }
        None => select_c(&xs, &ys, config)?,
    };

    let params = fit_params(&xs, &ys, c, config);
    let model_uncalibrated = TrainedModel {
        kind: config.kind,
        dim,
        vocabulary_ref: vocab_ref,
        params,
        calibration: Calibration::identity(),
        meta: ModelMeta {
            train_seed: config.seed,
            c,
            surrogate_agreement: None,
        },
    };
    let decisions: Vec<f64> = xs
        .iter()
        .map(|x| model_uncalibrated.decision(x).expect("dims checked"))
        .collect();
    let malware: Vec<bool> = ys.iter().map(|y| *y > 0.0).collect();
    let calibration = Calibration::fit(&decisions, &malware);
    Ok(TrainedModel {
        calibration,
        ..model_uncalibrated
    })
}

fn fit_params(xs: &[&[f64]], ys: &[f64], c: f64, config: &TrainConfig) -> ModelParams {
    match config.kind {
        ModelKind::LinearSvm => linear::fit(xs, ys, c, config.epochs, config.seed),
        ModelKind::RbfSvm => rbf::fit(xs, ys, c, config.gamma, config.max_passes),
    }
}

fn select_c(xs: &[&[f64]], ys: &[f64], config: &TrainConfig) -> Result<f64, ModelError> {
    use rand::seq::SliceRandom;
    use rand::SeedableRng;

    let n = xs.len();
    let mut idx: Vec<usize> = (0..n).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(config.seed ^ 0x5e1e_c7c0);
    idx.shuffle(&mut rng);
    let holdout = (n / 5).max(1);
    let (val_idx, train_idx) = idx.split_at(holdout);

    // the split can lose a class on tiny datasets; fall back to c = 1
    let has_both = |ids: &[usize]| {
        ids.iter().any(|&i| ys[i] > 0.0) && ids.iter().any(|&i| ys[i] < 0.0)
    };
    if !has_both(train_idx) || !has_both(val_idx) {
        return Ok(1.0);
    }

    let train_x: Vec<&[f64]> = train_idx.iter().map(|&i| xs[i]).collect();
    let train_y: Vec<f64> = train_idx.iter().map(|&i| ys[i]).collect();
    let mut best = (C_GRID[0], -1.0);
    for &c in &C_GRID {
        let params = fit_params(&train_x, &train_y, c, config);
        let correct = val_idx
            .iter()
            .filter(|&&i| {
                let d = raw_decision(&params, xs[i]);
                (d > 0.0) == (ys[i] > 0.0)
            })
            .count();
        let acc = correct as f64 / val_idx.len() as f64;
        if acc > best.1 {
            best = (c, acc);
        }
    }
    Ok(best.0)
}

fn raw_decision(params: &ModelParams, x: &[f64]) -> f64 {
    match params {
        ModelParams::Linear { weights, bias } => crate::linalg::dot(weights, x) + bias,
        ModelParams::Rbf {
            support,
            coeffs,
            bias,
            gamma,
        } => {
            let mut acc = *bias;
            for (sv, coeff) in support.iter().zip(coeffs) {
                acc += coeff * rbf::kernel(sv, x, *gamma);
            }
            acc
        }
    }
}
