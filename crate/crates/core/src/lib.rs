//! Model-agnostic explanation engine for black-box malware classifiers.
//!
//! The pipeline: token-set samples are embedded as TF-IDF vectors
//! ([`corpus`]), scored by a black-box classifier ([`models`]), perturbed one
//! feature at a time ([`perturbation`]), and explained by solving a
//! minimum-variance program over the covariance of the classifier's response
//! ratios ([`attribution`]). An evasion-attack generator ([`adversarial`]),
//! two reference explainers ([`baselines`]) and a quantitative evaluation
//! harness ([`evaluation`]) round out the toolkit.

pub mod adversarial;
pub mod attribution;
pub mod baselines;
pub mod corpus;
pub mod evaluation;
pub mod explainers;
pub mod linalg;
pub mod models;
pub mod perturbation;
pub mod util;

pub use attribution::{explain, AttributionVector, ExplainConfig};
pub use corpus::{FeatureToken, FeatureVector, Label, Sample, Vocabulary};
pub use explainers::Explainer;
pub use models::{ClassScores, Scorer, TrainedModel};
