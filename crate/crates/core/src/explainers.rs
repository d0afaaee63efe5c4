//! Uniform interface over the three explanation methods, so evaluation and
//! the CLI can swap them freely. Every explainer returns per-feature values
//! index-aligned with the vocabulary.

use thiserror::Error;

use crate::attribution::{explain, AttributionError, ExplainConfig};
use crate::baselines::{explain_kshap_style, explain_lime_style, BaselineError, KshapConfig, LimeConfig};
use crate::corpus::FeatureVector;
use crate::models::Scorer;

#[derive(Debug, Error)]
pub enum ExplainerError {
    #[error(transparent)]
    Attribution(#[from] AttributionError),
    #[error(transparent)]
    Baseline(#[from] BaselineError),
}

pub trait Explainer: Send + Sync {
    fn name(&self) -> &str;
    fn attribute(&self, x: &FeatureVector, scorer: &dyn Scorer)
        -> Result<Vec<f64>, ExplainerError>;
}

/// The minimum-variance attribution pipeline.
#[derive(Debug, Clone, Default)]
pub struct MptExplainer {
    pub config: ExplainConfig,
}

impl Explainer for MptExplainer {
    fn name(&self) -> &str {
        "mpt"
    }

    fn attribute(
        &self,
        x: &FeatureVector,
        scorer: &dyn Scorer,
    ) -> Result<Vec<f64>, ExplainerError> {
        Ok(explain(x, scorer, &self.config)?.values().to_vec())
    }
}

#[derive(Debug, Clone, Default)]
pub struct LimeExplainer {
    pub config: LimeConfig,
}

impl Explainer for LimeExplainer {
    fn name(&self) -> &str {
        "lime"
    }

    fn attribute(
        &self,
        x: &FeatureVector,
        scorer: &dyn Scorer,
    ) -> Result<Vec<f64>, ExplainerError> {
        Ok(explain_lime_style(x, scorer, &self.config)?)
    }
}

#[derive(Debug, Clone, Default)]
pub struct KernelShapExplainer {
    pub config: KshapConfig,
}

impl Explainer for KernelShapExplainer {
    fn name(&self) -> &str {
        "kshap"
    }

    fn attribute(
        &self,
        x: &FeatureVector,
        scorer: &dyn Scorer,
    ) -> Result<Vec<f64>, ExplainerError> {
        Ok(explain_kshap_style(x, scorer, &self.config)?)
    }
}
