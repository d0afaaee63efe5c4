//! Reference explainers for comparison: a local linear surrogate fitted on
//! masked neighbors (LIME-style) and a Shapley-kernel weighted regression
//! with the efficiency constraint built in (kernel-SHAP-style). Both emit
//! coefficient vectors over the same vocabulary index space as the
//! minimum-variance explainer, so the evaluation metrics apply unchanged.

mod kshap;
mod lime;

pub use kshap::{explain_kshap_style, KshapConfig};
pub use lime::{explain_lime_style, LimeConfig};

use thiserror::Error;

use crate::models::ModelError;

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("singular regression: {0}")]
    SingularRegression(String),
    #[error("sampling budget {budget} too small for {needed} unknowns; raise the budget")]
    BudgetTooSmall { budget: usize, needed: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}
