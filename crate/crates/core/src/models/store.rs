//! Versioned, self-describing model files (JSON). A file may carry the
//! fitted vocabulary alongside the parameters so downstream consumers can
//! embed fresh corpora consistently.

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Calibration, ModelError, ModelKind, ModelMeta, ModelParams, TrainedModel};
use crate::corpus::Vocabulary;

const FORMAT: &str = "mpt-xplain-model";
const VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    version: u32,
    kind: ModelKind,
    dim: usize,
    vocabulary_ref: u64,
    params: ModelParams,
    calibration: Calibration,
    meta: ModelMeta,
    parameter_fingerprint: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    vocabulary: Option<Vocabulary>,
}

/// A loaded model plus the vocabulary it was trained under, when the file
/// carries one.
#[derive(Debug, Clone)]
pub struct ModelBundle {
    pub model: TrainedModel,
    pub vocabulary: Option<Vocabulary>,
}

pub fn save_model(model: &TrainedModel, path: &Path) -> Result<(), ModelError> {
    save_bundle(model, None, path)
}

pub fn save_bundle(
    model: &TrainedModel,
    vocabulary: Option<&Vocabulary>,
    path: &Path,
) -> Result<(), ModelError> {
    if let Some(v) = vocabulary {
        if v.fingerprint() != model.vocabulary_ref {
            return Err(ModelError::VocabularyMismatch);
        }
    }
    let file = ModelFile {
        format: FORMAT.to_string(),
        version: VERSION,
        kind: model.kind,
        dim: model.dim,
        vocabulary_ref: model.vocabulary_ref,
        params: model.params.clone(),
        calibration: model.calibration,
        meta: model.meta.clone(),
        parameter_fingerprint: model.parameter_fingerprint(),
        vocabulary: vocabulary.cloned(),
    };
    let out = File::create(path)?;
    serde_json::to_writer(BufWriter::new(out), &file)
        .map_err(|e| ModelError::Parse(e.to_string()))?;
    Ok(())
}

pub fn load_model(path: &Path) -> Result<TrainedModel, ModelError> {
    Ok(load_bundle(path)?.model)
}

pub fn load_bundle(path: &Path) -> Result<ModelBundle, ModelError> {
    let file = File::open(path)?;
    let parsed: ModelFile = serde_json::from_reader(BufReader::new(file))
        .map_err(|e| ModelError::Parse(e.to_string()))?;
    if parsed.format != FORMAT {
        return Err(ModelError::Parse(format!(
            "unexpected format tag {:?}",
            parsed.format
        )));
    }
    if parsed.version != VERSION {
        return Err(ModelError::VersionMismatch {
            found: parsed.version,
            supported: VERSION,
        });
    }
    let model = TrainedModel {
        kind: parsed.kind,
        dim: parsed.dim,
        vocabulary_ref: parsed.vocabulary_ref,
        params: parsed.params,
        calibration: parsed.calibration,
        meta: parsed.meta,
    };
    if model.parameter_fingerprint() != parsed.parameter_fingerprint {
        return Err(ModelError::Parse(
            "stored fingerprint does not match parameters".into(),
        ));
    }
    if let Some(v) = &parsed.vocabulary {
        if v.fingerprint() != model.vocabulary_ref {
            return Err(ModelError::Parse(
                "stored vocabulary does not match the model's vocabulary fingerprint".into(),
            ));
        }
        if v.len() != model.dim {
            return Err(ModelError::DimensionMismatch {
                expected: model.dim,
                got: v.len(),
            });
        }
    }
    Ok(ModelBundle {
        model,
        vocabulary: parsed.vocabulary,
    })
}
