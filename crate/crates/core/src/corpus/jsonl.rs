//! JSONL corpus persistence.
//!
//! One object per line: `{"id": ..., "label": "malware"|"benign",
//! "family": optional, "features": ["category::name", ...]}`. Feature
//! strings split on the first `::`.

use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{CorpusError, FeatureToken, Label, Sample};

#[derive(Serialize, Deserialize)]
struct Record {
    id: String,
    label: Label,
    #[serde(skip_serializing_if = "Option::is_none")]
    family: Option<String>,
    features: Vec<String>,
}

pub fn load_corpus(path: &Path) -> Result<Vec<Sample>, CorpusError> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut samples = Vec::new();
    let mut seen_ids = HashSet::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let lineno = lineno + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record: Record = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            line: lineno,
            message: e.to_string(),
        })?;
        if !seen_ids.insert(record.id.clone()) {
            return Err(CorpusError::DuplicateId(record.id));
        }
        let mut tokens = Vec::with_capacity(record.features.len());
        for feature in &record.features {
            tokens.push(FeatureToken::parse(feature)?);
        }
        if tokens.is_empty() {
            return Err(CorpusError::Parse {
                line: lineno,
                message: format!("sample {:?} has no features", record.id),
            });
        }
        samples.push(Sample {
            id: record.id,
            label: record.label,
            family: record.family,
            tokens,
        });
    }
    if samples.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    Ok(samples)
}

pub fn save_corpus(samples: &[Sample], path: &Path) -> Result<(), CorpusError> {
    let file = File::create(path)?;
    let mut writer = BufWriter::new(file);
    for sample in samples {
        let record = Record {
            id: sample.id.clone(),
            label: sample.label,
            family: sample.family.clone(),
            features: sample.tokens.iter().map(|t| t.to_string()).collect(),
        };
        let line = serde_json::to_string(&record).expect("corpus record serializes");
        writeln!(writer, "{line}")?;
    }
    writer.flush()?;
    Ok(())
}
