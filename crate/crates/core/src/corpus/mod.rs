//! Sample ingestion, vocabulary fitting and TF-IDF embedding.
//!
//! A [`Sample`] is a labeled multiset of categorized feature tokens. Fitting
//! a [`Vocabulary`] on a training corpus records, per distinct token, how
//! many documents contain it; [`embed`] then maps a sample to a dense
//! [`FeatureVector`] whose entry for an in-vocabulary token is
//! `tf · ln(|D| / df)` where `tf` is the token's count over the sample's
//! total token count. Unknown tokens are ignored at embed time but still
//! count toward the sample's total.

mod jsonl;
mod synthetic;

pub use jsonl::{load_corpus, save_corpus};
pub use synthetic::{generate_synthetic, SyntheticConfig};

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::util::Fnv1a;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("empty sample {0:?}")]
    EmptySample(String),
    #[error("duplicate id {0:?}")]
    DuplicateId(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unknown category in token {0:?} (expected \"category::name\")")]
    UnknownCategory(String),
    #[error("invalid synthetic config: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Binary classification label; malware is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Malware,
    Benign,
}

impl Label {
    pub fn other(self) -> Label {
        match self {
            Label::Malware => Label::Benign,
            Label::Benign => Label::Malware,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Label::Malware => write!(f, "malware"),
            Label::Benign => write!(f, "benign"),
        }
    }
}

/// A categorized feature token. Identity is the exact `(category, name)`
/// string pair after whitespace trimming.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FeatureToken {
    pub category: String,
    pub name: String,
}

impl FeatureToken {
    pub fn new(category: &str, name: &str) -> Self {
        FeatureToken {
            category: category.trim().to_string(),
            name: name.trim().to_string(),
        }
    }

    /// Parse the wire form `category::name` (first `::` splits).
    pub fn parse(s: &str) -> Result<Self, CorpusError> {
        match s.split_once("::") {
            Some((cat, name)) if !cat.trim().is_empty() && !name.trim().is_empty() => {
                Ok(FeatureToken::new(cat, name))
            }
            _ => Err(CorpusError::UnknownCategory(s.to_string())),
        }
    }
}

impl fmt::Display for FeatureToken {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}::{}", self.category, self.name)
    }
}

/// A labeled app represented as a multiset of feature tokens. Token
/// multiplicity is preserved; order is not significant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub id: String,
    pub label: Label,
    pub family: Option<String>,
    pub tokens: Vec<FeatureToken>,
}

impl Sample {
    /// Total token count including repeats (the `|X|` of the tf weight).
    pub fn total_tokens(&self) -> usize {
        self.tokens.len()
    }

    /// Multiset counts keyed by token.
    pub fn token_counts(&self) -> HashMap<&FeatureToken, usize> {
        let mut counts = HashMap::new();
        for t in &self.tokens {
            *counts.entry(t).or_insert(0) += 1;
        }
        counts
    }

    pub fn contains(&self, token: &FeatureToken) -> bool {
        self.tokens.iter().any(|t| t == token)
    }
}

/// Token inventory fitted on a training corpus: a deterministic ordering of
/// the distinct tokens plus per-token document frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabularyData")]
pub struct Vocabulary {
    tokens: Vec<FeatureToken>,
    document_frequency: Vec<u32>,
    corpus_size: usize,
    #[serde(skip)]
    index: HashMap<FeatureToken, usize>,
}

/// Wire form of [`Vocabulary`]; the lookup cache is rebuilt on load.
#[derive(Deserialize)]
struct VocabularyData {
    tokens: Vec<FeatureToken>,
    document_frequency: Vec<u32>,
    corpus_size: usize,
}

impl From<VocabularyData> for Vocabulary {
    fn from(data: VocabularyData) -> Vocabulary {
        let index = data
            .tokens
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Vocabulary {
            tokens: data.tokens,
            document_frequency: data.document_frequency,
            corpus_size: data.corpus_size,
            index,
        }
    }
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    pub fn tokens(&self) -> &[FeatureToken] {
        &self.tokens
    }

    pub fn token(&self, index: usize) -> &FeatureToken {
        &self.tokens[index]
    }

    pub fn document_frequency(&self, index: usize) -> u32 {
        self.document_frequency[index]
    }

    pub fn index_of(&self, token: &FeatureToken) -> Option<usize> {
        if self.index.is_empty() && !self.tokens.is_empty() {
            // deserialized without the cache; fall back to binary search on
            // the sorted token list
            return self.tokens.binary_search(token).ok();
        }
        self.index.get(token).copied()
    }

    /// Inverse document frequency `ln(|D| / df)`.
    pub fn idf(&self, index: usize) -> f64 {
        (self.corpus_size as f64 / f64::from(self.document_frequency[index])).ln()
    }

    /// Stable identity of this vocabulary (ordering, frequencies and size).
    pub fn fingerprint(&self) -> u64 {
        let mut h = Fnv1a::new();
        h.write_u64(self.corpus_size as u64);
        for (t, df) in self.tokens.iter().zip(&self.document_frequency) {
            h.write_str(&t.category);
            h.write_str(&t.name);
            h.write_u64(u64::from(*df));
        }
        h.finish()
    }
}

/// Dense non-negative TF-IDF embedding of one sample under a fitted
/// vocabulary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    values: Vec<f64>,
    vocabulary_ref: u64,
}

impl FeatureVector {
    /// Build from raw values; rejects negative or non-finite entries.
    pub fn from_values(values: Vec<f64>, vocabulary_ref: u64) -> Self {
        assert!(
            values.iter().all(|v| v.is_finite() && *v >= 0.0),
            "feature values must be finite and non-negative"
        );
        FeatureVector {
            values,
            vocabulary_ref,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn vocabulary_ref(&self) -> u64 {
        self.vocabulary_ref
    }

    /// Copy with coordinate `i` replaced by `value` (must stay non-negative).
    pub fn with_value_at(&self, i: usize, value: f64) -> FeatureVector {
        assert!(value.is_finite() && value >= 0.0);
        let mut out = self.clone();
        out.values[i] = value;
        out
    }
}

/// Fit a vocabulary on a training corpus: distinct tokens in lexicographic
/// `(category, name)` order with per-token document frequencies.
pub fn fit_vocabulary(training: &[Sample]) -> Result<Vocabulary, CorpusError> {
    if training.is_empty() {
        return Err(CorpusError::EmptyCorpus);
    }
    let mut df: BTreeMap<&FeatureToken, u32> = BTreeMap::new();
    for sample in training {
        if sample.tokens.is_empty() {
            return Err(CorpusError::EmptySample(sample.id.clone()));
        }
        let mut seen: Vec<&FeatureToken> = sample.tokens.iter().collect();
        seen.sort();
        seen.dedup();
        for t in seen {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    let tokens: Vec<FeatureToken> = df.keys().map(|t| (*t).clone()).collect();
    let document_frequency: Vec<u32> = df.values().copied().collect();
    let index = tokens
        .iter()
        .enumerate()
        .map(|(i, t)| (t.clone(), i))
        .collect();
    Ok(Vocabulary {
        tokens,
        document_frequency,
        corpus_size: training.len(),
        index,
    })
}

/// Embed one sample under a fitted vocabulary. Out-of-vocabulary tokens get
/// no weight of their own but still count toward the sample's token total.
pub fn embed(sample: &Sample, vocab: &Vocabulary) -> Result<FeatureVector, CorpusError> {
    if sample.tokens.is_empty() {
        return Err(CorpusError::EmptySample(sample.id.clone()));
    }
    let total = sample.total_tokens() as f64;
    let mut values = vec![0.0; vocab.len()];
    for (token, count) in sample.token_counts() {
        if let Some(i) = vocab.index_of(token) {
            values[i] = (count as f64 / total) * vocab.idf(i);
        }
    }
    Ok(FeatureVector {
        values,
        vocabulary_ref: vocab.fingerprint(),
    })
}
