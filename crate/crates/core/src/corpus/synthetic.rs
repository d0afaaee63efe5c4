//! Desk-scale synthetic corpora with planted class structure.
//!
//! Each class owns a block of "signal" tokens that its samples carry with
//! high probability and the opposite class carries with low probability.
//! Planted signals give downstream tests a ground truth for which features
//! ought to matter.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{CorpusError, FeatureToken, Label, Sample};

/// Categories cycled over the synthetic token space. Index 0 is
/// "permission" so every signal block contains attack-eligible tokens.
pub const CATEGORIES: [&str; 5] = ["permission", "api_call", "intent", "url", "provider"];

/// Probability that a background (non-signal) token appears in any sample.
/// Kept sparse so samples stay short the way real per-app feature sets do.
const BACKGROUND_RATE: f64 = 0.03;

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    /// Number of malware samples.
    pub malware: usize,
    /// Number of benign samples.
    pub benign: usize,
    /// Total vocabulary size.
    pub vocab: usize,
    /// Signal tokens planted per class.
    pub signal: usize,
    /// Noise rate: own-class signals appear with probability `1 - noise`,
    /// cross-class signals with probability `noise / 4`.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            malware: 500,
            benign: 500,
            vocab: 300,
            signal: 10,
            noise: 0.1,
            seed: 0,
        }
    }
}

/// The i-th synthetic vocabulary token.
pub fn synthetic_token(i: usize) -> FeatureToken {
    let cat = CATEGORIES[i % CATEGORIES.len()];
    FeatureToken::new(cat, &format!("{cat}_{i:04}"))
}

/// Signal token indices for a class: malware owns `[0, signal)`, benign owns
/// `[signal, 2·signal)`.
pub fn signal_range(label: Label, signal: usize) -> std::ops::Range<usize> {
    match label {
        Label::Malware => 0..signal,
        Label::Benign => signal..2 * signal,
    }
}

pub fn generate_synthetic(config: &SyntheticConfig) -> Result<Vec<Sample>, CorpusError> {
    if config.malware + config.benign == 0 {
        return Err(CorpusError::InvalidConfig("zero samples requested".into()));
    }
    if config.vocab == 0 {
        return Err(CorpusError::InvalidConfig("zero vocabulary requested".into()));
    }
    if config.vocab < 2 * config.signal {
        return Err(CorpusError::InvalidConfig(format!(
            "vocab {} too small for 2 x {} signal tokens",
            config.vocab, config.signal
        )));
    }
    if !(0.0..=1.0).contains(&config.noise) {
        return Err(CorpusError::InvalidConfig(format!(
            "noise {} outside [0, 1]",
            config.noise
        )));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut samples = Vec::with_capacity(config.malware + config.benign);
    let plan = [
        (Label::Malware, config.malware, "mw"),
        (Label::Benign, config.benign, "bn"),
    ];
    for (label, count, prefix) in plan {
        for n in 0..count {
            let own = signal_range(label, config.signal);
            let cross = signal_range(label.other(), config.signal);
            let mut tokens = Vec::new();
            let mut first_signal = None;
            for i in 0..config.vocab {
                let p = if own.contains(&i) {
                    1.0 - config.noise
                } else if cross.contains(&i) {
                    config.noise / 4.0
                } else {
                    BACKGROUND_RATE
                };
                if rng.random_bool(p.clamp(0.0, 1.0)) {
                    if own.contains(&i) && first_signal.is_none() {
                        first_signal = Some(i);
                    }
                    tokens.push(synthetic_token(i));
                }
            }
            if tokens.is_empty() {
                tokens.push(synthetic_token(n % config.vocab));
            }
            let family = match label {
                Label::Malware => Some(format!("fam{:02}", first_signal.unwrap_or(99))),
                Label::Benign => None,
            };
            samples.push(Sample {
                id: format!("{prefix}{n:05}"),
                label,
                family,
                tokens,
            });
        }
    }
    Ok(samples)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_seed_reproduces_corpus_exactly() {
        let cfg = SyntheticConfig {
            seed: 7,
            malware: 40,
            benign: 40,
            ..Default::default()
        };
        let a = generate_synthetic(&cfg).unwrap();
        let b = generate_synthetic(&cfg).unwrap();
        assert_eq!(a, b);
        let ser_a = serde_json::to_string(&a).unwrap();
        let ser_b = serde_json::to_string(&b).unwrap();
        assert_eq!(ser_a, ser_b);
    }

    #[test]
    fn zero_noise_plants_every_own_signal() {
        let cfg = SyntheticConfig {
            malware: 30,
            benign: 30,
            vocab: 40,
            signal: 5,
            noise: 0.0,
            seed: 3,
        };
        let corpus = generate_synthetic(&cfg).unwrap();
        for s in corpus.iter().filter(|s| s.label == Label::Malware) {
            for i in signal_range(Label::Malware, cfg.signal) {
                assert!(s.contains(&synthetic_token(i)), "{} missing signal {i}", s.id);
            }
            for i in signal_range(Label::Benign, cfg.signal) {
                assert!(!s.contains(&synthetic_token(i)));
            }
        }
    }

    #[test]
    fn rejects_degenerate_configs() {
        let mut cfg = SyntheticConfig::default();
        cfg.malware = 0;
        cfg.benign = 0;
        assert!(generate_synthetic(&cfg).is_err());
        let mut cfg = SyntheticConfig::default();
        cfg.vocab = 0;
        assert!(generate_synthetic(&cfg).is_err());
        let mut cfg = SyntheticConfig::default();
        cfg.vocab = 5;
        cfg.signal = 4;
        assert!(generate_synthetic(&cfg).is_err());
    }

    #[test]
    fn document_frequencies_match_naive_rescan() {
        let cfg = SyntheticConfig {
            malware: 50,
            benign: 50,
            vocab: 60,
            signal: 6,
            noise: 0.15,
            seed: 11,
        };
        let corpus = generate_synthetic(&cfg).unwrap();
        let vocab = super::super::fit_vocabulary(&corpus).unwrap();
        for i in 0..vocab.len() {
            let token = vocab.token(i);
            let naive = corpus.iter().filter(|s| s.contains(token)).count();
            assert_eq!(vocab.document_frequency(i) as usize, naive, "df mismatch for {token}");
        }
        // and every distinct token of the corpus is listed
        let mut distinct: Vec<&FeatureToken> = corpus.iter().flat_map(|s| &s.tokens).collect();
        distinct.sort();
        distinct.dedup();
        assert_eq!(distinct.len(), vocab.len());
    }

    #[test]
    fn family_tracks_first_planted_signal() {
        let cfg = SyntheticConfig {
            malware: 10,
            benign: 10,
            vocab: 30,
            signal: 3,
            noise: 0.0,
            seed: 1,
        };
        let corpus = generate_synthetic(&cfg).unwrap();
        for s in &corpus {
            match s.label {
                Label::Malware => assert_eq!(s.family.as_deref(), Some("fam00")),
                Label::Benign => assert!(s.family.is_none()),
            }
        }
    }
}
