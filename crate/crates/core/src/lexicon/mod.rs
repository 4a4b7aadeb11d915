//! Valence norms and content-word filtering of tagged contexts.

mod tagged;

pub use tagged::{
    filter_content_tokens, is_content_tag, parse_tagged_contexts, read_tagged_contexts,
    write_tagging_input, TaggedContexts, TaggedToken, TaggingPrep, CONTENT_TAGS,
};

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::lexicon_key;

pub const MIN_VALENCE: f64 = 0.0;
pub const MAX_VALENCE: f64 = 10.0;

#[derive(Debug, Error)]
pub enum LexiconError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{origin}: line {line}: expected `form<TAB>score`")]
    MalformedLine { origin: String, line: usize },
    #[error("{origin}: line {line}: score {value:?} is not numeric")]
    NonNumeric {
        origin: String,
        line: usize,
        value: String,
    },
    #[error("{origin}: line {line}: score {value} outside [0, 10]")]
    OutOfRange {
        origin: String,
        line: usize,
        value: f64,
    },
    #[error("{0}: lexicon has no entries")]
    Empty(String),
    #[error("{origin}: line {line}: expected `surface<TAB>lemma<TAB>pos`")]
    MalformedToken { origin: String, line: usize },
    #[error("{origin}: line {line}: token outside a `#doc:` context")]
    TokenOutsideContext { origin: String, line: usize },
    #[error("invalid strip pattern: {0}")]
    Pattern(#[from] regex::Error),
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DuplicatePolicy {
    #[default]
    FirstWins,
    /// Picks uniformly among the duplicate scores with a seeded generator.
    SeededRandom,
}

/// Read-only map from lowercased NFC word forms to valence scores in [0, 10].
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValenceLexicon {
    entries: BTreeMap<String, f64>,
    duplicate_keys: usize,
}

impl ValenceLexicon {
    /// Builds a lexicon from in-memory pairs using first-wins on duplicates.
    pub fn from_pairs<'a>(pairs: impl IntoIterator<Item = (&'a str, f64)>) -> Self {
        let mut entries = BTreeMap::new();
        let mut duplicate_keys = 0;
        for (form, score) in pairs {
            let key = lexicon_key(form);
            if entries.contains_key(&key) {
                duplicate_keys += 1;
            } else {
                entries.insert(key, score);
            }
        }
        ValenceLexicon {
            entries,
            duplicate_keys,
        }
    }

    pub fn lookup(&self, lemma: &str) -> Option<f64> {
        self.entries.get(&lexicon_key(lemma)).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Number of forms that appeared more than once in the source.
    pub fn duplicate_keys(&self) -> usize {
        self.duplicate_keys
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.entries.iter().map(|(k, v)| (k.as_str(), *v))
    }
}

/// Score of `lemma` after lowercasing, or `None` when the lexicon lacks it.
pub fn lookup_valence(lexicon: &ValenceLexicon, lemma: &str) -> Option<f64> {
    lexicon.lookup(lemma)
}

/// Parses a two-column `form<TAB>score` lexicon. Blank lines are ignored.
pub fn parse_lexicon<R: Read>(
    reader: R,
    origin: &str,
    policy: DuplicatePolicy,
    seed: u64,
) -> Result<ValenceLexicon, LexiconError> {
    let mut candidates: BTreeMap<String, Vec<f64>> = BTreeMap::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|source| LexiconError::Io {
            path: origin.into(),
            source,
        })?;
        let line_no = i + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let (form, score) = line.split_once('\t').ok_or_else(|| LexiconError::MalformedLine {
            origin: origin.to_string(),
            line: line_no,
        })?;
        if form.trim().is_empty() {
            return Err(LexiconError::MalformedLine {
                origin: origin.to_string(),
                line: line_no,
            });
        }
        let value: f64 = score.trim().parse().map_err(|_| LexiconError::NonNumeric {
            origin: origin.to_string(),
            line: line_no,
            value: score.to_string(),
        })?;
        if !(MIN_VALENCE..=MAX_VALENCE).contains(&value) {
            return Err(LexiconError::OutOfRange {
                origin: origin.to_string(),
                line: line_no,
                value,
            });
        }
        candidates.entry(lexicon_key(form.trim())).or_default().push(value);
    }
    if candidates.is_empty() {
        return Err(LexiconError::Empty(origin.to_string()));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut duplicate_keys = 0;
    let entries = candidates
        .into_iter()
        .map(|(key, scores)| {
            if scores.len() > 1 {
                duplicate_keys += 1;
            }
            let chosen = match policy {
                DuplicatePolicy::FirstWins => scores[0],
                // keys are visited in sorted order, so the draw sequence is fixed
                DuplicatePolicy::SeededRandom if scores.len() > 1 => {
                    scores[rng.gen_range(0..scores.len())]
                }
                DuplicatePolicy::SeededRandom => scores[0],
            };
            (key, chosen)
        })
        .collect();
    Ok(ValenceLexicon {
        entries,
        duplicate_keys,
    })
}

pub fn load_lexicon(
    path: &Path,
    policy: DuplicatePolicy,
    seed: u64,
) -> Result<ValenceLexicon, LexiconError> {
    let file = File::open(path).map_err(|source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_lexicon(file, &path.display().to_string(), policy, seed)
}
