use std::collections::BTreeMap;

use serde::Serialize;

use super::ValenceError;
use crate::corpus::{context_ids, ContextMatch, MatchKind};
use crate::lexicon::{TaggedContexts, ValenceLexicon};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WordCount {
    pub lemma: String,
    pub count: usize,
    pub valence: Option<f64>,
}

/// Top `k` content-word lemmas across a target's contexts of one kind, by
/// descending count with ties broken lexicographically.
pub fn frequent_context_words(
    target_id: &str,
    kind: MatchKind,
    matches: &[ContextMatch],
    tagged: &TaggedContexts,
    lexicon: &ValenceLexicon,
    k: usize,
) -> Result<Vec<WordCount>, ValenceError> {
    if k == 0 {
        return Err(ValenceError::InvalidK);
    }
    let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in context_ids(matches, target_id, kind) {
        for lemma in tagged.content_lemmas(doc) {
            *counts.entry(lemma).or_default() += 1;
        }
    }
    let mut ranked: Vec<(&str, usize)> = counts.into_iter().collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    Ok(ranked
        .into_iter()
        .take(k)
        .map(|(lemma, count)| WordCount {
            lemma: lemma.to_string(),
            count,
            valence: lexicon.lookup(lemma),
        })
        .collect())
}
