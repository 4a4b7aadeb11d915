//! Target lists, corpora and per-target context extraction.
//!
//! A target is a personal name compound (PNC) such as `Tore-Klose` together
//! with the full name of its referent. Contexts are whole documents (tweets)
//! or sentences (news) that contain either a search variant of the compound
//! or the exact full name.

mod io;
mod matching;
mod variants;

pub use io::{
    read_corpus_jsonl, read_matches_csv, read_targets_csv, write_matches_csv, write_variants_csv,
    parse_corpus_jsonl, parse_targets_csv,
};
pub use matching::{context_units, match_contexts, MatchOptions, Matcher, UnitPolicy};
pub use variants::{generate_variants, Heuristic, Variant, VariantPattern, VariantSet};

use std::collections::{BTreeMap, HashSet};
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::text::nfc;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("target {target_id}: {reason}")]
    MalformedTarget { target_id: String, reason: String },
    #[error("duplicate target_id {0}")]
    DuplicateTarget(String),
    #[error("duplicate doc_id {0}")]
    DuplicateDocument(String),
    #[error("document {0} has empty text")]
    EmptyText(String),
    #[error("min_freq must be at least 1, got {0}")]
    InvalidMinFreq(usize),
    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("invalid wildcard pattern: {0}")]
    Pattern(#[from] regex::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    Politics,
    Sports,
    ShowBusiness,
    Others,
}

impl Domain {
    pub const ALL: [Domain; 4] = [
        Domain::Politics,
        Domain::Sports,
        Domain::ShowBusiness,
        Domain::Others,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Domain::Politics => "politics",
            Domain::Sports => "sports",
            Domain::ShowBusiness => "show_business",
            Domain::Others => "others",
        }
    }
}

impl std::str::FromStr for Domain {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Domain::ALL
            .into_iter()
            .find(|d| d.as_str() == s.trim())
            .ok_or_else(|| format!("unknown domain {s:?}"))
    }
}

impl std::fmt::Display for Domain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// A personal name compound linked to the full name of its referent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TargetSpec {
    pub target_id: String,
    pub pnc_surface: String,
    pub modifier_surface: String,
    pub head_surface: String,
    pub first_name: String,
    pub last_name: String,
    pub domain: Domain,
    pub alt_spellings: Vec<String>,
    /// Manually determined modifier lemma, used for modifier valence.
    pub modifier_lemma: Option<String>,
}

impl TargetSpec {
    /// Builds a target from its compound surface, splitting on the single
    /// hyphen when modifier and head are not given explicitly. All strings are
    /// NFC-normalized.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        target_id: impl Into<String>,
        pnc_surface: &str,
        modifier_surface: Option<&str>,
        head_surface: Option<&str>,
        first_name: &str,
        last_name: &str,
        domain: Domain,
        alt_spellings: Vec<String>,
    ) -> Result<Self, CorpusError> {
        let target_id = target_id.into();
        let pnc = nfc(pnc_surface.trim());
        let malformed = |reason: String| CorpusError::MalformedTarget {
            target_id: target_id.clone(),
            reason,
        };
        let (modifier, head) = match (
            modifier_surface.map(str::trim).filter(|s| !s.is_empty()),
            head_surface.map(str::trim).filter(|s| !s.is_empty()),
        ) {
            (Some(m), Some(h)) => (nfc(m), nfc(h)),
            (None, None) => {
                let parts: Vec<&str> = pnc.split('-').collect();
                if parts.len() != 2 {
                    return Err(malformed(format!(
                        "{pnc:?} must contain exactly one hyphen or give modifier and head explicitly"
                    )));
                }
                (parts[0].to_string(), parts[1].to_string())
            }
            _ => {
                return Err(malformed(
                    "modifier_surface and head_surface must be given together".into(),
                ))
            }
        };
        let target = TargetSpec {
            pnc_surface: pnc,
            modifier_surface: modifier,
            head_surface: head,
            first_name: nfc(first_name.trim()),
            last_name: nfc(last_name.trim()),
            domain,
            alt_spellings: alt_spellings
                .iter()
                .map(|s| nfc(s.trim()))
                .filter(|s| !s.is_empty())
                .collect(),
            modifier_lemma: None,
            target_id,
        };
        target.validate()?;
        Ok(target)
    }

    pub fn with_modifier_lemma(mut self, lemma: impl Into<String>) -> Self {
        let lemma = lemma.into();
        self.modifier_lemma = (!lemma.trim().is_empty()).then(|| nfc(lemma.trim()));
        self
    }

    /// Checks that modifier and head are non-empty and that they join with
    /// exactly one separator character to the compound surface.
    pub fn validate(&self) -> Result<(), CorpusError> {
        let malformed = |reason: String| CorpusError::MalformedTarget {
            target_id: self.target_id.clone(),
            reason,
        };
        if self.target_id.trim().is_empty() {
            return Err(malformed("empty target_id".into()));
        }
        if self.modifier_surface.is_empty() || self.head_surface.is_empty() {
            return Err(malformed("no separable modifier and head".into()));
        }
        if self.separator().is_none() {
            return Err(malformed(format!(
                "{:?} is not {:?} + one separator + {:?}",
                self.pnc_surface, self.modifier_surface, self.head_surface
            )));
        }
        if self.first_name.is_empty() || self.last_name.is_empty() {
            return Err(malformed("missing first or last name".into()));
        }
        Ok(())
    }

    /// The single character between modifier and head in the compound surface.
    pub fn separator(&self) -> Option<&str> {
        let rest = self.pnc_surface.strip_prefix(&self.modifier_surface)?;
        let sep = rest.strip_suffix(&self.head_surface)?;
        (sep.chars().count() == 1).then_some(sep)
    }

    pub fn full_name(&self) -> String {
        format!("{} {}", self.first_name, self.last_name)
    }
}

/// Checks target_id uniqueness across a target list.
pub fn validate_target_list(targets: &[TargetSpec]) -> Result<(), CorpusError> {
    let mut seen = HashSet::new();
    for t in targets {
        if !seen.insert(t.target_id.as_str()) {
            return Err(CorpusError::DuplicateTarget(t.target_id.clone()));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    Tweet,
    NewsSentence,
    Other,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub source: Source,
    pub text: String,
    #[serde(default)]
    pub url: Option<String>,
    #[serde(default)]
    pub date: Option<String>,
}

impl Document {
    pub fn new(doc_id: impl Into<String>, source: Source, text: &str) -> Self {
        Document {
            doc_id: doc_id.into(),
            source,
            text: nfc(text),
            url: None,
            date: None,
        }
    }

    pub fn with_url(mut self, url: impl Into<String>) -> Self {
        self.url = Some(url.into());
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MatchKind {
    Pnc,
    FullName,
}

impl MatchKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            MatchKind::Pnc => "pnc",
            MatchKind::FullName => "full_name",
        }
    }
}

impl std::str::FromStr for MatchKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pnc" => Ok(MatchKind::Pnc),
            "full_name" => Ok(MatchKind::FullName),
            other => Err(format!("unknown match kind {other:?}")),
        }
    }
}

/// One occurrence of a target (compound variant or full name) in a document.
/// Spans are byte offsets into the NFC-normalized document text.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ContextMatch {
    pub target_id: String,
    pub doc_id: String,
    pub kind: MatchKind,
    pub matched_variant: String,
    pub byte_start: usize,
    pub byte_end: usize,
}

/// Keeps the first document per distinct URL; documents without a URL are
/// always kept. Order is preserved.
pub fn dedupe_documents(corpus: Vec<Document>) -> Vec<Document> {
    let mut seen = HashSet::new();
    corpus
        .into_iter()
        .filter(|d| match &d.url {
            Some(url) => seen.insert(url.clone()),
            None => true,
        })
        .collect()
}

/// Distinct context ids in which `target_id` occurs as `kind`, sorted.
pub fn context_ids<'a>(matches: &'a [ContextMatch], target_id: &str, kind: MatchKind) -> Vec<&'a str> {
    let ids: std::collections::BTreeSet<&str> = matches
        .iter()
        .filter(|m| m.target_id == target_id && m.kind == kind)
        .map(|m| m.doc_id.as_str())
        .collect();
    ids.into_iter().collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TargetCount {
    pub target_id: String,
    pub pnc_matches: usize,
    pub full_name_matches: usize,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct FrequencyReport {
    pub retained: Vec<TargetCount>,
    pub dropped: Vec<TargetCount>,
}

impl FrequencyReport {
    pub fn is_retained(&self, target_id: &str) -> bool {
        self.retained.iter().any(|t| t.target_id == target_id)
    }
}

/// Splits targets by whether their compound match count reaches `min_freq`.
/// Targets are reported in target_id order.
pub fn frequency_filter(
    targets: &[TargetSpec],
    matches: &[ContextMatch],
    min_freq: usize,
) -> Result<FrequencyReport, CorpusError> {
    if min_freq < 1 {
        return Err(CorpusError::InvalidMinFreq(min_freq));
    }
    let mut counts: BTreeMap<&str, (usize, usize)> = targets
        .iter()
        .map(|t| (t.target_id.as_str(), (0, 0)))
        .collect();
    for m in matches {
        if let Some(c) = counts.get_mut(m.target_id.as_str()) {
            match m.kind {
                MatchKind::Pnc => c.0 += 1,
                MatchKind::FullName => c.1 += 1,
            }
        }
    }
    let mut report = FrequencyReport::default();
    for (id, (pnc, name)) in counts {
        let count = TargetCount {
            target_id: id.to_string(),
            pnc_matches: pnc,
            full_name_matches: name,
        };
        if pnc >= min_freq {
            report.retained.push(count);
        } else {
            report.dropped.push(count);
        }
    }
    Ok(report)
}
