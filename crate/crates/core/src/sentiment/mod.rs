//! Sentiment labels as a valence proxy.
//!
//! Labels come from label files, from an inference service speaking the
//! `POST /classify` JSON contract, or from human annotators. A label
//! histogram maps onto the valence scale as
//! `(positives + 0.5 * neutrals) / total * 10`.

mod client;
mod compare;
mod iaa;

pub use client::{
    classify_contexts, BatchFailure, ClassificationOutcome, ClassifyConfig, ClassifyItem, Classifier,
    ClassifierError, HttpClassifier, ItemError, RetryPolicy,
};
pub use compare::{
    compare_approaches, sign_breakdown, target_valence_table, write_approach_comparison_csv,
    write_sign_breakdown_csv, write_target_valence_csv, ApproachComparison, Category, ComparisonMode,
    SignBreakdownRow, TargetValenceRow, APPROACH_COMPARISON_HEADER, SIGN_BREAKDOWN_HEADER,
    TARGET_VALENCE_HEADER,
};
pub use iaa::{pairwise_iaa, IaaResult, PairAgreement};

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::{ContextMatch, MatchKind};
use crate::valence::{Approach, ScoreKind, ScoreRecord};

#[derive(Debug, Error)]
pub enum SentimentError {
    #[error("{origin}: line {line}: {message}")]
    Parse {
        origin: String,
        line: usize,
        message: String,
    },
    #[error("duplicate label for target {target_id}, context {context_id}, source {source_id}")]
    DuplicateLabel {
        target_id: String,
        context_id: String,
        source_id: String,
    },
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("batch size must be at least 1")]
    InvalidBatchSize,
    #[error("no label observed")]
    Unscorable,
    #[error("delta sets share no target")]
    DisjointTargets,
    #[error("need at least two annotators, got {0}")]
    TooFewAnnotators(usize),
    #[error("could not build thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Negative,
    Neutral,
    Positive,
}

impl Label {
    /// Ordinal code, negative < neutral < positive.
    pub fn ordinal(&self) -> f64 {
        match self {
            Label::Negative => 0.0,
            Label::Neutral => 1.0,
            Label::Positive => 2.0,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Label::Negative => "negative",
            Label::Neutral => "neutral",
            Label::Positive => "positive",
        }
    }
}

impl std::str::FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "negative" => Ok(Label::Negative),
            "neutral" => Ok(Label::Neutral),
            "positive" => Ok(Label::Positive),
            _ => Err(format!("label {s:?} is not negative, neutral or positive")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LabelRecord {
    pub target_id: String,
    pub context_id: String,
    pub label: Label,
    pub source_id: String,
}

fn check_unique(records: &[LabelRecord]) -> Result<(), SentimentError> {
    let mut seen = HashSet::new();
    for r in records {
        if !seen.insert((&r.target_id, &r.context_id, &r.source_id)) {
            return Err(SentimentError::DuplicateLabel {
                target_id: r.target_id.clone(),
                context_id: r.context_id.clone(),
                source_id: r.source_id.clone(),
            });
        }
    }
    Ok(())
}

pub fn parse_labels_jsonl<R: Read>(reader: R, origin: &str) -> Result<Vec<LabelRecord>, SentimentError> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|source| SentimentError::Io {
            path: origin.to_string(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: LabelRecord = serde_json::from_str(&line).map_err(|e| SentimentError::Parse {
            origin: origin.to_string(),
            line: i + 1,
            message: e.to_string(),
        })?;
        out.push(rec);
    }
    check_unique(&out)?;
    Ok(out)
}

pub fn read_labels_jsonl(path: &Path) -> Result<Vec<LabelRecord>, SentimentError> {
    let file = File::open(path).map_err(|source| SentimentError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse_labels_jsonl(file, &path.display().to_string())
}

/// One JSON object per line, fields in `target_id, context_id, label,
/// source_id` order.
pub fn write_labels_jsonl<W: Write>(mut w: W, records: &[LabelRecord]) -> std::io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        writeln!(w)?;
    }
    Ok(())
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct LabelHistogram {
    pub target_id: String,
    pub source_id: String,
    pub n_pos: usize,
    pub n_neu: usize,
    pub n_neg: usize,
}

impl LabelHistogram {
    pub fn new(target_id: &str, source_id: &str, n_pos: usize, n_neu: usize, n_neg: usize) -> Self {
        LabelHistogram {
            target_id: target_id.to_string(),
            source_id: source_id.to_string(),
            n_pos,
            n_neu,
            n_neg,
        }
    }

    pub fn total(&self) -> usize {
        self.n_pos + self.n_neu + self.n_neg
    }

    fn add(&mut self, label: Label) {
        match label {
            Label::Positive => self.n_pos += 1,
            Label::Neutral => self.n_neu += 1,
            Label::Negative => self.n_neg += 1,
        }
    }
}

/// Weighted label valence `(n_pos + 0.5 n_neu) / total * 10`.
pub fn eq2_valence(hist: &LabelHistogram) -> Result<f64, SentimentError> {
    let total = hist.total();
    if total == 0 {
        return Err(SentimentError::Unscorable);
    }
    Ok((hist.n_pos as f64 + 0.5 * hist.n_neu as f64) / total as f64 * 10.0)
}

/// Label histograms per (target, source) over the contexts in which the
/// target occurs as `kind`. `source_of` maps a label's source id onto the
/// aggregation source (returning `None` drops the label), which lets several
/// annotators pool into one source.
pub fn aggregate_labels(
    labels: &[LabelRecord],
    matches: &[ContextMatch],
    kind: MatchKind,
    source_of: impl Fn(&str) -> Option<String>,
) -> Vec<LabelHistogram> {
    let contexts: BTreeSet<(&str, &str)> = matches
        .iter()
        .filter(|m| m.kind == kind)
        .map(|m| (m.target_id.as_str(), m.doc_id.as_str()))
        .collect();
    let mut hists: BTreeMap<(String, String), LabelHistogram> = BTreeMap::new();
    for rec in labels {
        if !contexts.contains(&(rec.target_id.as_str(), rec.context_id.as_str())) {
            continue;
        }
        let Some(source) = source_of(&rec.source_id) else {
            continue;
        };
        hists
            .entry((rec.target_id.clone(), source.clone()))
            .or_insert_with(|| LabelHistogram::new(&rec.target_id, &source, 0, 0, 0))
            .add(rec.label);
    }
    hists.into_values().collect()
}

/// Score record for a histogram; `n_context_lemmas` carries the label total.
pub fn histogram_score(
    hist: &LabelHistogram,
    kind: ScoreKind,
    approach: Approach,
    n_contexts: usize,
) -> Result<ScoreRecord, SentimentError> {
    Ok(ScoreRecord {
        target_id: hist.target_id.clone(),
        kind,
        valence: eq2_valence(hist)?,
        n_context_lemmas: hist.total(),
        n_contexts,
        approach,
    })
}
