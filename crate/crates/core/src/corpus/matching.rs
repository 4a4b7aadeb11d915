use rayon::prelude::*;
use regex::{Regex, RegexBuilder};
use serde::{Deserialize, Serialize};

use super::{generate_variants, ContextMatch, CorpusError, Document, MatchKind, TargetSpec, VariantPattern, VariantSet};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum UnitPolicy {
    /// One document is one context (tweets).
    #[default]
    WholeDocument,
    /// Each sentence of a document is its own context (news).
    PerSentence,
}

#[derive(Debug, Clone, Default)]
pub struct MatchOptions {
    pub unit_policy: UnitPolicy,
    pub case_insensitive: bool,
    /// Drop full-name matches from documents that also contain the compound.
    pub exclude_overlaps: bool,
}

/// Splits documents into context units. Under [`UnitPolicy::PerSentence`], a
/// document with more than one sentence yields documents `"{doc_id}#{k}"`
/// (k from 1); single-sentence documents keep their id.
pub fn context_units(corpus: &[Document], policy: UnitPolicy) -> Vec<Document> {
    match policy {
        UnitPolicy::WholeDocument => corpus.to_vec(),
        UnitPolicy::PerSentence => corpus
            .iter()
            .flat_map(|doc| {
                let sentences = split_sentences(&doc.text);
                let single = sentences.len() <= 1;
                sentences.into_iter().enumerate().map(move |(k, s)| Document {
                    doc_id: if single {
                        doc.doc_id.clone()
                    } else {
                        format!("{}#{}", doc.doc_id, k + 1)
                    },
                    text: s.to_string(),
                    ..doc.clone()
                })
            })
            .collect(),
    }
}

/// Sentence boundaries fall after a run of `.`, `!` or `?` that is followed
/// by whitespace.
fn split_sentences(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut start = 0;
    let mut chars = text.char_indices().peekable();
    while let Some((i, c)) = chars.next() {
        if matches!(c, '.' | '!' | '?') {
            let mut end = i + c.len_utf8();
            while let Some(&(j, next)) = chars.peek() {
                if matches!(next, '.' | '!' | '?') {
                    end = j + next.len_utf8();
                    chars.next();
                } else {
                    break;
                }
            }
            if chars.peek().is_some_and(|(_, n)| n.is_whitespace()) {
                let sentence = text[start..end].trim();
                if !sentence.is_empty() {
                    out.push(sentence);
                }
                start = end;
            }
        }
    }
    let tail = text[start..].trim();
    if !tail.is_empty() {
        out.push(tail);
    }
    out
}

struct CompiledTarget {
    target_id: String,
    variant_texts: Vec<String>,
    compound: Regex,
    full_name: Regex,
    full_name_text: String,
}

/// Compiled search patterns for a target list.
pub struct Matcher {
    targets: Vec<CompiledTarget>,
    options: MatchOptions,
}

fn variant_regex(set: &VariantSet) -> String {
    let alternatives: Vec<String> = set
        .variants
        .iter()
        .map(|v| match &v.pattern {
            VariantPattern::Literal(s) => format!("({})", regex::escape(s)),
            VariantPattern::Gap {
                modifier,
                head,
                max_gap,
            } => format!(
                "({}.{{0,{}}}{})",
                regex::escape(modifier),
                max_gap,
                regex::escape(head)
            ),
        })
        .collect();
    alternatives.join("|")
}

impl Matcher {
    pub fn new(targets: &[TargetSpec], options: MatchOptions) -> Result<Self, CorpusError> {
        let build = |pattern: &str| {
            RegexBuilder::new(pattern)
                .case_insensitive(options.case_insensitive)
                .build()
        };
        let targets = targets
            .iter()
            .map(|t| {
                let set = generate_variants(t)?;
                let full_name_text = t.full_name();
                Ok(CompiledTarget {
                    target_id: t.target_id.clone(),
                    compound: build(&variant_regex(&set))?,
                    full_name: build(&regex::escape(&full_name_text))?,
                    variant_texts: set.variants.into_iter().map(|v| v.text).collect(),
                    full_name_text,
                })
            })
            .collect::<Result<Vec<_>, CorpusError>>()?;
        Ok(Matcher { targets, options })
    }

    fn match_document(&self, doc: &Document, out: &mut Vec<ContextMatch>) {
        for target in &self.targets {
            let before = out.len();
            // leftmost-first alternation: at equal start the earlier variant wins
            for caps in target.compound.captures_iter(&doc.text) {
                let whole = caps.get(0).expect("group 0");
                let idx = (1..caps.len())
                    .find(|&i| caps.get(i).is_some())
                    .expect("one alternative matched");
                out.push(ContextMatch {
                    target_id: target.target_id.clone(),
                    doc_id: doc.doc_id.clone(),
                    kind: MatchKind::Pnc,
                    matched_variant: target.variant_texts[idx - 1].clone(),
                    byte_start: whole.start(),
                    byte_end: whole.end(),
                });
            }
            let has_compound = out.len() > before;
            if has_compound && self.options.exclude_overlaps {
                continue;
            }
            for m in target.full_name.find_iter(&doc.text) {
                out.push(ContextMatch {
                    target_id: target.target_id.clone(),
                    doc_id: doc.doc_id.clone(),
                    kind: MatchKind::FullName,
                    matched_variant: target.full_name_text.clone(),
                    byte_start: m.start(),
                    byte_end: m.end(),
                });
            }
        }
    }

    /// Matches already-split context units. Runs in parallel over documents;
    /// output is sorted by (target_id, doc_id, byte_start).
    pub fn match_units(&self, units: &[Document]) -> Vec<ContextMatch> {
        let mut matches: Vec<ContextMatch> = units
            .par_iter()
            .flat_map_iter(|doc| {
                let mut local = Vec::new();
                self.match_document(doc, &mut local);
                local
            })
            .collect();
        matches.sort_by(|a, b| {
            (&a.target_id, &a.doc_id, a.byte_start, a.kind, a.byte_end)
                .cmp(&(&b.target_id, &b.doc_id, b.byte_start, b.kind, b.byte_end))
        });
        matches
    }
}

/// Finds every compound-variant and full-name occurrence of every target in
/// the corpus after applying the unit policy.
pub fn match_contexts(
    corpus: &[Document],
    targets: &[TargetSpec],
    options: &MatchOptions,
) -> Result<Vec<ContextMatch>, CorpusError> {
    let matcher = Matcher::new(targets, options.clone())?;
    let units = context_units(corpus, options.unit_policy);
    Ok(matcher.match_units(&units))
}
