//! Pre-tagged context files and content-word filtering.
//!
//! A tagged-context file binds blocks of `surface<TAB>lemma<TAB>pos` lines to
//! documents with a `#doc:<doc_id>` header; a blank line ends the block.

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use regex::Regex;

use super::LexiconError;
use crate::corpus::Document;

/// Tags that keep a token: nouns, adjectives and full verbs (STTS).
pub const CONTENT_TAGS: [&str; 8] = [
    "NN", "ADJA", "ADJD", "VVFIN", "VVIMP", "VVINF", "VVIZU", "VVPP",
];

/// Lemma the tagger emits for unknown words.
const UNKNOWN_LEMMA: &str = "<unknown>";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TaggedToken {
    pub surface: String,
    pub lemma: String,
    pub pos: String,
}

impl TaggedToken {
    /// Empty or unknown lemmas fall back to the surface form.
    pub fn new(surface: &str, lemma: &str, pos: &str) -> Self {
        let lemma = lemma.trim();
        let lemma = if lemma.is_empty() || lemma == UNKNOWN_LEMMA {
            surface.trim()
        } else {
            lemma
        };
        TaggedToken {
            surface: surface.trim().to_string(),
            lemma: lemma.to_string(),
            pos: pos.trim().to_string(),
        }
    }
}

pub fn is_content_tag(pos: &str) -> bool {
    CONTENT_TAGS.contains(&pos)
}

pub fn filter_content_tokens(tokens: &[TaggedToken]) -> Vec<TaggedToken> {
    tokens.iter().filter(|t| is_content_tag(&t.pos)).cloned().collect()
}

/// Tagged tokens per context id. Repeated `#doc:` headers for the same id
/// append to that context.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TaggedContexts {
    contexts: BTreeMap<String, Vec<TaggedToken>>,
}

impl TaggedContexts {
    pub fn get(&self, doc_id: &str) -> Option<&[TaggedToken]> {
        self.contexts.get(doc_id).map(Vec::as_slice)
    }

    pub fn insert(&mut self, doc_id: impl Into<String>, tokens: Vec<TaggedToken>) {
        self.contexts.entry(doc_id.into()).or_default().extend(tokens);
    }

    pub fn len(&self) -> usize {
        self.contexts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.contexts.is_empty()
    }

    /// Content-word lemmas of one context, in order.
    pub fn content_lemmas(&self, doc_id: &str) -> impl Iterator<Item = &str> {
        self.get(doc_id)
            .unwrap_or(&[])
            .iter()
            .filter(|t| is_content_tag(&t.pos))
            .map(|t| t.lemma.as_str())
    }
}

pub fn parse_tagged_contexts<R: Read>(reader: R, origin: &str) -> Result<TaggedContexts, LexiconError> {
    let mut out = TaggedContexts::default();
    let mut current: Option<(String, Vec<TaggedToken>)> = None;
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|source| LexiconError::Io {
            path: origin.into(),
            source,
        })?;
        let line = line.trim_end_matches('\r');
        if let Some(id) = line.strip_prefix("#doc:") {
            if let Some((doc, tokens)) = current.take() {
                out.insert(doc, tokens);
            }
            current = Some((id.trim().to_string(), Vec::new()));
            continue;
        }
        if line.trim().is_empty() {
            if let Some((doc, tokens)) = current.take() {
                out.insert(doc, tokens);
            }
            continue;
        }
        let Some((_, tokens)) = current.as_mut() else {
            return Err(LexiconError::TokenOutsideContext {
                origin: origin.to_string(),
                line: i + 1,
            });
        };
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 || cols[0].trim().is_empty() {
            return Err(LexiconError::MalformedToken {
                origin: origin.to_string(),
                line: i + 1,
            });
        }
        tokens.push(TaggedToken::new(cols[0], cols[1], cols[2]));
    }
    if let Some((doc, tokens)) = current {
        out.insert(doc, tokens);
    }
    Ok(out)
}

pub fn read_tagged_contexts(path: &Path) -> Result<TaggedContexts, LexiconError> {
    let file = File::open(path).map_err(|source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    parse_tagged_contexts(file, &path.display().to_string())
}

/// Rewrites applied to context text before it is handed to an external
/// tagger. The defaults remove URLs and @-mentions and strip the `#` marker
/// from hashtags while keeping the word.
#[derive(Debug, Clone)]
pub struct TaggingPrep {
    rules: Vec<(Regex, String)>,
}

impl Default for TaggingPrep {
    fn default() -> Self {
        TaggingPrep::new(&[
            (r"https?://\S+", ""),
            (r"\bwww\.\S+", ""),
            (r"@\w+", ""),
            (r"#(\w)", "$1"),
        ])
        .expect("default strip patterns compile")
    }
}

impl TaggingPrep {
    pub fn new(rules: &[(&str, &str)]) -> Result<Self, LexiconError> {
        let rules = rules
            .iter()
            .map(|(p, r)| Ok((Regex::new(p)?, r.to_string())))
            .collect::<Result<_, LexiconError>>()?;
        Ok(TaggingPrep { rules })
    }

    pub fn none() -> Self {
        TaggingPrep { rules: Vec::new() }
    }

    /// Applies every rule in order and collapses runs of whitespace.
    pub fn apply(&self, text: &str) -> String {
        let mut s = text.to_string();
        for (re, rep) in &self.rules {
            s = re.replace_all(&s, rep.as_str()).into_owned();
        }
        s.split_whitespace().collect::<Vec<_>>().join(" ")
    }
}

/// Writes `#doc:<id>` / text / blank-line blocks for external tagging.
pub fn write_tagging_input<W: Write>(mut w: W, units: &[Document], prep: &TaggingPrep) -> std::io::Result<()> {
    for doc in units {
        writeln!(w, "#doc:{}", doc.doc_id)?;
        writeln!(w, "{}", prep.apply(&doc.text))?;
        writeln!(w)?;
    }
    Ok(())
}
