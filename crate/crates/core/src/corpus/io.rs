use std::collections::HashSet;
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use serde::Deserialize;

use super::{validate_target_list, ContextMatch, CorpusError, Document, MatchKind, TargetSpec, VariantSet};
use crate::text::nfc;

#[derive(Debug, Deserialize)]
struct TargetRow {
    target_id: String,
    pnc_surface: String,
    #[serde(default)]
    modifier_surface: String,
    #[serde(default)]
    head_surface: String,
    first_name: String,
    last_name: String,
    domain: String,
    #[serde(default)]
    alt_spellings: String,
    #[serde(default)]
    modifier_lemma: String,
}

fn open(path: &Path) -> Result<File, CorpusError> {
    File::open(path).map_err(|source| CorpusError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Parses a targets CSV (`target_id,pnc_surface,modifier_surface,head_surface,
/// first_name,last_name,domain,alt_spellings[,modifier_lemma]`).
/// `alt_spellings` is semicolon-joined.
pub fn parse_targets_csv<R: Read>(reader: R, origin: &str) -> Result<Vec<TargetSpec>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut targets = Vec::new();
    for (i, row) in rdr.deserialize::<TargetRow>().enumerate() {
        let row = row?;
        let line = i as u64 + 2;
        let domain = row.domain.parse().map_err(|message| CorpusError::Parse {
            path: origin.to_string(),
            line,
            message,
        })?;
        let alts = row
            .alt_spellings
            .split(';')
            .map(str::to_string)
            .collect();
        let target = TargetSpec::new(
            row.target_id,
            &row.pnc_surface,
            Some(row.modifier_surface.as_str()),
            Some(row.head_surface.as_str()),
            &row.first_name,
            &row.last_name,
            domain,
            alts,
        )?
        .with_modifier_lemma(row.modifier_lemma);
        targets.push(target);
    }
    validate_target_list(&targets)?;
    Ok(targets)
}

pub fn read_targets_csv(path: &Path) -> Result<Vec<TargetSpec>, CorpusError> {
    parse_targets_csv(open(path)?, &path.display().to_string())
}

/// Parses a JSONL corpus, one [`Document`] per line. Text is NFC-normalized;
/// blank lines are skipped.
pub fn parse_corpus_jsonl<R: Read>(reader: R, origin: &str) -> Result<Vec<Document>, CorpusError> {
    let mut docs = Vec::new();
    let mut ids = HashSet::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|source| CorpusError::Io {
            path: origin.into(),
            source,
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let mut doc: Document = serde_json::from_str(&line).map_err(|e| CorpusError::Parse {
            path: origin.to_string(),
            line: i as u64 + 1,
            message: e.to_string(),
        })?;
        doc.text = nfc(&doc.text);
        if doc.text.trim().is_empty() {
            return Err(CorpusError::EmptyText(doc.doc_id));
        }
        if !ids.insert(doc.doc_id.clone()) {
            return Err(CorpusError::DuplicateDocument(doc.doc_id));
        }
        docs.push(doc);
    }
    Ok(docs)
}

pub fn read_corpus_jsonl(path: &Path) -> Result<Vec<Document>, CorpusError> {
    parse_corpus_jsonl(open(path)?, &path.display().to_string())
}

pub fn write_variants_csv<W: Write>(writer: W, sets: &[VariantSet]) -> Result<(), CorpusError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["target_id", "variant", "heuristic"])?;
    for set in sets {
        for v in &set.variants {
            w.write_record([set.target_id.as_str(), v.text.as_str(), v.heuristic.as_str()])?;
        }
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

pub fn write_matches_csv<W: Write>(writer: W, matches: &[ContextMatch]) -> Result<(), CorpusError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["target_id", "doc_id", "kind", "matched_variant", "byte_start", "byte_end"])?;
    for m in matches {
        w.write_record([
            m.target_id.as_str(),
            m.doc_id.as_str(),
            m.kind.as_str(),
            m.matched_variant.as_str(),
            &m.byte_start.to_string(),
            &m.byte_end.to_string(),
        ])?;
    }
    w.flush().map_err(csv::Error::from)?;
    Ok(())
}

#[derive(Deserialize)]
struct MatchRow {
    target_id: String,
    doc_id: String,
    kind: String,
    matched_variant: String,
    byte_start: usize,
    byte_end: usize,
}

/// Reads a matches CSV written by [`write_matches_csv`]; `#` comment lines
/// are skipped.
pub fn read_matches_csv(path: &Path) -> Result<Vec<ContextMatch>, CorpusError> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(open(path)?);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize::<MatchRow>().enumerate() {
        let row = row?;
        let kind: MatchKind = row.kind.parse().map_err(|message| CorpusError::Parse {
            path: path.display().to_string(),
            line: i as u64 + 2,
            message,
        })?;
        out.push(ContextMatch {
            target_id: row.target_id,
            doc_id: row.doc_id,
            kind,
            matched_variant: row.matched_variant,
            byte_start: row.byte_start,
            byte_end: row.byte_end,
        });
    }
    Ok(out)
}
