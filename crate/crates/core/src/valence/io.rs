use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::Deserialize;

use super::{Approach, DeltaRecord, ScoreKind, ScoreRecord, ValenceError};

fn csv_err(e: impl std::fmt::Display) -> ValenceError {
    ValenceError::Parse(e.to_string())
}

pub fn write_scores_csv<W: Write>(writer: W, scores: &[ScoreRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["target_id", "kind", "approach", "valence", "n_context_lemmas", "n_contexts"])?;
    for s in scores {
        w.write_record([
            s.target_id.clone(),
            s.kind.as_str().to_string(),
            s.approach.to_string(),
            s.valence.to_string(),
            s.n_context_lemmas.to_string(),
            s.n_contexts.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_deltas_csv<W: Write>(writer: W, deltas: &[DeltaRecord]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["target_id", "approach", "delta", "modifier_delta"])?;
    for d in deltas {
        w.write_record([
            d.target_id.clone(),
            d.approach.to_string(),
            d.delta.to_string(),
            d.modifier_delta.map(|v| v.to_string()).unwrap_or_default(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Deserialize)]
struct ScoreRow {
    target_id: String,
    kind: String,
    approach: String,
    valence: f64,
    n_context_lemmas: usize,
    n_contexts: usize,
}

#[derive(Deserialize)]
struct DeltaRow {
    target_id: String,
    approach: String,
    delta: f64,
    modifier_delta: Option<f64>,
}

fn reader(path: &Path) -> Result<csv::Reader<File>, ValenceError> {
    let file = File::open(path).map_err(|e| ValenceError::Parse(format!("{}: {e}", path.display())))?;
    Ok(csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(file))
}

pub fn read_scores_csv(path: &Path) -> Result<Vec<ScoreRecord>, ValenceError> {
    reader(path)?
        .deserialize::<ScoreRow>()
        .map(|row| {
            let row = row.map_err(csv_err)?;
            Ok(ScoreRecord {
                target_id: row.target_id,
                kind: row.kind.parse::<ScoreKind>().map_err(ValenceError::Parse)?,
                valence: row.valence,
                n_context_lemmas: row.n_context_lemmas,
                n_contexts: row.n_contexts,
                approach: row.approach.parse::<Approach>().map_err(ValenceError::Parse)?,
            })
        })
        .collect()
}

pub fn read_deltas_csv(path: &Path) -> Result<Vec<DeltaRecord>, ValenceError> {
    reader(path)?
        .deserialize::<DeltaRow>()
        .map(|row| {
            let row = row.map_err(csv_err)?;
            Ok(DeltaRecord {
                target_id: row.target_id,
                delta: row.delta,
                modifier_delta: row.modifier_delta,
                approach: row.approach.parse::<Approach>().map_err(ValenceError::Parse)?,
            })
        })
        .collect()
}
