//! Cross-approach delta comparisons and their report tables.

use std::collections::BTreeMap;
use std::io::Write;

use serde::{Deserialize, Serialize};

use super::SentimentError;
use crate::valence::{DeltaRecord, ScoreRecord, SignShares};

pub const SIGN_BREAKDOWN_HEADER: [&str; 5] = ["source_id", "n_targets", "delta_lt_0", "delta_gt_0", "delta_eq_0"];
pub const APPROACH_COMPARISON_HEADER: [&str; 6] = [
    "source_id",
    "n_shared",
    "mode",
    "plm_more_negative",
    "plm_more_positive",
    "agree",
];
pub const TARGET_VALENCE_HEADER: [&str; 4] = ["target_id", "source_id", "v_pnc", "v_name"];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SignBreakdownRow {
    pub source_id: String,
    pub shares: SignShares,
}

/// Share of negative and positive deltas per source, in source order.
pub fn sign_breakdown(deltas_by_source: &BTreeMap<String, Vec<DeltaRecord>>) -> Vec<SignBreakdownRow> {
    deltas_by_source
        .iter()
        .map(|(source, deltas)| SignBreakdownRow {
            source_id: source.clone(),
            shares: SignShares::of(deltas.iter().map(|d| d.delta)),
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode", content = "epsilon")]
pub enum ComparisonMode {
    /// Compare the signs of the two deltas.
    SignClass,
    /// Compare delta values with a tolerance band of `epsilon`.
    NumericEpsilon(f64),
}

impl ComparisonMode {
    fn label(&self) -> &'static str {
        match self {
            ComparisonMode::SignClass => "sign",
            ComparisonMode::NumericEpsilon(_) => "epsilon",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    PlmMoreNegative,
    PlmMorePositive,
    Agree,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproachComparison {
    pub mode: ComparisonMode,
    pub n_shared: usize,
    pub plm_more_negative_pct: f64,
    pub plm_more_positive_pct: f64,
    pub agree_pct: f64,
    pub categories: Vec<(String, Category)>,
}

fn sign(x: f64) -> i8 {
    if x < 0.0 {
        -1
    } else if x > 0.0 {
        1
    } else {
        0
    }
}

fn categorize(plm: f64, norm: f64, mode: ComparisonMode) -> Category {
    use std::cmp::Ordering::*;
    let ord = match mode {
        ComparisonMode::SignClass => sign(plm).cmp(&sign(norm)),
        ComparisonMode::NumericEpsilon(eps) => {
            if plm < norm - eps {
                Less
            } else if plm > norm + eps {
                Greater
            } else {
                Equal
            }
        }
    };
    match ord {
        Less => Category::PlmMoreNegative,
        Greater => Category::PlmMorePositive,
        Equal => Category::Agree,
    }
}

/// Classifies every target present in both delta sets and reports category
/// shares in percent.
pub fn compare_approaches(
    plm_deltas: &[DeltaRecord],
    norm_deltas: &[DeltaRecord],
    mode: ComparisonMode,
) -> Result<ApproachComparison, SentimentError> {
    let norm: BTreeMap<&str, f64> = norm_deltas.iter().map(|d| (d.target_id.as_str(), d.delta)).collect();
    let plm: BTreeMap<&str, f64> = plm_deltas.iter().map(|d| (d.target_id.as_str(), d.delta)).collect();
    let categories: Vec<(String, Category)> = plm
        .iter()
        .filter_map(|(id, p)| norm.get(id).map(|n| (id.to_string(), categorize(*p, *n, mode))))
        .collect();
    if categories.is_empty() {
        return Err(SentimentError::DisjointTargets);
    }
    let n = categories.len();
    let pct = |c: Category| 100.0 * categories.iter().filter(|(_, k)| *k == c).count() as f64 / n as f64;
    Ok(ApproachComparison {
        mode,
        n_shared: n,
        plm_more_negative_pct: pct(Category::PlmMoreNegative),
        plm_more_positive_pct: pct(Category::PlmMorePositive),
        agree_pct: pct(Category::Agree),
        categories,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetValenceRow {
    pub target_id: String,
    pub source_id: String,
    pub v_pnc: Option<f64>,
    pub v_name: Option<f64>,
}

/// Compound and name valence per (target, source).
pub fn target_valence_table(scores_by_source: &BTreeMap<String, (Vec<ScoreRecord>, Vec<ScoreRecord>)>) -> Vec<TargetValenceRow> {
    let mut rows: BTreeMap<(String, String), TargetValenceRow> = BTreeMap::new();
    for (source, (pnc, name)) in scores_by_source {
        for (scores, is_pnc) in [(pnc, true), (name, false)] {
            for s in scores {
                let row = rows
                    .entry((s.target_id.clone(), source.clone()))
                    .or_insert_with(|| TargetValenceRow {
                        target_id: s.target_id.clone(),
                        source_id: source.clone(),
                        v_pnc: None,
                        v_name: None,
                    });
                if is_pnc {
                    row.v_pnc = Some(s.valence);
                } else {
                    row.v_name = Some(s.valence);
                }
            }
        }
    }
    rows.into_values().collect()
}

fn two_dp(v: f64) -> String {
    format!("{v:.2}")
}

pub fn write_sign_breakdown_csv<W: Write>(w: W, rows: &[SignBreakdownRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(SIGN_BREAKDOWN_HEADER)?;
    for r in rows {
        w.write_record([
            r.source_id.clone(),
            r.shares.n.to_string(),
            two_dp(r.shares.negative_pct),
            two_dp(r.shares.positive_pct),
            two_dp(r.shares.zero_pct),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_approach_comparison_csv<W: Write>(w: W, rows: &[(String, ApproachComparison)]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(APPROACH_COMPARISON_HEADER)?;
    for (source, c) in rows {
        w.write_record([
            source.clone(),
            c.n_shared.to_string(),
            c.mode.label().to_string(),
            two_dp(c.plm_more_negative_pct),
            two_dp(c.plm_more_positive_pct),
            two_dp(c.agree_pct),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_target_valence_csv<W: Write>(w: W, rows: &[TargetValenceRow]) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(TARGET_VALENCE_HEADER)?;
    let opt = |v: Option<f64>| v.map(two_dp).unwrap_or_default();
    for r in rows {
        w.write_record([r.target_id.clone(), r.source_id.clone(), opt(r.v_pnc), opt(r.v_name)])?;
    }
    w.flush()?;
    Ok(())
}
