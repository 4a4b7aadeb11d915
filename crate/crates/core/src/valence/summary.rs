use std::collections::BTreeMap;

use serde::Serialize;

use super::{DeltaRecord, ScoreRecord};
use crate::corpus::{Domain, TargetSpec};
use crate::stats::{mean, median};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Grouping {
    /// One group per domain.
    Domain,
    /// One group with every target.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Descriptive {
    pub mean: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
}

impl Descriptive {
    /// `None` for an empty slice.
    pub fn of(values: &[f64]) -> Option<Self> {
        if values.is_empty() {
            return None;
        }
        Some(Descriptive {
            mean: mean(values),
            median: median(values),
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

/// Percentages of negative, positive and exactly-zero deltas.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SignShares {
    pub n: usize,
    pub negative_pct: f64,
    pub positive_pct: f64,
    pub zero_pct: f64,
}

impl SignShares {
    pub fn of(deltas: impl IntoIterator<Item = f64>) -> Self {
        let (mut neg, mut pos, mut zero) = (0usize, 0usize, 0usize);
        for d in deltas {
            if d < 0.0 {
                neg += 1;
            } else if d > 0.0 {
                pos += 1;
            } else {
                zero += 1;
            }
        }
        let n = neg + pos + zero;
        let pct = |k: usize| if n == 0 { 0.0 } else { 100.0 * k as f64 / n as f64 };
        SignShares {
            n,
            negative_pct: pct(neg),
            positive_pct: pct(pos),
            zero_pct: pct(zero),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupSummary {
    pub group: String,
    pub n: usize,
    pub pnc: Descriptive,
    pub name: Descriptive,
    pub shares: SignShares,
    pub pnc_valences: Vec<f64>,
    pub name_valences: Vec<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct DomainSummary {
    pub groups: Vec<GroupSummary>,
    /// Groups omitted because they had no target with a delta.
    pub notes: Vec<String>,
}

/// Descriptive statistics of compound and name valence, plus delta sign
/// shares, per domain or over all targets. Only targets with a delta and
/// both scores contribute.
pub fn domain_summary(
    deltas: &[DeltaRecord],
    pnc_scores: &[ScoreRecord],
    name_scores: &[ScoreRecord],
    targets: &[TargetSpec],
    grouping: Grouping,
) -> DomainSummary {
    let domain_of: BTreeMap<&str, Domain> = targets.iter().map(|t| (t.target_id.as_str(), t.domain)).collect();
    let pnc: BTreeMap<&str, f64> = pnc_scores.iter().map(|s| (s.target_id.as_str(), s.valence)).collect();
    let name: BTreeMap<&str, f64> = name_scores.iter().map(|s| (s.target_id.as_str(), s.valence)).collect();

    let groups: Vec<(String, Option<Domain>)> = match grouping {
        Grouping::All => vec![("all".to_string(), None)],
        Grouping::Domain => Domain::ALL.iter().map(|d| (d.as_str().to_string(), Some(*d))).collect(),
    };

    let mut summary = DomainSummary::default();
    for (label, domain) in groups {
        let mut p = Vec::new();
        let mut n = Vec::new();
        let mut d = Vec::new();
        for rec in deltas {
            let id = rec.target_id.as_str();
            if domain.is_some() && domain_of.get(id).copied() != domain {
                continue;
            }
            if let (Some(pv), Some(nv)) = (pnc.get(id), name.get(id)) {
                p.push(*pv);
                n.push(*nv);
                d.push(rec.delta);
            }
        }
        match (Descriptive::of(&p), Descriptive::of(&n)) {
            (Some(pnc), Some(name)) => summary.groups.push(GroupSummary {
                group: label,
                n: d.len(),
                pnc,
                name,
                shares: SignShares::of(d),
                pnc_valences: p,
                name_valences: n,
            }),
            _ => summary.notes.push(format!("{label}: no scored targets, group omitted")),
        }
    }
    summary
}
