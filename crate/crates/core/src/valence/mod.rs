//! Lexicon-based valence of compounds, names and modifiers, and the
//! compound-name delta.
//!
//! A target's valence is the mean lexicon score over the content-word lemmas
//! of all its contexts that resolve in the lexicon. Lemmas missing from the
//! lexicon are skipped rather than imputed.

mod io;
mod plot;
mod summary;
mod words;

pub use io::{read_deltas_csv, read_scores_csv, write_deltas_csv, write_scores_csv};
pub use plot::{name_pnc_plot_data, NamePlotEntry, PncPoint};
pub use summary::{domain_summary, Descriptive, DomainSummary, GroupSummary, Grouping, SignShares};
pub use words::{frequent_context_words, WordCount};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::TargetSpec;
use crate::lexicon::ValenceLexicon;

#[derive(Debug, Error, PartialEq)]
pub enum ValenceError {
    #[error("no context lemma resolves in the lexicon")]
    Unscorable,
    #[error("pnc scores use approach {pnc} but name scores use {name}")]
    ApproachMismatch { pnc: String, name: String },
    #[error("expected {expected} scores, found a {found} score for {target_id}")]
    WrongKind {
        target_id: String,
        expected: &'static str,
        found: &'static str,
    },
    #[error("k must be at least 1")]
    InvalidK,
    #[error("{0}")]
    Parse(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScoreKind {
    Pnc,
    FullName,
    Modifier,
}

impl ScoreKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ScoreKind::Pnc => "pnc",
            ScoreKind::FullName => "full_name",
            ScoreKind::Modifier => "modifier",
        }
    }
}

impl std::str::FromStr for ScoreKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pnc" => Ok(ScoreKind::Pnc),
            "full_name" => Ok(ScoreKind::FullName),
            "modifier" => Ok(ScoreKind::Modifier),
            other => Err(format!("unknown score kind {other:?}")),
        }
    }
}

/// Where a valence score comes from.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Approach {
    Norms,
    /// Sentiment labels of one model.
    Plm(String),
    /// Sentiment labels pooled over human annotators.
    Human,
}

impl std::fmt::Display for Approach {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Approach::Norms => f.write_str("norms"),
            Approach::Plm(id) => write!(f, "plm:{id}"),
            Approach::Human => f.write_str("human"),
        }
    }
}

impl std::str::FromStr for Approach {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "norms" => Ok(Approach::Norms),
            "human" => Ok(Approach::Human),
            other => match other.strip_prefix("plm:") {
                Some(id) if !id.is_empty() => Ok(Approach::Plm(id.to_string())),
                _ => Err(format!("unknown approach {other:?}")),
            },
        }
    }
}

impl Serialize for Approach {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreRecord {
    pub target_id: String,
    pub kind: ScoreKind,
    pub valence: f64,
    /// Resolved lemmas for the norms approach; total labels for label-based
    /// approaches.
    pub n_context_lemmas: usize,
    pub n_contexts: usize,
    pub approach: Approach,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeltaRecord {
    pub target_id: String,
    /// Compound valence minus name valence; negative means the compound is
    /// the more negative of the two.
    pub delta: f64,
    /// Modifier valence minus compound valence.
    pub modifier_delta: Option<f64>,
    pub approach: Approach,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValenceMean {
    pub valence: f64,
    pub n_resolved: usize,
}

/// Mean lexicon score of the lemmas that resolve in `lexicon`.
pub fn target_valence<'a, I>(lemmas: I, lexicon: &ValenceLexicon) -> Result<ValenceMean, ValenceError>
where
    I: IntoIterator<Item = &'a str>,
{
    let (sum, n) = lemmas
        .into_iter()
        .filter_map(|l| lexicon.lookup(l))
        .fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        return Err(ValenceError::Unscorable);
    }
    Ok(ValenceMean {
        valence: sum / n as f64,
        n_resolved: n,
    })
}

/// How lemmas from several contexts combine into one target score.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Pooling {
    /// One bag of lemmas over all contexts.
    #[default]
    Pooled,
    /// Mean of the per-context means (contexts without resolved lemmas are
    /// skipped).
    PerContextMean,
}

/// Norm-based score for one target and kind from its contexts' content lemmas.
pub fn score_contexts(
    target_id: &str,
    kind: ScoreKind,
    contexts: &[Vec<&str>],
    lexicon: &ValenceLexicon,
    pooling: Pooling,
) -> Result<ScoreRecord, ValenceError> {
    let (valence, n_resolved) = match pooling {
        Pooling::Pooled => {
            let m = target_valence(contexts.iter().flatten().copied(), lexicon)?;
            (m.valence, m.n_resolved)
        }
        Pooling::PerContextMean => {
            let per: Vec<ValenceMean> = contexts
                .iter()
                .filter_map(|c| target_valence(c.iter().copied(), lexicon).ok())
                .collect();
            if per.is_empty() {
                return Err(ValenceError::Unscorable);
            }
            let mean = per.iter().map(|m| m.valence).sum::<f64>() / per.len() as f64;
            (mean, per.iter().map(|m| m.n_resolved).sum())
        }
    };
    Ok(ScoreRecord {
        target_id: target_id.to_string(),
        kind,
        valence,
        n_context_lemmas: n_resolved,
        n_contexts: contexts.len(),
        approach: Approach::Norms,
    })
}

/// Lexicon score of the manually supplied modifier lemma, if present.
pub fn modifier_valence(
    target: &TargetSpec,
    modifier_lemma: &str,
    lexicon: &ValenceLexicon,
) -> Option<ScoreRecord> {
    lexicon.lookup(modifier_lemma).map(|valence| ScoreRecord {
        target_id: target.target_id.clone(),
        kind: ScoreKind::Modifier,
        valence,
        n_context_lemmas: 1,
        n_contexts: 0,
        approach: Approach::Norms,
    })
}

fn index_by_target<'a>(
    scores: &'a [ScoreRecord],
    expected: ScoreKind,
) -> Result<BTreeMap<&'a str, &'a ScoreRecord>, ValenceError> {
    scores
        .iter()
        .map(|s| {
            if s.kind != expected {
                return Err(ValenceError::WrongKind {
                    target_id: s.target_id.clone(),
                    expected: expected.as_str(),
                    found: s.kind.as_str(),
                });
            }
            Ok((s.target_id.as_str(), s))
        })
        .collect()
}

fn single_approach(scores: &[ScoreRecord]) -> Option<&Approach> {
    scores.first().map(|s| &s.approach)
}

/// Deltas for every target that has both a compound and a name score, in
/// target_id order. Modifier deltas are attached where a modifier score
/// exists.
pub fn compute_deltas(
    pnc_scores: &[ScoreRecord],
    name_scores: &[ScoreRecord],
    modifier_scores: &[ScoreRecord],
) -> Result<Vec<DeltaRecord>, ValenceError> {
    let pnc = index_by_target(pnc_scores, ScoreKind::Pnc)?;
    let name = index_by_target(name_scores, ScoreKind::FullName)?;
    let modifier = index_by_target(modifier_scores, ScoreKind::Modifier)?;

    let approach = single_approach(pnc_scores).or(single_approach(name_scores));
    for s in pnc_scores.iter().chain(name_scores) {
        if Some(&s.approach) != approach {
            return Err(ValenceError::ApproachMismatch {
                pnc: approach.map(|a| a.to_string()).unwrap_or_default(),
                name: s.approach.to_string(),
            });
        }
    }

    Ok(pnc
        .iter()
        .filter_map(|(id, p)| {
            let n = name.get(id)?;
            Some(DeltaRecord {
                target_id: id.to_string(),
                delta: p.valence - n.valence,
                modifier_delta: modifier.get(id).map(|m| m.valence - p.valence),
                approach: p.approach.clone(),
            })
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Domain;
    use proptest::prelude::*;

    fn lexicon() -> ValenceLexicon {
        ValenceLexicon::from_pairs([("gut", 7.0), ("jahr", 5.0), ("schlecht", 2.0)])
    }

    fn score(id: &str, kind: ScoreKind, v: f64) -> ScoreRecord {
        ScoreRecord {
            target_id: id.into(),
            kind,
            valence: v,
            n_context_lemmas: 1,
            n_contexts: 1,
            approach: Approach::Norms,
        }
    }

    #[test]
    fn mean_of_resolved_lemmas() {
        let m = target_valence(["gut", "jahr", "schlecht", "gut"], &lexicon()).unwrap();
        assert!((m.valence - 5.25).abs() < 1e-12);
        assert_eq!(m.n_resolved, 4);
        assert_eq!(target_valence(["gut"], &lexicon()).unwrap().valence, 7.0);
        // unknown lemmas are skipped, not zero-filled
        let m = target_valence(["Gut", "zzz", "schlecht"], &lexicon()).unwrap();
        assert_eq!((m.valence, m.n_resolved), (4.5, 2));
    }

    #[test]
    fn unscorable_when_nothing_resolves() {
        assert_eq!(target_valence(["zzz", "yyy"], &lexicon()), Err(ValenceError::Unscorable));
        assert_eq!(target_valence(std::iter::empty(), &lexicon()), Err(ValenceError::Unscorable));
    }

    #[test]
    fn pooling_modes() {
        let contexts = vec![vec!["gut", "gut", "gut"], vec!["schlecht"], vec!["zzz"]];
        let pooled = score_contexts("t", ScoreKind::Pnc, &contexts, &lexicon(), Pooling::Pooled).unwrap();
        assert!((pooled.valence - 23.0 / 4.0).abs() < 1e-12);
        assert_eq!((pooled.n_context_lemmas, pooled.n_contexts), (4, 3));
        let per = score_contexts("t", ScoreKind::Pnc, &contexts, &lexicon(), Pooling::PerContextMean).unwrap();
        assert!((per.valence - 4.5).abs() < 1e-12);
    }

    #[test]
    fn modifier_scores() {
        let lex = ValenceLexicon::from_pairs([("folter", 0.89), ("willkommen", 7.9)]);
        let bush = TargetSpec::new("b", "Folter-Bush", None, None, "George", "Bush", Domain::Politics, vec![]).unwrap();
        let merkel = TargetSpec::new("m", "Willkommens-Merkel", None, None, "Angela", "Merkel", Domain::Politics, vec![]).unwrap();
        assert_eq!(modifier_valence(&bush, "folter", &lex).unwrap().valence, 0.89);
        assert_eq!(modifier_valence(&merkel, "willkommen", &lex).unwrap().valence, 7.9);
        assert!(modifier_valence(&merkel, "enteignung", &lex).is_none());
    }

    #[test]
    fn klose_and_merkel_deltas() {
        let deltas = compute_deltas(
            &[score("klose", ScoreKind::Pnc, 5.89), score("merkel", ScoreKind::Pnc, 4.42)],
            &[score("klose", ScoreKind::FullName, 4.99), score("merkel", ScoreKind::FullName, 4.6)],
            &[score("merkel", ScoreKind::Modifier, 7.9)],
        )
        .unwrap();
        assert_eq!(deltas[0].target_id, "klose");
        assert_eq!(format!("{:.2}", deltas[0].delta), "0.90");
        assert!((deltas[0].delta - 0.90).abs() < 1e-12);
        assert_eq!(deltas[0].modifier_delta, None);
        let md = deltas[1].modifier_delta.unwrap();
        assert_eq!(format!("{md:.2}"), "3.48");
        assert!((md - 3.48).abs() < 1e-12);
    }

    #[test]
    fn deltas_need_both_scores() {
        let d = compute_deltas(&[score("a", ScoreKind::Pnc, 3.0)], &[score("b", ScoreKind::FullName, 4.0)], &[]).unwrap();
        assert!(d.is_empty());
    }

    #[test]
    fn approach_mismatch_rejected() {
        let mut name = score("a", ScoreKind::FullName, 4.0);
        name.approach = Approach::Plm("xlm".into());
        assert!(matches!(
            compute_deltas(&[score("a", ScoreKind::Pnc, 3.0)], &[name], &[]),
            Err(ValenceError::ApproachMismatch { .. })
        ));
        assert!(matches!(
            compute_deltas(&[score("a", ScoreKind::FullName, 3.0)], &[], &[]),
            Err(ValenceError::WrongKind { .. })
        ));
    }

    #[test]
    fn approach_round_trips() {
        for a in [Approach::Norms, Approach::Human, Approach::Plm("gbert-sentiment".into())] {
            assert_eq!(a.to_string().parse::<Approach>().unwrap(), a);
        }
        assert!("plm:".parse::<Approach>().is_err());
    }

    proptest! {
        #[test]
        fn mean_bounded_and_order_invariant(
            idx in prop::collection::vec(0usize..3, 1..25),
            seed in any::<u64>(),
        ) {
            let forms = ["gut", "jahr", "schlecht"];
            let lemmas: Vec<&str> = idx.iter().map(|&i| forms[i]).collect();
            let lex = lexicon();
            let v = target_valence(lemmas.iter().copied(), &lex).unwrap().valence;
            let scores: Vec<f64> = lemmas.iter().map(|l| lex.lookup(l).unwrap()).collect();
            let lo = scores.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            prop_assert!(v >= lo - 1e-12 && v <= hi + 1e-12);

            let mut shuffled = lemmas.clone();
            let k = (seed as usize) % shuffled.len();
            shuffled.rotate_left(k);
            shuffled.reverse();
            let w = target_valence(shuffled.iter().copied(), &lex).unwrap().valence;
            prop_assert!((v - w).abs() < 1e-12);

            let doubled: Vec<&str> = lemmas.iter().chain(lemmas.iter()).copied().collect();
            let d = target_valence(doubled.iter().copied(), &lex).unwrap().valence;
            prop_assert!((v - d).abs() < 1e-12);
        }

        #[test]
        fn delta_identity(p in 0.0f64..10.0, n in 0.0f64..10.0) {
            let d = compute_deltas(&[score("t", ScoreKind::Pnc, p)], &[score("t", ScoreKind::FullName, n)], &[]).unwrap();
            prop_assert!((p - n - d[0].delta).abs() <= 1e-12);
        }
    }
}
