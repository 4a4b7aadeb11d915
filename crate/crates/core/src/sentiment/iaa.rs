//! Pairwise inter-annotator agreement as Spearman rank correlation over
//! ordinally coded labels.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{LabelRecord, SentimentError};
use crate::stats::spearman;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairAgreement {
    pub a: String,
    pub b: String,
    pub n_shared: usize,
    /// `None` when fewer than two shared items exist or a side is constant.
    pub rho: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IaaResult {
    pub annotators: Vec<String>,
    /// Symmetric matrix in `annotators` order; the diagonal is 1.
    pub matrix: Vec<Vec<Option<f64>>>,
    pub pairs: Vec<PairAgreement>,
    /// Mean over defined pairs.
    pub mean_rho: Option<f64>,
}

/// Spearman correlation for every annotator pair over the (target, context)
/// items both labelled. Annotators listed in `exclude` are ignored.
pub fn pairwise_iaa(annotations: &[LabelRecord], exclude: &[&str]) -> Result<IaaResult, SentimentError> {
    let mut by_annotator: BTreeMap<&str, BTreeMap<(&str, &str), f64>> = BTreeMap::new();
    for r in annotations {
        if exclude.contains(&r.source_id.as_str()) {
            continue;
        }
        by_annotator
            .entry(r.source_id.as_str())
            .or_default()
            .insert((r.target_id.as_str(), r.context_id.as_str()), r.label.ordinal());
    }
    if by_annotator.len() < 2 {
        return Err(SentimentError::TooFewAnnotators(by_annotator.len()));
    }
    let annotators: Vec<&str> = by_annotator.keys().copied().collect();
    let k = annotators.len();
    let mut matrix = vec![vec![None; k]; k];
    let mut pairs = Vec::new();
    for i in 0..k {
        matrix[i][i] = Some(1.0);
        for j in i + 1..k {
            let (la, lb) = (&by_annotator[annotators[i]], &by_annotator[annotators[j]]);
            let shared: BTreeSet<_> = la.keys().filter(|key| lb.contains_key(*key)).collect();
            let xa: Vec<f64> = shared.iter().map(|key| la[*key]).collect();
            let xb: Vec<f64> = shared.iter().map(|key| lb[*key]).collect();
            let rho = spearman(&xa, &xb).ok().map(|r| r.coefficient);
            matrix[i][j] = rho;
            matrix[j][i] = rho;
            pairs.push(PairAgreement {
                a: annotators[i].to_string(),
                b: annotators[j].to_string(),
                n_shared: shared.len(),
                rho,
            });
        }
    }
    let defined: Vec<f64> = pairs.iter().filter_map(|p| p.rho).collect();
    let mean_rho = (!defined.is_empty()).then(|| defined.iter().sum::<f64>() / defined.len() as f64);
    Ok(IaaResult {
        annotators: annotators.iter().map(|s| s.to_string()).collect(),
        matrix,
        pairs,
        mean_rho,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sentiment::Label;

    fn rec(src: &str, item: usize, label: Label) -> LabelRecord {
        LabelRecord {
            target_id: "t".into(),
            context_id: format!("c{item}"),
            label,
            source_id: src.into(),
        }
    }

    use Label::*;

    #[test]
    fn identical_and_reversed() {
        let seq = [Negative, Neutral, Positive, Neutral];
        let mut recs: Vec<_> = seq.iter().enumerate().map(|(i, l)| rec("a", i, *l)).collect();
        recs.extend(seq.iter().enumerate().map(|(i, l)| rec("b", i, *l)));
        let r = pairwise_iaa(&recs, &[]).unwrap();
        assert!((r.mean_rho.unwrap() - 1.0).abs() < 1e-12);

        let recs = vec![
            rec("a", 0, Negative), rec("a", 1, Neutral), rec("a", 2, Positive),
            rec("b", 0, Positive), rec("b", 1, Neutral), rec("b", 2, Negative),
        ];
        let r = pairwise_iaa(&recs, &[]).unwrap();
        assert!((r.pairs[0].rho.unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn undefined_pairs_and_exclusion() {
        let recs = vec![
            rec("a", 0, Negative), rec("a", 1, Positive),
            rec("b", 0, Negative), rec("b", 1, Positive),
            rec("c", 5, Neutral),
        ];
        let r = pairwise_iaa(&recs, &[]).unwrap();
        assert_eq!(r.annotators, ["a", "b", "c"]);
        assert_eq!(r.matrix[0][2], None);
        assert_eq!(r.matrix[1][2], None);
        assert!((r.mean_rho.unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(r.matrix[0][1], r.matrix[1][0]);
        let r = pairwise_iaa(&recs, &["c"]).unwrap();
        assert_eq!(r.annotators.len(), 2);
        assert!(matches!(pairwise_iaa(&recs, &["a", "b"]), Err(SentimentError::TooFewAnnotators(1))));
    }
}
