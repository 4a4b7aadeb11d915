// Sentiment labels turned into weighted valence scores, plus agreement
// between annotators.

use pnc_eval::corpus::{ContextMatch, MatchKind};
use pnc_eval::sentiment::{aggregate_labels, eq2_valence, pairwise_iaa, parse_labels_jsonl};

const LABELS: &str = r#"{"target_id":"merkel","context_id":"d1","label":"negative","source_id":"ann1"}
{"target_id":"merkel","context_id":"d1","label":"negative","source_id":"ann2"}
{"target_id":"merkel","context_id":"d2","label":"neutral","source_id":"ann1"}
{"target_id":"merkel","context_id":"d2","label":"negative","source_id":"ann2"}
{"target_id":"merkel","context_id":"d3","label":"positive","source_id":"ann1"}
{"target_id":"merkel","context_id":"d3","label":"positive","source_id":"ann2"}
{"target_id":"merkel","context_id":"d1","label":"neutral","source_id":"xlm-twitter"}
{"target_id":"merkel","context_id":"d2","label":"negative","source_id":"xlm-twitter"}
{"target_id":"merkel","context_id":"d3","label":"positive","source_id":"xlm-twitter"}
"#;

fn pnc_match(doc: &str) -> ContextMatch {
    ContextMatch {
        target_id: "merkel".into(),
        doc_id: doc.into(),
        kind: MatchKind::Pnc,
        matched_variant: "Willkommens-Merkel".into(),
        byte_start: 0,
        byte_end: 19,
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let labels = parse_labels_jsonl(LABELS.as_bytes(), "inline")?;
    let matches: Vec<ContextMatch> = ["d1", "d2", "d3"].into_iter().map(pnc_match).collect();

    // Pool the annotators into one human source; keep model sources as is.
    let hists = aggregate_labels(&labels, &matches, MatchKind::Pnc, |s| {
        Some(if s.starts_with("ann") { "human".to_string() } else { s.to_string() })
    });
    for h in &hists {
        println!(
            "{:<12} pos {} neu {} neg {} -> valence {:.2}",
            h.source_id,
            h.n_pos,
            h.n_neu,
            h.n_neg,
            eq2_valence(h)?
        );
    }

    let human: Vec<_> = labels.iter().filter(|l| l.source_id.starts_with("ann")).cloned().collect();
    let iaa = pairwise_iaa(&human, &[])?;
    for p in &iaa.pairs {
        println!("{} vs {}: rho {:?} over {} items", p.a, p.b, p.rho, p.n_shared);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
