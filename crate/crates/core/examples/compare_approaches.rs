// How often a model-based delta disagrees with the lexicon-based one.

use std::collections::BTreeMap;

use pnc_eval::sentiment::{compare_approaches, sign_breakdown, ComparisonMode};
use pnc_eval::valence::{Approach, DeltaRecord};

fn deltas(approach: Approach, values: &[(&str, f64)]) -> Vec<DeltaRecord> {
    values
        .iter()
        .map(|(id, d)| DeltaRecord {
            target_id: id.to_string(),
            delta: *d,
            modifier_delta: None,
            approach: approach.clone(),
        })
        .collect()
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let norms = deltas(Approach::Norms, &[("klose", 0.90), ("merkel", -0.18), ("rosi", -0.40), ("spahn", -1.2)]);
    let plm = deltas(Approach::Plm("xlm-twitter".into()), &[("klose", 1.5), ("merkel", -3.0), ("rosi", 0.6), ("spahn", -0.04)]);

    let mut by_source = BTreeMap::new();
    by_source.insert("norms".to_string(), norms.clone());
    by_source.insert("plm:xlm-twitter".to_string(), plm.clone());
    for row in sign_breakdown(&by_source) {
        let s = &row.shares;
        println!("{:<16} n {}  <0 {:.2}%  >0 {:.2}%  =0 {:.2}%", row.source_id, s.n, s.negative_pct, s.positive_pct, s.zero_pct);
    }

    for mode in [ComparisonMode::SignClass, ComparisonMode::NumericEpsilon(0.5)] {
        let c = compare_approaches(&plm, &norms, mode)?;
        println!(
            "{mode:?}: more negative {:.2}%, more positive {:.2}%, agree {:.2}%",
            c.plm_more_negative_pct, c.plm_more_positive_pct, c.agree_pct
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
