// Finding compound and full-name contexts, then applying the frequency
// filter.

use pnc_eval::corpus::{dedupe_documents, frequency_filter, match_contexts, Document, Domain, MatchOptions, Source, TargetSpec};

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let targets = vec![
        TargetSpec::new("klose", "Tore-Klose", None, None, "Miroslav", "Klose", Domain::Sports, vec![])?,
        TargetSpec::new("merkel", "Willkommens-Merkel", None, None, "Angela", "Merkel", Domain::Politics, vec![])?,
    ];
    let corpus = dedupe_documents(vec![
        Document::new("t1", Source::Tweet, "Tor-Klose macht es wieder!").with_url("https://x.test/1"),
        Document::new("t2", Source::Tweet, "Tor-Klose macht es wieder!").with_url("https://x.test/1"),
        Document::new("t3", Source::Tweet, "Miroslav Klose im Interview"),
        Document::new("t6", Source::Tweet, "Schon wieder Tore-Klose, unglaublich"),
        Document::new("t4", Source::Tweet, "Die Willkommensmerkel hat gesprochen"),
        Document::new("t5", Source::Tweet, "Angela Merkel und die Willkommens-Merkel"),
    ]);
    println!("{} documents after URL dedup", corpus.len());

    let options = MatchOptions { exclude_overlaps: true, ..MatchOptions::default() };
    let matches = match_contexts(&corpus, &targets, &options)?;
    for m in &matches {
        println!("{:<7} {:<3} {:<9} {:?}", m.target_id, m.doc_id, m.kind.as_str(), m.matched_variant);
    }

    let report = frequency_filter(&targets, &matches, 2)?;
    for t in &report.retained {
        println!("retained {} ({} compound matches)", t.target_id, t.pnc_matches);
    }
    for t in &report.dropped {
        println!("dropped  {} ({} compound matches)", t.target_id, t.pnc_matches);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
