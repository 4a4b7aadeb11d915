// Batched classification through the `Classifier` trait. A keyword
// classifier stands in for the HTTP service (`HttpClassifier`).

use pnc_eval::sentiment::{classify_contexts, Classifier, ClassifierError, ClassifyConfig, ClassifyItem};

struct Keywords;

impl Classifier for Keywords {
    fn classify(&self, texts: &[String]) -> Result<Vec<String>, ClassifierError> {
        Ok(texts
            .iter()
            .map(|t| match () {
                _ if t.contains("super") => "positive",
                _ if t.contains("peinlich") => "negative",
                _ if t.contains('?') => "unsure",
                _ => "neutral",
            })
            .map(String::from)
            .collect())
    }
}

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let texts = ["Tor-Klose ist super", "Peinlich, diese Spaß-Guido Show: peinlich", "Gold-Rosi im Fernsehen", "Wer ist Bätschi-Nahles?"];
    let items: Vec<ClassifyItem> = texts
        .iter()
        .enumerate()
        .map(|(i, t)| ClassifyItem { target_id: format!("t{i}"), context_id: format!("c{i}"), text: t.to_string() })
        .collect();
    let config = ClassifyConfig { source_id: "keywords".into(), batch_size: 2, max_in_flight: 2 };
    let outcome = classify_contexts(&items, &Keywords, &config)?;
    for r in &outcome.records {
        println!("{} {}", r.context_id, r.label.as_str());
    }
    for e in &outcome.item_errors {
        println!("{} failed: {}", e.context_id, e.message);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
