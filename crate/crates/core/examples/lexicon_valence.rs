// Lexicon-based valence of compound and name contexts, and their delta.

use pnc_eval::lexicon::{parse_lexicon, parse_tagged_contexts, DuplicatePolicy};
use pnc_eval::valence::{compute_deltas, score_contexts, Pooling, ScoreKind};

const LEXICON: &str = "tor\t7.2\nsieg\t8.1\njubeln\t7.6\nverletzung\t2.1\ninterview\t5.0\nschwach\t2.9\n";

const TAGGED: &str = "\
#doc:c1
Tor-Klose\tTor-Klose\tNE
jubelt\tjubeln\tVVFIN
nach\tnach\tAPPR
dem\tdie\tART
Sieg\tSieg\tNN

#doc:c2
Miroslav\tMiroslav\tNE
Klose\tKlose\tNE
gibt\tgeben\tVVFIN
ein\tein\tART
Interview\tInterview\tNN

#doc:c3
schwaches\tschwach\tADJA
Spiel\tSpiel\tNN
nach\tnach\tAPPR
der\tdie\tART
Verletzung\tVerletzung\tNN
";

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let lexicon = parse_lexicon(LEXICON.as_bytes(), "inline", DuplicatePolicy::FirstWins, 0)?;
    let tagged = parse_tagged_contexts(TAGGED.as_bytes(), "inline")?;

    let lemmas = |id: &str| tagged.content_lemmas(id).collect::<Vec<_>>();
    let pnc = score_contexts("klose", ScoreKind::Pnc, &[lemmas("c1")], &lexicon, Pooling::Pooled)?;
    let name = score_contexts("klose", ScoreKind::FullName, &[lemmas("c2"), lemmas("c3")], &lexicon, Pooling::Pooled)?;
    println!("compound valence {:.2} from {} lemmas", pnc.valence, pnc.n_context_lemmas);
    println!("name valence     {:.2} from {} lemmas", name.valence, name.n_context_lemmas);

    let deltas = compute_deltas(&[pnc], &[name], &[])?;
    println!("delta {:+.2}", deltas[0].delta);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}
