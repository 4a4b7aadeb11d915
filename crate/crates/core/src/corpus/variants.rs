//! Orthographic search variants for compound surfaces.

use std::collections::HashSet;

use serde::Serialize;

use super::{CorpusError, TargetSpec};

/// Linking elements toggled on the modifier.
const INTERFIXES: [&str; 4] = ["s", "es", "n", "en"];
/// Final letters toggled to move between singular and plural modifier forms.
const NUMBER_SUFFIXES: [&str; 4] = ["e", "en", "n", "s"];
/// Maximum number of arbitrary characters between modifier and head in the
/// wildcard pattern.
pub const WILDCARD_MAX_GAP: usize = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Heuristic {
    Original,
    Umlaut,
    Eszett,
    InterfixAdd,
    InterfixDrop,
    Number,
    AltSpelling,
    WildcardPattern,
}

impl Heuristic {
    pub fn as_str(&self) -> &'static str {
        match self {
            Heuristic::Original => "original",
            Heuristic::Umlaut => "umlaut",
            Heuristic::Eszett => "eszett",
            Heuristic::InterfixAdd => "interfix_add",
            Heuristic::InterfixDrop => "interfix_drop",
            Heuristic::Number => "number",
            Heuristic::AltSpelling => "alt_spelling",
            Heuristic::WildcardPattern => "wildcard_pattern",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum VariantPattern {
    Literal(String),
    /// `modifier`, then 0..=`max_gap` arbitrary non-newline characters, then `head`.
    Gap {
        modifier: String,
        head: String,
        max_gap: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Variant {
    /// Display form; for the wildcard this is `modifier<0-2>head`.
    pub text: String,
    pub heuristic: Heuristic,
    pub pattern: VariantPattern,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VariantSet {
    pub target_id: String,
    pub variants: Vec<Variant>,
}

impl VariantSet {
    pub fn contains(&self, text: &str) -> bool {
        self.variants.iter().any(|v| v.text == text)
    }

    pub fn get(&self, text: &str) -> Option<&Variant> {
        self.variants.iter().find(|v| v.text == text)
    }
}

fn transliterate_umlauts(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 4);
    for c in s.chars() {
        match c {
            'ä' => out.push_str("ae"),
            'ö' => out.push_str("oe"),
            'ü' => out.push_str("ue"),
            'Ä' => out.push_str("Ae"),
            'Ö' => out.push_str("Oe"),
            'Ü' => out.push_str("Ue"),
            other => out.push(other),
        }
    }
    out
}

fn replace_eszett(s: &str) -> String {
    s.replace('ß', "ss")
}

struct Builder {
    seen: HashSet<String>,
    variants: Vec<Variant>,
}

impl Builder {
    fn push(&mut self, text: String, heuristic: Heuristic) {
        if self.seen.insert(text.clone()) {
            self.variants.push(Variant {
                pattern: VariantPattern::Literal(text.clone()),
                text,
                heuristic,
            });
        }
    }

    /// Applies `edit` to the modifier, the head, and both.
    fn push_site_edits(
        &mut self,
        modifier: &str,
        sep: &str,
        head: &str,
        edit: fn(&str) -> String,
        heuristic: Heuristic,
    ) {
        let (m, h) = (edit(modifier), edit(head));
        if m != modifier {
            self.push(format!("{m}{sep}{head}"), heuristic);
        }
        if h != head {
            self.push(format!("{modifier}{sep}{h}"), heuristic);
            if m != modifier {
                self.push(format!("{m}{sep}{h}"), heuristic);
            }
        }
    }

    fn push_affix_toggles(
        &mut self,
        modifier: &str,
        sep: &str,
        head: &str,
        affixes: &[&str],
        drop_tag: Heuristic,
        add_tag: Heuristic,
    ) {
        for suffix in affixes {
            if let Some(stem) = modifier.strip_suffix(suffix) {
                if !stem.is_empty() {
                    self.push(format!("{stem}{sep}{head}"), drop_tag);
                }
            }
        }
        for suffix in affixes {
            self.push(format!("{modifier}{suffix}{sep}{head}"), add_tag);
        }
    }
}

/// Generates deterministic, deduplicated search variants for a target.
///
/// Order: original, umlaut transliterations, eszett replacements, interfix
/// drops and additions, singular/plural toggles, user-supplied alternative
/// spellings and finally the bounded-gap wildcard pattern.
pub fn generate_variants(target: &TargetSpec) -> Result<VariantSet, CorpusError> {
    target.validate()?;
    let sep = target.separator().expect("validated separator");
    let (modifier, head) = (target.modifier_surface.as_str(), target.head_surface.as_str());
    let mut b = Builder {
        seen: HashSet::new(),
        variants: Vec::new(),
    };

    b.push(target.pnc_surface.clone(), Heuristic::Original);
    b.push_site_edits(modifier, sep, head, transliterate_umlauts, Heuristic::Umlaut);
    b.push_site_edits(modifier, sep, head, replace_eszett, Heuristic::Eszett);
    b.push_affix_toggles(
        modifier,
        sep,
        head,
        &INTERFIXES,
        Heuristic::InterfixDrop,
        Heuristic::InterfixAdd,
    );
    b.push_affix_toggles(
        modifier,
        sep,
        head,
        &NUMBER_SUFFIXES,
        Heuristic::Number,
        Heuristic::Number,
    );
    for alt in &target.alt_spellings {
        b.push(alt.clone(), Heuristic::AltSpelling);
    }

    let text = format!("{modifier}<0-{WILDCARD_MAX_GAP}>{head}");
    if b.seen.insert(text.clone()) {
        b.variants.push(Variant {
            text,
            heuristic: Heuristic::WildcardPattern,
            pattern: VariantPattern::Gap {
                modifier: modifier.to_string(),
                head: head.to_string(),
                max_gap: WILDCARD_MAX_GAP,
            },
        });
    }

    Ok(VariantSet {
        target_id: target.target_id.clone(),
        variants: b.variants,
    })
}
