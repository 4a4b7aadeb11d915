use unicode_normalization::UnicodeNormalization;

/// NFC-normalizes `s`. All matching and lexicon keys operate on NFC text.
pub fn nfc(s: &str) -> String {
    s.nfc().collect()
}

/// Lowercased NFC form used for lexicon keys and lookups.
pub fn lexicon_key(s: &str) -> String {
    nfc(s).to_lowercase()
}
