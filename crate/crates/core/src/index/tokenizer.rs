//! Field-value tokenizer: the word universe keyword conditions test against.

use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

/// Lowercases, folds accents to their base letters and splits on every run of
/// non-alphanumeric characters. Order and duplicates are kept.
///
/// ```
/// use eavsearch::index::tokenize;
/// assert_eq!(tokenize("Hôtel Istria Montparnasse"), ["hotel", "istria", "montparnasse"]);
/// assert_eq!(tokenize("LA_BANQUE_1"), ["la", "banque", "1"]);
/// ```
pub fn tokenize(text: &str) -> Vec<String> {
    if text.is_ascii() {
        return text
            .split(|c: char| !c.is_ascii_alphanumeric())
            .filter(|w| !w.is_empty())
            .map(str::to_ascii_lowercase)
            .collect();
    }
    tokenize_unicode(text)
}

fn tokenize_unicode(text: &str) -> Vec<String> {
    let mut tokens = Vec::new();
    let mut current = String::new();
    for c in text.nfkd().filter(|&c| !is_combining_mark(c)) {
        if c.is_alphanumeric() {
            current.extend(c.to_lowercase().filter(|&l| !is_combining_mark(l)));
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    tokens
}
