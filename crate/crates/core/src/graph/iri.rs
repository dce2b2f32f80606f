//! IRI helpers: local names, namespaces and minting IRIs for bare labels.

use percent_encoding::{percent_decode_str, utf8_percent_encode, AsciiSet, CONTROLS};

/// Characters escaped when a bare label is turned into an IRI local name.
const LOCAL_NAME: &AsciiSet = &CONTROLS
    .add(b' ')
    .add(b'"')
    .add(b'#')
    .add(b'%')
    .add(b'/')
    .add(b'<')
    .add(b'>')
    .add(b'\\')
    .add(b'^')
    .add(b'`')
    .add(b'{')
    .add(b'|')
    .add(b'}');

/// Splits an IRI into `(namespace, raw local part)`.
///
/// The namespace keeps its trailing `#` or `/`. When neither separator is
/// present the namespace is empty.
pub fn split_iri(iri: &str) -> (&str, &str) {
    match iri.rfind('#').or_else(|| iri.rfind('/')) {
        Some(pos) => iri.split_at(pos + 1),
        None => ("", iri),
    }
}

/// The label of an entity node: the text after the last `#`, else after the
/// last `/`, else the whole input. Percent-escapes are decoded when they form
/// valid UTF-8, so `OBSERVATOIRE_ASSAS%20(Paris)` reads as
/// `OBSERVATOIRE_ASSAS (Paris)`.
pub fn local_name(iri: &str) -> String {
    let (_, raw) = split_iri(iri);
    if !raw.contains('%') {
        return raw.to_string();
    }
    match percent_decode_str(raw).decode_utf8() {
        Ok(decoded) => decoded.into_owned(),
        Err(_) => raw.to_string(),
    }
}

/// Builds `namespace + label`, escaping whatever would not survive
/// [`local_name`] unchanged.
pub fn mint_iri(namespace: &str, label: &str) -> String {
    format!("{namespace}{}", utf8_percent_encode(label, LOCAL_NAME))
}

/// `scheme ":" ...` with an RFC 3986 scheme and no characters N-Triples
/// forbids inside `<...>`.
pub fn is_absolute_iri(iri: &str) -> bool {
    let Some(colon) = iri.find(':') else {
        return false;
    };
    let scheme = &iri[..colon];
    let mut chars = scheme.chars();
    let scheme_ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic())
        && chars.all(|c| c.is_ascii_alphanumeric() || matches!(c, '+' | '-' | '.'));
    scheme_ok
        && !iri
            .chars()
            .any(|c| c <= ' ' || matches!(c, '<' | '>' | '"' | '{' | '}' | '|' | '^' | '`' | '\\'))
}
