//! Line-oriented N-Triples reader and canonical writer.
//!
//! Blank nodes are rejected. Literal datatype and language tags are accepted
//! and dropped; only the lexical form is kept.

use std::fmt::Write as _;

use super::iri::is_absolute_iri;
use super::{Object, Triple};
use crate::error::ParseError;

/// Parses an N-Triples document into triples, in file order.
pub fn parse_ntriples(text: &str) -> Result<Vec<Triple>, ParseError> {
    let mut triples = Vec::new();
    for (idx, raw) in text.split('\n').enumerate() {
        let line = raw.strip_suffix('\r').unwrap_or(raw);
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let err = |message: String| ParseError {
            line: idx + 1,
            text: line.to_string(),
            message,
        };
        triples.push(LineParser::new(trimmed).triple().map_err(err)?);
    }
    Ok(triples)
}

struct LineParser<'a> {
    rest: &'a str,
}

impl<'a> LineParser<'a> {
    fn new(line: &'a str) -> Self {
        Self { rest: line }
    }

    fn triple(&mut self) -> Result<Triple, String> {
        let subject = self.subject()?;
        self.skip_ws();
        let predicate = self.iri().map_err(|e| format!("predicate: {e}"))?;
        self.skip_ws();
        let object = self.object()?;
        self.skip_ws();
        if !self.eat('.') {
            return Err("expected '.' after object".into());
        }
        self.skip_ws();
        if !self.rest.is_empty() && !self.rest.starts_with('#') {
            return Err(format!("unexpected trailing text {:?}", self.rest));
        }
        Ok(Triple {
            subject,
            predicate,
            object,
        })
    }

    fn subject(&mut self) -> Result<String, String> {
        if self.rest.starts_with("_:") {
            return Err("blank nodes are not supported".into());
        }
        self.iri().map_err(|e| format!("subject: {e}"))
    }

    fn object(&mut self) -> Result<Object, String> {
        match self.peek() {
            Some('<') => Ok(Object::Iri(self.iri()?)),
            Some('"') => self.literal().map(Object::Literal),
            Some('_') if self.rest.starts_with("_:") => Err("blank nodes are not supported".into()),
            Some('.') | None => Err("missing object".into()),
            Some(c) => Err(format!("unexpected character {c:?} at object position")),
        }
    }

    fn iri(&mut self) -> Result<String, String> {
        if !self.eat('<') {
            return Err(match self.peek() {
                Some('.') | None => "missing term".into(),
                _ => "expected '<'".into(),
            });
        }
        let mut out = String::new();
        loop {
            match self.next() {
                None => return Err("unterminated IRI".into()),
                Some('>') => break,
                Some('\\') => out.push(self.uchar()?),
                Some(c) => out.push(c),
            }
        }
        if !is_absolute_iri(&out) {
            return Err(format!("<{out}> is not an absolute IRI"));
        }
        Ok(out)
    }

    fn literal(&mut self) -> Result<String, String> {
        self.eat('"');
        let mut out = String::new();
        loop {
            match self.next() {
                None => return Err("unterminated literal".into()),
                Some('"') => break,
                Some('\\') => match self.peek() {
                    Some('u') | Some('U') => out.push(self.uchar()?),
                    Some(_) => {
                        let c = self.next().unwrap_or_default();
                        out.push(match c {
                            't' => '\t',
                            'b' => '\u{8}',
                            'n' => '\n',
                            'r' => '\r',
                            'f' => '\u{c}',
                            '"' => '"',
                            '\'' => '\'',
                            '\\' => '\\',
                            other => return Err(format!("invalid escape \\{other}")),
                        });
                    }
                    None => return Err("unterminated literal".into()),
                },
                Some(c) => out.push(c),
            }
        }
        // Datatype or language tag: validated for shape, then dropped.
        if self.rest.starts_with("^^") {
            self.rest = &self.rest[2..];
            self.iri().map_err(|e| format!("datatype: {e}"))?;
        } else if self.eat('@') {
            let tag_len = self
                .rest
                .find(|c: char| !(c.is_ascii_alphanumeric() || c == '-'))
                .unwrap_or(self.rest.len());
            if tag_len == 0 {
                return Err("empty language tag".into());
            }
            self.rest = &self.rest[tag_len..];
        }
        Ok(out)
    }

    /// Reads `uXXXX` or `UXXXXXXXX` after a backslash.
    fn uchar(&mut self) -> Result<char, String> {
        let width = match self.next() {
            Some('u') => 4,
            Some('U') => 8,
            Some(c) => return Err(format!("invalid escape \\{c}")),
            None => return Err("dangling escape".into()),
        };
        if self.rest.len() < width || !self.rest.is_char_boundary(width) {
            return Err("truncated unicode escape".into());
        }
        let (hex, rest) = self.rest.split_at(width);
        let code =
            u32::from_str_radix(hex, 16).map_err(|_| format!("bad unicode escape {hex:?}"))?;
        self.rest = rest;
        char::from_u32(code).ok_or_else(|| format!("invalid code point U+{code:X}"))
    }

    fn skip_ws(&mut self) {
        self.rest = self.rest.trim_start_matches([' ', '\t']);
    }

    fn peek(&self) -> Option<char> {
        self.rest.chars().next()
    }

    fn next(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.rest = &self.rest[c.len_utf8()..];
        Some(c)
    }

    fn eat(&mut self, c: char) -> bool {
        match self.rest.strip_prefix(c) {
            Some(rest) => {
                self.rest = rest;
                true
            }
            None => false,
        }
    }
}

/// Serializes one object term the way it appears in a line.
pub fn object_term(object: &Object) -> String {
    match object {
        Object::Iri(iri) => format!("<{iri}>"),
        Object::Literal(text) => {
            let mut out = String::with_capacity(text.len() + 2);
            out.push('"');
            for c in text.chars() {
                match c {
                    '"' => out.push_str("\\\""),
                    '\\' => out.push_str("\\\\"),
                    '\n' => out.push_str("\\n"),
                    '\r' => out.push_str("\\r"),
                    '\t' => out.push_str("\\t"),
                    c if (c as u32) < 0x20 || c == '\u{7f}' => {
                        let _ = write!(out, "\\u{:04X}", c as u32);
                    }
                    c => out.push(c),
                }
            }
            out.push('"');
            out
        }
    }
}

/// Writes triples as canonical N-Triples: LF endings, sorted by subject,
/// predicate, then serialized object, bytewise.
pub fn write_ntriples(triples: &[Triple]) -> String {
    let mut lines: Vec<(&str, &str, String)> = triples
        .iter()
        .map(|t| {
            (
                t.subject.as_str(),
                t.predicate.as_str(),
                object_term(&t.object),
            )
        })
        .collect();
    lines.sort();
    lines.dedup();
    let mut out = String::new();
    for (s, p, o) in lines {
        let _ = writeln!(out, "<{s}> <{p}> {o} .");
    }
    out
}
