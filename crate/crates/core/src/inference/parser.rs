//! Rules-file reader.
//!
//! ```text
//! # comment
//! [inverse] (?y is_encircled_by ?x) :- (?x encircles ?y).
//! @pattern SERVICE_JOURNEY_PATTERN { path: next_stop, max_hops = 4; attach: is_encircled; }
//! ```

use std::collections::BTreeSet;

use super::{Constant, PatternConfig, Rule, RuleFile, Term, TriplePattern};
use crate::error::{ParseError, RuleError};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    LBracket,
    RBracket,
    LBrace,
    RBrace,
    Comma,
    Semi,
    Dot,
    Colon,
    Eq,
    Implies,
    Directive(String),
    Var(String),
    Iri(String),
    Str(String),
    Word(String),
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::LBracket => "'['".into(),
            Tok::RBracket => "']'".into(),
            Tok::LBrace => "'{'".into(),
            Tok::RBrace => "'}'".into(),
            Tok::Comma => "','".into(),
            Tok::Semi => "';'".into(),
            Tok::Dot => "'.'".into(),
            Tok::Colon => "':'".into(),
            Tok::Eq => "'='".into(),
            Tok::Implies => "':-'".into(),
            Tok::Directive(d) => format!("@{d}"),
            Tok::Var(v) => format!("?{v}"),
            Tok::Iri(i) => format!("<{i}>"),
            Tok::Str(s) => format!("{s:?}"),
            Tok::Word(w) => format!("{w:?}"),
        }
    }
}

fn is_word_char(c: char) -> bool {
    !c.is_whitespace() && !"()[]{},;:=\"<>".contains(c)
}

struct Lexer<'a> {
    lines: Vec<&'a str>,
}

impl<'a> Lexer<'a> {
    fn error(&self, line: usize, message: impl Into<String>) -> ParseError {
        let text = self.lines.get(line - 1).copied().unwrap_or_default();
        ParseError {
            line,
            text: text.strip_suffix('\r').unwrap_or(text).to_string(),
            message: message.into(),
        }
    }

    fn tokenize(&self) -> Result<Vec<(Tok, usize)>, ParseError> {
        let mut toks = Vec::new();
        for (idx, line) in self.lines.iter().enumerate() {
            let lineno = idx + 1;
            let chars: Vec<char> = line.chars().collect();
            let mut i = 0;
            while i < chars.len() {
                let c = chars[i];
                if c.is_whitespace() {
                    i += 1;
                    continue;
                }
                if c == '#' {
                    break;
                }
                let single = match c {
                    '(' => Some(Tok::LParen),
                    ')' => Some(Tok::RParen),
                    '[' => Some(Tok::LBracket),
                    ']' => Some(Tok::RBracket),
                    '{' => Some(Tok::LBrace),
                    '}' => Some(Tok::RBrace),
                    ',' => Some(Tok::Comma),
                    ';' => Some(Tok::Semi),
                    '.' => Some(Tok::Dot),
                    '=' => Some(Tok::Eq),
                    _ => None,
                };
                if let Some(t) = single {
                    toks.push((t, lineno));
                    i += 1;
                    continue;
                }
                match c {
                    ':' if chars.get(i + 1) == Some(&'-') => {
                        toks.push((Tok::Implies, lineno));
                        i += 2;
                    }
                    ':' => {
                        toks.push((Tok::Colon, lineno));
                        i += 1;
                    }
                    '<' => {
                        let end = chars[i + 1..]
                            .iter()
                            .position(|&c| c == '>')
                            .ok_or_else(|| self.error(lineno, "unterminated IRI"))?;
                        let iri: String = chars[i + 1..i + 1 + end].iter().collect();
                        if !crate::graph::is_absolute_iri(&iri) {
                            return Err(
                                self.error(lineno, format!("<{iri}> is not an absolute IRI"))
                            );
                        }
                        toks.push((Tok::Iri(iri), lineno));
                        i += end + 2;
                    }
                    '"' => {
                        let mut text = String::new();
                        i += 1;
                        loop {
                            match chars.get(i) {
                                None => return Err(self.error(lineno, "unterminated string")),
                                Some('"') => break,
                                Some('\\') => {
                                    let (decoded, used) =
                                        unescape(&chars[i + 1..]).ok_or_else(|| {
                                            self.error(lineno, "invalid escape in string")
                                        })?;
                                    text.push(decoded);
                                    i += 1 + used;
                                }
                                Some(&c) => {
                                    text.push(c);
                                    i += 1;
                                }
                            }
                        }
                        i += 1;
                        toks.push((Tok::Str(text), lineno));
                    }
                    _ => {
                        let start = i;
                        while i < chars.len() && is_word_char(chars[i]) {
                            i += 1;
                        }
                        let word: String = chars[start..i].iter().collect();
                        let tok = if let Some(v) = word.strip_prefix('?') {
                            if v.is_empty() || !v.chars().all(|c| c.is_alphanumeric() || c == '_') {
                                return Err(
                                    self.error(lineno, format!("invalid variable {word:?}"))
                                );
                            }
                            Tok::Var(v.to_string())
                        } else if let Some(d) = word.strip_prefix('@') {
                            Tok::Directive(d.to_string())
                        } else {
                            Tok::Word(word)
                        };
                        toks.push((tok, lineno));
                    }
                }
            }
        }
        Ok(toks)
    }
}

/// Decodes the escape after a backslash; returns the char and how many input
/// chars it consumed.
fn unescape(rest: &[char]) -> Option<(char, usize)> {
    let c = *rest.first()?;
    let simple = match c {
        't' => '\t',
        'n' => '\n',
        'r' => '\r',
        'b' => '\u{8}',
        'f' => '\u{c}',
        '"' => '"',
        '\'' => '\'',
        '\\' => '\\',
        'u' | 'U' => {
            let width = if c == 'u' { 4 } else { 8 };
            let hex: String = rest.get(1..1 + width)?.iter().collect();
            let code = u32::from_str_radix(&hex, 16).ok()?;
            return char::from_u32(code).map(|ch| (ch, 1 + width));
        }
        _ => return None,
    };
    Some((simple, 1))
}

struct Parser<'a> {
    lexer: &'a Lexer<'a>,
    toks: Vec<(Tok, usize)>,
    pos: usize,
}

impl Parser<'_> {
    fn line(&self) -> usize {
        match self.toks.get(self.pos) {
            Some((_, l)) => *l,
            None => self.toks.last().map_or(1, |(_, l)| *l),
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn peek_at(&self, ahead: usize) -> Option<&Tok> {
        self.toks.get(self.pos + ahead).map(|(t, _)| t)
    }

    fn bump(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(self.lexer.error(self.line(), message))
    }

    fn unexpected<T>(&self, wanted: &str) -> Result<T, ParseError> {
        match self.peek() {
            Some(t) => self.fail(format!("expected {wanted}, found {}", t.describe())),
            None => self.fail(format!("expected {wanted}, found end of input")),
        }
    }

    fn expect(&mut self, tok: Tok, wanted: &str) -> Result<(), ParseError> {
        if self.peek() == Some(&tok) {
            self.pos += 1;
            Ok(())
        } else {
            self.unexpected(wanted)
        }
    }

    fn word(&mut self, wanted: &str) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Word(w)) => {
                let w = w.clone();
                self.pos += 1;
                Ok(w)
            }
            _ => self.unexpected(wanted),
        }
    }

    fn term(&mut self, position: &str) -> Result<Term, ParseError> {
        let term = match self.peek() {
            Some(Tok::Var(v)) => Term::Var(v.clone()),
            Some(Tok::Word(w)) => Term::Const(Constant::Label(w.clone())),
            Some(Tok::Iri(i)) => Term::Const(Constant::Iri(i.clone())),
            Some(Tok::Str(s)) => Term::Const(Constant::Literal(s.clone())),
            _ => return self.unexpected(&format!("{position} term")),
        };
        if matches!(term, Term::Const(Constant::Literal(_))) && position != "object" {
            return self.fail(format!("a literal cannot be the {position}"));
        }
        self.pos += 1;
        Ok(term)
    }

    fn atom(&mut self) -> Result<TriplePattern, ParseError> {
        self.expect(Tok::LParen, "'('")?;
        let subject = self.term("subject")?;
        let predicate = self.term("predicate")?;
        let object = self.term("object")?;
        self.expect(Tok::RParen, "')'")?;
        Ok(TriplePattern {
            subject,
            predicate,
            object,
        })
    }

    fn rule(&mut self, default_name: String) -> Result<(Rule, usize), ParseError> {
        let line = self.line();
        let name = if self.peek() == Some(&Tok::LBracket) {
            self.pos += 1;
            let name = self.word("rule name")?;
            self.expect(Tok::RBracket, "']'")?;
            name
        } else {
            default_name
        };
        let head = self.atom()?;
        self.expect(Tok::Implies, "':-'")?;
        let mut body = vec![self.atom()?];
        while self.peek() == Some(&Tok::Comma) {
            self.pos += 1;
            body.push(self.atom()?);
        }
        self.expect(Tok::Dot, "'.' at end of rule")?;
        Ok((Rule { name, head, body }, line))
    }

    fn pattern(&mut self) -> Result<PatternConfig, ParseError> {
        let label = self.word("pattern name")?;
        self.expect(Tok::LBrace, "'{'")?;
        let mut path = None;
        let mut max_hops = None;
        let mut attach: Option<Vec<String>> = None;
        loop {
            match self.peek() {
                Some(Tok::RBrace) => {
                    self.pos += 1;
                    break;
                }
                Some(Tok::Comma | Tok::Semi) => {
                    self.pos += 1;
                    continue;
                }
                _ => {}
            }
            let key = self.word("pattern setting (path, max_hops or attach)")?;
            match self.bump() {
                Some(Tok::Colon | Tok::Eq) => {}
                _ => {
                    self.pos -= 1;
                    return self.unexpected("':' or '='");
                }
            }
            match key.as_str() {
                "path" if path.is_none() => path = Some(self.word("path predicate")?),
                "max_hops" if max_hops.is_none() => {
                    let raw = self.word("hop count")?;
                    let n: u32 = raw.parse().ok().filter(|&n| n >= 1).map_or_else(
                        || self.fail(format!("max_hops must be a positive integer, got {raw:?}")),
                        Ok,
                    )?;
                    max_hops = Some(n);
                }
                "attach" if attach.is_none() => {
                    let mut list = vec![self.word("attach predicate")?];
                    // A comma either continues the list or separates the next
                    // `key:` entry.
                    while self.peek() == Some(&Tok::Comma)
                        && matches!(self.peek_at(1), Some(Tok::Word(_)))
                        && !matches!(self.peek_at(2), Some(Tok::Colon | Tok::Eq))
                    {
                        self.pos += 1;
                        list.push(self.word("attach predicate")?);
                    }
                    attach = Some(list);
                }
                "path" | "max_hops" | "attach" => {
                    self.pos -= 2;
                    return self.fail(format!("duplicate setting {key:?}"));
                }
                _ => {
                    self.pos -= 2;
                    return self.fail(format!("unknown pattern setting {key:?}"));
                }
            }
        }
        let Some(path_predicate) = path else {
            return self.fail(format!("pattern {label} has no path predicate"));
        };
        let Some(max_hops) = max_hops else {
            return self.fail(format!("pattern {label} has no max_hops"));
        };
        Ok(PatternConfig {
            pattern_label: label,
            path_predicate,
            max_hops,
            attach_predicates: attach.unwrap_or_default(),
        })
    }
}

/// Parses a rules file. Rules keep file order; unnamed rules are called
/// `rule1`, `rule2`, ... by position.
pub fn parse_rules(text: &str) -> Result<RuleFile, RuleError> {
    let lexer = Lexer {
        lines: text.split('\n').collect(),
    };
    let toks = lexer.tokenize()?;
    let mut p = Parser {
        lexer: &lexer,
        toks,
        pos: 0,
    };
    let mut file = RuleFile::default();
    let mut pattern_names = BTreeSet::new();
    while let Some(tok) = p.peek() {
        match tok {
            Tok::Directive(d) if d == "pattern" => {
                let line = p.line();
                p.pos += 1;
                let config = p.pattern()?;
                if !pattern_names.insert(config.pattern_label.clone()) {
                    return Err(lexer
                        .error(
                            line,
                            format!("pattern {} declared twice", config.pattern_label),
                        )
                        .into());
                }
                file.patterns.push(config);
            }
            Tok::Directive(d) => {
                return Err(lexer
                    .error(p.line(), format!("unknown directive @{d}"))
                    .into());
            }
            _ => {
                let (rule, line) = p.rule(format!("rule{}", file.rules.len() + 1))?;
                if let Some(var) = rule.unbound_head_variables().first() {
                    return Err(RuleError::Unsafe {
                        line,
                        rule: rule.name.clone(),
                        variable: var.to_string(),
                    });
                }
                file.rules.push(rule);
            }
        }
    }
    Ok(file)
}
