//! Keyword query grammar.
//!
//! ```text
//! query   := or ('|' fields)?
//! or      := and ('OR' and)*
//! and     := not (('AND')? not)*          juxtaposition means AND
//! not     := 'NOT' not | '(' or ')' | (field ':')? (word | '"' phrase '"')
//! field   := d | e | at | v | *
//! ```
//!
//! Operators are uppercase. A word that tokenizes to several terms
//! (`Port-Royal`) becomes a phrase condition.

use super::{Condition, Expr, QueryAst, Target};
use crate::error::QueryError;
use crate::index::{tokenize, Field};

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    LParen,
    RParen,
    Pipe,
    Prefix(String),
    Word(String),
    Quoted(String),
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>, QueryError> {
    let chars: Vec<char> = text.chars().collect();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        match c {
            c if c.is_whitespace() => i += 1,
            '(' => {
                toks.push((Tok::LParen, i));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, i));
                i += 1;
            }
            '|' => {
                toks.push((Tok::Pipe, i));
                i += 1;
            }
            '"' => {
                let start = i;
                let end =
                    chars[i + 1..]
                        .iter()
                        .position(|&c| c == '"')
                        .ok_or(QueryError::Syntax {
                            offset: start,
                            message: "unterminated quote".into(),
                        })?;
                toks.push((
                    Tok::Quoted(chars[i + 1..i + 1 + end].iter().collect()),
                    start,
                ));
                i += end + 2;
            }
            _ => {
                let start = i;
                while i < chars.len() && !chars[i].is_whitespace() && !"()|\":".contains(chars[i]) {
                    i += 1;
                }
                let word: String = chars[start..i].iter().collect();
                if chars.get(i) == Some(&':') {
                    toks.push((Tok::Prefix(word), start));
                    i += 1;
                } else if word.is_empty() {
                    // a bare ':'
                    return Err(QueryError::Syntax {
                        offset: start,
                        message: "':' without a field name".into(),
                    });
                } else {
                    toks.push((Tok::Word(word), start));
                }
            }
        }
    }
    Ok(toks)
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map_or(self.len, |(_, o)| *o)
    }

    fn syntax<T>(&self, message: impl Into<String>) -> Result<T, QueryError> {
        Err(QueryError::Syntax {
            offset: self.offset(),
            message: message.into(),
        })
    }

    fn is_op(&self, op: &str) -> bool {
        matches!(self.peek(), Some(Tok::Word(w)) if w == op)
    }

    fn starts_operand(&self) -> bool {
        match self.peek() {
            Some(Tok::Word(w)) => w != "OR" && w != "AND",
            Some(Tok::LParen | Tok::Prefix(_) | Tok::Quoted(_)) => true,
            _ => false,
        }
    }

    fn or(&mut self) -> Result<Expr, QueryError> {
        let mut children = vec![self.and()?];
        while self.is_op("OR") {
            self.pos += 1;
            children.push(self.and()?);
        }
        Ok(flatten(children, Expr::Or))
    }

    fn and(&mut self) -> Result<Expr, QueryError> {
        let mut children = vec![self.not()?];
        loop {
            if self.is_op("AND") {
                self.pos += 1;
                children.push(self.not()?);
            } else if self.starts_operand() {
                children.push(self.not()?);
            } else {
                break;
            }
        }
        Ok(flatten(children, Expr::And))
    }

    fn not(&mut self) -> Result<Expr, QueryError> {
        let offset = self.offset();
        match self.peek().cloned() {
            Some(Tok::Word(w)) if w == "NOT" => {
                self.pos += 1;
                Ok(Expr::Not(Box::new(self.not()?)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let inner = self.or()?;
                if self.peek() != Some(&Tok::RParen) {
                    return self.syntax("expected ')'");
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(Tok::Prefix(name)) => {
                let target = match name.as_str() {
                    "*" => Target::Any,
                    short => {
                        Target::Field(Field::from_short(short).ok_or(QueryError::UnknownField {
                            offset,
                            name: name.clone(),
                        })?)
                    }
                };
                self.pos += 1;
                match self.peek().cloned() {
                    Some(Tok::Word(w)) => {
                        self.pos += 1;
                        condition(target, &w, offset)
                    }
                    Some(Tok::Quoted(q)) => {
                        self.pos += 1;
                        condition(target, &q, offset)
                    }
                    _ => self.syntax(format!("expected a keyword after '{name}:'")),
                }
            }
            Some(Tok::Word(w)) if w != "AND" && w != "OR" => {
                self.pos += 1;
                condition(Target::Any, &w, offset)
            }
            Some(Tok::Quoted(q)) => {
                self.pos += 1;
                condition(Target::Any, &q, offset)
            }
            Some(Tok::Word(w)) => self.syntax(format!("unexpected {w}")),
            Some(Tok::RParen) => self.syntax("unexpected ')'"),
            Some(Tok::Pipe) => self.syntax("unexpected '|'"),
            None => self.syntax("unexpected end of query"),
        }
    }

    fn projection(&mut self) -> Result<Vec<Field>, QueryError> {
        let mut fields = Vec::new();
        while let Some((tok, offset)) = self.toks.get(self.pos).cloned() {
            let Tok::Word(w) = tok else {
                return self.syntax("expected field names after '|'");
            };
            let mut at = offset;
            for part in w.split(',') {
                if !part.is_empty() {
                    let field =
                        Field::from_short(part).ok_or_else(|| QueryError::UnknownField {
                            offset: at,
                            name: part.to_string(),
                        })?;
                    fields.push(field);
                }
                at += part.chars().count() + 1;
            }
            self.pos += 1;
        }
        if fields.is_empty() {
            return self.syntax("'|' must be followed by at least one field");
        }
        Ok(fields)
    }
}

fn condition(target: Target, text: &str, offset: usize) -> Result<Expr, QueryError> {
    let terms = tokenize(text);
    if terms.is_empty() {
        return Err(QueryError::Syntax {
            offset,
            message: format!("{text:?} contains no searchable terms"),
        });
    }
    Ok(Expr::Cond(Condition { target, terms }))
}

fn flatten(children: Vec<Expr>, wrap: fn(Vec<Expr>) -> Expr) -> Expr {
    if children.len() == 1 {
        return children.into_iter().next().expect("one child");
    }
    let mut flat = Vec::with_capacity(children.len());
    for child in children {
        match (child, wrap(Vec::new())) {
            (Expr::And(inner), Expr::And(_)) | (Expr::Or(inner), Expr::Or(_)) => flat.extend(inner),
            (other, _) => flat.push(other),
        }
    }
    wrap(flat)
}

/// Parses a query string. Offsets in errors count characters.
pub fn parse_query(text: &str) -> Result<QueryAst, QueryError> {
    let toks = lex(text)?;
    if toks.is_empty() {
        return Err(QueryError::Empty);
    }
    let mut p = Parser {
        toks,
        pos: 0,
        len: text.chars().count(),
    };
    if p.peek() == Some(&Tok::Pipe) {
        return Err(QueryError::Empty);
    }
    let root = p.or()?;
    let projection = if p.peek() == Some(&Tok::Pipe) {
        p.pos += 1;
        p.projection()?
    } else {
        QueryAst::DEFAULT_PROJECTION.to_vec()
    };
    if p.peek().is_some() {
        return p.syntax("unexpected trailing input");
    }
    Ok(QueryAst { root, projection })
}
