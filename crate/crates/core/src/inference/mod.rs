//! Rule inference: a Horn-rule language over triple patterns, a semi-naive
//! forward chainer, and the journey-pattern materializer that produces the
//! composite documents indexed into RULES_INDEX.

mod engine;
mod parser;
mod patterns;

use std::collections::BTreeSet;
use std::fmt;

use crate::graph::{object_term, Object};

pub use engine::{apply_rules, MAX_ITERATIONS};
pub use parser::parse_rules;
pub use patterns::{materialize_all, materialize_journey_patterns, Block, CompositeDoc};

/// A constant inside a triple pattern.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Constant {
    /// Bare word: an entity label (or an edge label in predicate position).
    Label(String),
    /// `<iri>`: exactly one entity.
    Iri(String),
    /// `"text"`: a literal node.
    Literal(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    /// `?name`, stored without the `?`.
    Var(String),
    Const(Constant),
}

impl Term {
    pub fn var(&self) -> Option<&str> {
        match self {
            Term::Var(v) => Some(v),
            Term::Const(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TriplePattern {
    pub subject: Term,
    pub predicate: Term,
    pub object: Term,
}

impl TriplePattern {
    pub fn terms(&self) -> [&Term; 3] {
        [&self.subject, &self.predicate, &self.object]
    }

    pub fn variables(&self) -> impl Iterator<Item = &str> {
        self.terms().into_iter().filter_map(Term::var)
    }
}

/// `head :- body_1, ..., body_n.` Every head variable occurs in the body.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rule {
    pub name: String,
    pub head: TriplePattern,
    pub body: Vec<TriplePattern>,
}

impl Rule {
    /// Head variables missing from the body, in head order.
    pub fn unbound_head_variables(&self) -> Vec<&str> {
        let bound: BTreeSet<&str> = self.body.iter().flat_map(|a| a.variables()).collect();
        let mut missing: Vec<&str> = self
            .head
            .variables()
            .filter(|v| !bound.contains(v))
            .collect();
        missing.dedup();
        missing
    }
}

/// Parameters of one journey-pattern family.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternConfig {
    pub pattern_label: String,
    pub path_predicate: String,
    /// At least 1.
    pub max_hops: u32,
    pub attach_predicates: Vec<String>,
}

/// Everything a rules file declares.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct RuleFile {
    pub rules: Vec<Rule>,
    pub patterns: Vec<PatternConfig>,
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "?{v}"),
            Term::Const(Constant::Label(l)) => f.write_str(l),
            Term::Const(Constant::Iri(i)) => write!(f, "<{i}>"),
            Term::Const(Constant::Literal(t)) => {
                f.write_str(&object_term(&Object::Literal(t.clone())))
            }
        }
    }
}

impl fmt::Display for TriplePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.subject, self.predicate, self.object)
    }
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {} :- ", self.name, self.head)?;
        for (i, atom) in self.body.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{atom}")?;
        }
        f.write_str(".")
    }
}
