//! Linear-scan query evaluation over raw field sequences, and random
//! corpora and expressions to feed it.

use std::collections::BTreeSet;

use eavsearch::index::{Field, Index, IndexKind};
use eavsearch::query::{Condition, Expr, Target};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub const ALPHABET: [&str; 8] = [
    "hotel", "istria", "trip", "cdg", "port", "royal", "bank", "gare",
];

pub type Doc = Vec<(Field, String)>;

/// ASCII-only word split: lowercase, break on anything not alphanumeric.
pub fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_ascii_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(|w| w.to_ascii_lowercase())
        .collect()
}

fn cond_holds(doc: &Doc, c: &Condition) -> bool {
    doc.iter().any(|(f, text)| {
        let in_target = match c.target {
            Target::Any => true,
            Target::Field(t) => t == *f,
        };
        in_target && {
            let w = words(text);
            w.len() >= c.terms.len()
                && (0..=w.len() - c.terms.len()).any(|i| w[i..i + c.terms.len()] == c.terms[..])
        }
    })
}

pub fn holds(doc: &Doc, e: &Expr) -> bool {
    match e {
        Expr::Cond(c) => cond_holds(doc, c),
        Expr::And(cs) => cs.iter().all(|c| holds(doc, c)),
        Expr::Or(cs) => cs.iter().any(|c| holds(doc, c)),
        Expr::Not(c) => !holds(doc, c),
    }
}

pub fn scan_docs(docs: &[Doc], e: &Expr) -> Vec<u32> {
    (0..docs.len() as u32)
        .filter(|&i| holds(&docs[i as usize], e))
        .collect()
}

/// `[d, e, at, v]` for every Value in the sequence.
pub fn doc_tuples(doc: &Doc) -> Vec<[String; 4]> {
    let mut cur = [String::new(), String::new(), String::new()];
    let mut out = Vec::new();
    for (f, text) in doc {
        match f {
            Field::Dataset => cur[0] = text.clone(),
            Field::Entity => cur[1] = text.clone(),
            Field::Attribute => cur[2] = text.clone(),
            Field::Value => {
                out.push([cur[0].clone(), cur[1].clone(), cur[2].clone(), text.clone()])
            }
        }
    }
    out
}

pub fn project_tuple(t: &[String; 4], cols: &[Field]) -> Vec<String> {
    cols.iter()
        .map(|f| {
            t[match f {
                Field::Dataset => 0,
                Field::Entity => 1,
                Field::Attribute => 2,
                Field::Value => 3,
            }]
            .clone()
        })
        .collect()
}

/// Row set of `π_cols(σ_e(R))` by full scan.
pub fn scan_rows(docs: &[Doc], e: &Expr, cols: &[Field]) -> BTreeSet<Vec<String>> {
    scan_docs(docs, e)
        .into_iter()
        .flat_map(|d| doc_tuples(&docs[d as usize]))
        .map(|t| project_tuple(&t, cols))
        .collect()
}

fn text(rng: &mut StdRng) -> String {
    const SEPS: [&str; 4] = [" ", "_", "-", " - "];
    let n = rng.random_range(1..=4);
    let mut out = String::new();
    for i in 0..n {
        if i > 0 {
            out.push_str(SEPS[rng.random_range(0..SEPS.len())]);
        }
        let w = ALPHABET[rng.random_range(0..ALPHABET.len())];
        if rng.random_bool(0.3) {
            out.push_str(&w.to_uppercase());
        } else {
            out.push_str(w);
        }
    }
    out
}

/// One statement: `<Dataset, Entity, Attribute, Value>`.
pub fn random_statement(rng: &mut StdRng) -> Doc {
    let e = text(rng);
    vec![
        (
            Field::Dataset,
            format!("http://example.org/kb#{}", e.replace(' ', "_")),
        ),
        (Field::Entity, e),
        (Field::Attribute, text(rng)),
        (Field::Value, text(rng)),
    ]
}

/// A composite document: a pattern label, then 1 to 3 entity blocks.
pub fn random_composite(rng: &mut StdRng) -> Doc {
    let mut doc = vec![(
        Field::Dataset,
        format!("http://example.org/kb#{}", text(rng)),
    )];
    for _ in 0..rng.random_range(1..=3) {
        let e = text(rng);
        doc.push((Field::Dataset, format!("http://example.org/kb#{e}")));
        doc.push((Field::Entity, e));
        for _ in 0..rng.random_range(0..=2) {
            doc.push((Field::Attribute, text(rng)));
            doc.push((Field::Value, text(rng)));
        }
    }
    doc
}

pub fn random_corpus(seed: u64, kind: IndexKind, max_docs: usize) -> Vec<Doc> {
    let mut rng = StdRng::seed_from_u64(seed);
    let n = rng.random_range(0..=max_docs);
    (0..n)
        .map(|_| match kind {
            IndexKind::Basic => random_statement(&mut rng),
            IndexKind::Rules => random_composite(&mut rng),
        })
        .collect()
}

pub fn random_condition(rng: &mut StdRng) -> Condition {
    let target = match rng.random_range(0..5) {
        0 => Target::Any,
        i => Target::Field(Field::ALL[i - 1]),
    };
    let n = if rng.random_bool(0.25) { 2 } else { 1 };
    Condition {
        target,
        terms: (0..n)
            .map(|_| ALPHABET[rng.random_range(0..ALPHABET.len())].to_string())
            .collect(),
    }
}

/// Random expression of at most `depth` operator levels.
pub fn random_expr(rng: &mut StdRng, depth: u32) -> Expr {
    if depth == 0 || rng.random_bool(0.3) {
        return Expr::Cond(random_condition(rng));
    }
    match rng.random_range(0..3) {
        0 => Expr::And(
            (0..rng.random_range(2..=3))
                .map(|_| random_expr(rng, depth - 1))
                .collect(),
        ),
        1 => Expr::Or(
            (0..rng.random_range(2..=3))
                .map(|_| random_expr(rng, depth - 1))
                .collect(),
        ),
        _ => Expr::Not(Box::new(random_expr(rng, depth - 1))),
    }
}

pub fn random_projection(rng: &mut StdRng) -> Vec<Field> {
    let mut cols: Vec<Field> = Field::ALL
        .iter()
        .copied()
        .filter(|_| rng.random_bool(0.6))
        .collect();
    if cols.is_empty() {
        cols.push(Field::Value);
    }
    if rng.random_bool(0.5) {
        cols.reverse();
    }
    cols
}

pub fn build(kind: IndexKind, docs: &[Doc]) -> Index {
    Index::build(kind, docs.iter().cloned())
}
