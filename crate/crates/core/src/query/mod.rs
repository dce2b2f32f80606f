//! Keyword queries over an [`Index`]: selection, projection, boolean
//! combination and ranking.
//!
//! Boolean operators work on document sets. A document matches `a AND b`
//! when each condition matches somewhere in it, which for composite
//! documents means possibly in different blocks.

mod parser;

use std::collections::HashSet;

use crate::index::{tokenize, Field, Index};

pub use parser::parse_query;

/// Where a condition looks for its terms.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Target {
    Field(Field),
    Any,
}

impl Target {
    pub fn fields(self) -> &'static [Field] {
        match self {
            Target::Any => &Field::ALL,
            Target::Field(f) => match f {
                Field::Dataset => &[Field::Dataset],
                Field::Entity => &[Field::Entity],
                Field::Attribute => &[Field::Attribute],
                Field::Value => &[Field::Value],
            },
        }
    }
}

/// `f:k`. More than one term makes a phrase.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Condition {
    pub target: Target,
    pub terms: Vec<String>,
}

impl Condition {
    pub fn new(target: Target, text: &str) -> Condition {
        Condition {
            target,
            terms: tokenize(text),
        }
    }

    /// True when the terms occur consecutively in `text`.
    pub fn matches_text(&self, text: &str) -> bool {
        let words = tokenize(text);
        !self.terms.is_empty()
            && words
                .windows(self.terms.len())
                .any(|w| w == self.terms.as_slice())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expr {
    Cond(Condition),
    And(Vec<Expr>),
    Or(Vec<Expr>),
    Not(Box<Expr>),
}

impl Expr {
    /// Distinct leaf conditions, in first-seen order.
    pub fn leaves(&self) -> Vec<&Condition> {
        fn walk<'a>(e: &'a Expr, out: &mut Vec<&'a Condition>) {
            match e {
                Expr::Cond(c) => {
                    if !out.contains(&c) {
                        out.push(c);
                    }
                }
                Expr::And(cs) | Expr::Or(cs) => cs.iter().for_each(|c| walk(c, out)),
                Expr::Not(c) => walk(c, out),
            }
        }
        let mut out = Vec::new();
        walk(self, &mut out);
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QueryAst {
    pub root: Expr,
    pub projection: Vec<Field>,
}

impl QueryAst {
    pub const DEFAULT_PROJECTION: [Field; 3] = [Field::Entity, Field::Attribute, Field::Value];
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Row {
    pub dataset: String,
    pub entity: String,
    pub attribute: String,
    pub value: String,
    pub doc_id: u32,
    pub score: u32,
}

impl Row {
    pub fn get(&self, field: Field) -> &str {
        match field {
            Field::Dataset => &self.dataset,
            Field::Entity => &self.entity,
            Field::Attribute => &self.attribute,
            Field::Value => &self.value,
        }
    }

    /// The visible part of the row under `columns`.
    pub fn key(&self, columns: &[Field]) -> Vec<&str> {
        columns.iter().map(|&f| self.get(f)).collect()
    }
}

/// Rows plus the columns that are visible. Rows are unique under
/// `columns`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Relation {
    pub columns: Vec<Field>,
    pub rows: Vec<Row>,
}

impl Relation {
    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Visible values of every row.
    pub fn tuples(&self) -> Vec<Vec<String>> {
        self.rows
            .iter()
            .map(|r| {
                r.key(&self.columns)
                    .into_iter()
                    .map(str::to_string)
                    .collect()
            })
            .collect()
    }

    /// Distinct doc ids in row order.
    pub fn doc_ids(&self) -> Vec<u32> {
        let mut seen = HashSet::new();
        self.rows
            .iter()
            .map(|r| r.doc_id)
            .filter(|d| seen.insert(*d))
            .collect()
    }
}

fn union(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::with_capacity(a.len() + b.len());
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

fn intersect(a: &[u32], b: &[u32]) -> Vec<u32> {
    let (mut i, mut j) = (0, 0);
    let mut out = Vec::new();
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

fn complement(a: &[u32], n: u32) -> Vec<u32> {
    let mut out = Vec::with_capacity(n as usize - a.len().min(n as usize));
    let mut it = a.iter().peekable();
    for d in 0..n {
        if it.peek() == Some(&&d) {
            it.next();
        } else {
            out.push(d);
        }
    }
    out
}

/// Ascending ids of the documents a condition matches.
pub fn condition_docs(index: &Index, cond: &Condition) -> Vec<u32> {
    let mut out = Vec::new();
    for &field in cond.target.fields() {
        let mut candidates: Option<Vec<u32>> = None;
        for term in &cond.terms {
            let p = index.postings(field, term);
            candidates = Some(match candidates {
                None => p.to_vec(),
                Some(c) => intersect(&c, p),
            });
        }
        let mut found = candidates.unwrap_or_default();
        if cond.terms.len() > 1 {
            found.retain(|&d| index.doc(d).values(field).any(|v| cond.matches_text(v)));
        }
        out = union(&out, &found);
    }
    out
}

/// Matching documents of each distinct leaf condition, computed once per
/// query and shared by boolean evaluation and scoring.
struct Leaves<'a> {
    sets: Vec<(&'a Condition, Vec<u32>)>,
    n_docs: u32,
}

impl<'a> Leaves<'a> {
    fn new(index: &Index, expr: &'a Expr) -> Self {
        Leaves {
            sets: expr
                .leaves()
                .into_iter()
                .map(|c| (c, condition_docs(index, c)))
                .collect(),
            n_docs: index.len() as u32,
        }
    }

    fn get(&self, c: &Condition) -> &[u32] {
        &self
            .sets
            .iter()
            .find(|(l, _)| *l == c)
            .expect("leaf was collected")
            .1
    }

    fn docs(&self, expr: &Expr) -> Vec<u32> {
        match expr {
            Expr::Cond(c) => self.get(c).to_vec(),
            Expr::And(cs) => {
                let mut it = cs.iter();
                let Some(first) = it.next() else {
                    return (0..self.n_docs).collect();
                };
                let mut acc = self.docs(first);
                for c in it {
                    if acc.is_empty() {
                        break;
                    }
                    acc = intersect(&acc, &self.docs(c));
                }
                acc
            }
            Expr::Or(cs) => cs
                .iter()
                .fold(Vec::new(), |acc, c| union(&acc, &self.docs(c))),
            Expr::Not(c) => complement(&self.docs(c), self.n_docs),
        }
    }

    fn score(&self, doc: u32) -> u32 {
        self.sets
            .iter()
            .filter(|(_, s)| s.binary_search(&doc).is_ok())
            .count() as u32
    }
}

/// Ascending ids of the documents an expression matches.
pub fn expr_docs(index: &Index, expr: &Expr) -> Vec<u32> {
    Leaves::new(index, expr).docs(expr)
}

fn doc_rows(index: &Index, docs: &[u32], row_filter: Option<&Condition>) -> Vec<Row> {
    let mut rows = Vec::new();
    let mut seen = HashSet::new();
    for &d in docs {
        for r in index.doc(d).rows() {
            if let Some(cond) = row_filter {
                let hit = cond.target.fields().iter().any(|&f| {
                    let text = match f {
                        Field::Dataset => r.dataset,
                        Field::Entity => r.entity,
                        Field::Attribute => r.attribute,
                        Field::Value => r.value,
                    };
                    cond.matches_text(text)
                });
                // statements are their own document; composite documents
                // match as a whole
                if !hit && index.kind() == crate::index::IndexKind::Basic {
                    continue;
                }
            }
            if seen.insert((d, r.dataset, r.entity, r.attribute, r.value)) {
                rows.push(Row {
                    dataset: r.dataset.to_string(),
                    entity: r.entity.to_string(),
                    attribute: r.attribute.to_string(),
                    value: r.value.to_string(),
                    doc_id: d,
                    score: 0,
                });
            }
        }
    }
    rows
}

/// `σ_{f:k}(R)` with all four columns visible.
pub fn select(index: &Index, cond: &Condition) -> Relation {
    let docs = condition_docs(index, cond);
    let mut rows = doc_rows(index, &docs, Some(cond));
    for r in &mut rows {
        r.score = 1;
    }
    dedup(Relation {
        columns: Field::ALL.to_vec(),
        rows,
    })
}

fn dedup(mut rel: Relation) -> Relation {
    let mut seen = HashSet::new();
    let columns = rel.columns.clone();
    rel.rows.retain(|r| {
        seen.insert(
            r.key(&columns)
                .into_iter()
                .map(str::to_string)
                .collect::<Vec<_>>(),
        )
    });
    rel
}

/// `π_fields(R)`: keeps `fields` in order and drops rows that become
/// duplicates, keeping the first.
pub fn project(relation: &Relation, fields: &[Field]) -> Result<Relation, crate::QueryError> {
    if fields.is_empty() {
        return Err(crate::QueryError::Argument(
            "projection needs at least one field".into(),
        ));
    }
    Ok(dedup(Relation {
        columns: fields.to_vec(),
        rows: relation.rows.clone(),
    }))
}

/// Per-document count of satisfied leaf conditions.
pub fn doc_scores(index: &Index, ast: &QueryAst, docs: &[u32]) -> Vec<u32> {
    let leaves = Leaves::new(index, &ast.root);
    docs.iter().map(|&d| leaves.score(d)).collect()
}

fn sort_ranked(rows: &mut [Row]) {
    rows.sort_by(|a, b| {
        b.score
            .cmp(&a.score)
            .then_with(|| a.entity.as_bytes().cmp(b.entity.as_bytes()))
            .then(a.doc_id.cmp(&b.doc_id))
    });
}

/// Scores every row by the number of distinct leaf conditions its
/// document satisfies and sorts by score descending, then entity, then
/// doc id.
pub fn rank(index: &Index, relation: &Relation, ast: &QueryAst) -> Relation {
    let leaves = Leaves::new(index, &ast.root);
    let mut rows = relation.rows.clone();
    for r in &mut rows {
        r.score = leaves.score(r.doc_id);
    }
    sort_ranked(&mut rows);
    Relation {
        columns: relation.columns.clone(),
        rows,
    }
}

/// Matched documents ordered by score descending, then doc id.
pub fn ranked_docs(index: &Index, ast: &QueryAst) -> Vec<(u32, u32)> {
    let leaves = Leaves::new(index, &ast.root);
    let mut out: Vec<(u32, u32)> = leaves
        .docs(&ast.root)
        .into_iter()
        .map(|d| (d, leaves.score(d)))
        .collect();
    out.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    out
}

/// Runs a parsed query: boolean evaluation at document scope, ranking,
/// then projection.
pub fn evaluate(index: &Index, ast: &QueryAst) -> Relation {
    let leaves = Leaves::new(index, &ast.root);
    let docs = leaves.docs(&ast.root);
    let mut rows = doc_rows(index, &docs, None);
    for r in &mut rows {
        r.score = leaves.score(r.doc_id);
    }
    sort_ranked(&mut rows);
    project(
        &Relation {
            columns: Field::ALL.to_vec(),
            rows,
        },
        &ast.projection,
    )
    .expect("parsed projections are non-empty")
}
