//! Field-structured inverted indexes.
//!
//! Every document is a sequence of `(field, text)` values over the four
//! fields Dataset, Entity, Attribute and Value. BASIC_INDEX holds one
//! document per statement; RULES_INDEX holds one document per materialized
//! journey pattern, with repeated fields. Posting lists map `(field, term)`
//! to ascending document ids.

mod store;
mod tokenizer;

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub use store::{read_index, write_index, DOCS_FILE, FORMAT_VERSION, MANIFEST_FILE, POSTINGS_FILE};
pub use tokenizer::tokenize;

use crate::graph::Graph;
use crate::inference::CompositeDoc;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Dataset,
    Entity,
    Attribute,
    Value,
}

impl Field {
    pub const ALL: [Field; 4] = [
        Field::Dataset,
        Field::Entity,
        Field::Attribute,
        Field::Value,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Field::Dataset => "Dataset",
            Field::Entity => "Entity",
            Field::Attribute => "Attribute",
            Field::Value => "Value",
        }
    }

    /// Short name used in queries and projections.
    pub fn short(self) -> &'static str {
        match self {
            Field::Dataset => "d",
            Field::Entity => "e",
            Field::Attribute => "at",
            Field::Value => "v",
        }
    }

    pub fn from_name(name: &str) -> Option<Field> {
        Field::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn from_short(name: &str) -> Option<Field> {
        Field::ALL.into_iter().find(|f| f.short() == name)
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum IndexKind {
    Basic,
    Rules,
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndexKind::Basic => "BASIC",
            IndexKind::Rules => "RULES",
        })
    }
}

impl FromStr for IndexKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "basic" => Ok(IndexKind::Basic),
            "rules" => Ok(IndexKind::Rules),
            _ => Err(format!(
                "unknown index kind {s:?} (expected basic or rules)"
            )),
        }
    }
}

/// One statement: `<Dataset, Entity, Attribute, Value>`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StatementDoc {
    pub dataset: String,
    pub entity: String,
    pub attribute: String,
    pub value: String,
}

impl StatementDoc {
    fn into_fields(self) -> Vec<(Field, String)> {
        vec![
            (Field::Dataset, self.dataset),
            (Field::Entity, self.entity),
            (Field::Attribute, self.attribute),
            (Field::Value, self.value),
        ]
    }
}

/// A row of the relation a document contributes: one per attribute/value
/// pair, tagged with the dataset and entity it belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct DocRow<'a> {
    pub dataset: &'a str,
    pub entity: &'a str,
    pub attribute: &'a str,
    pub value: &'a str,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexedDoc {
    pub doc_id: u32,
    pub field_values: Vec<(Field, String)>,
}

impl IndexedDoc {
    pub fn values(&self, field: Field) -> impl Iterator<Item = &str> {
        self.field_values
            .iter()
            .filter(move |(f, _)| *f == field)
            .map(|(_, v)| v.as_str())
    }

    /// Walks the field sequence, emitting a row at every Value.
    pub fn rows(&self) -> Vec<DocRow<'_>> {
        let (mut d, mut e, mut at) = ("", "", "");
        let mut rows = Vec::new();
        for (field, text) in &self.field_values {
            match field {
                Field::Dataset => d = text,
                Field::Entity => e = text,
                Field::Attribute => at = text,
                Field::Value => rows.push(DocRow {
                    dataset: d,
                    entity: e,
                    attribute: at,
                    value: text,
                }),
            }
        }
        rows
    }

    /// Stable identity for relevance judgments: a hash of the field sequence,
    /// independent of the doc id.
    pub fn fingerprint(&self) -> String {
        let mut hasher = Sha256::new();
        for (field, text) in &self.field_values {
            hasher.update(field.name().as_bytes());
            hasher.update([0x1f]);
            hasher.update(text.as_bytes());
            hasher.update([0x1e]);
        }
        hasher.finalize()[..8]
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Index {
    kind: IndexKind,
    docs: Vec<IndexedDoc>,
    /// Per field, term -> ascending doc ids. BTreeMap keeps the term
    /// dictionary sorted.
    postings: BTreeMap<Field, BTreeMap<String, Vec<u32>>>,
}

impl Index {
    /// Builds an index, assigning ids in input order from 0.
    pub fn build(kind: IndexKind, docs: impl IntoIterator<Item = Vec<(Field, String)>>) -> Self {
        let docs: Vec<IndexedDoc> = docs
            .into_iter()
            .enumerate()
            .map(|(i, field_values)| IndexedDoc {
                doc_id: i as u32,
                field_values,
            })
            .collect();
        let mut lists: HashMap<(Field, String), Vec<u32>> = HashMap::new();
        for doc in &docs {
            for (field, text) in &doc.field_values {
                for term in tokenize(text) {
                    let list = lists.entry((*field, term)).or_default();
                    if list.last() != Some(&doc.doc_id) {
                        list.push(doc.doc_id);
                    }
                }
            }
        }
        let mut postings: BTreeMap<Field, BTreeMap<String, Vec<u32>>> = BTreeMap::new();
        for ((field, term), ids) in lists {
            postings.entry(field).or_default().insert(term, ids);
        }
        Index {
            kind,
            docs,
            postings,
        }
    }

    pub(crate) fn from_parts(
        kind: IndexKind,
        docs: Vec<IndexedDoc>,
        postings: BTreeMap<Field, BTreeMap<String, Vec<u32>>>,
    ) -> Self {
        Index {
            kind,
            docs,
            postings,
        }
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    pub fn docs(&self) -> &[IndexedDoc] {
        &self.docs
    }

    pub fn doc(&self, id: u32) -> &IndexedDoc {
        &self.docs[id as usize]
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    /// Exact posting list for an already-normalized term; empty if unknown.
    pub fn postings(&self, field: Field, term: &str) -> &[u32] {
        self.postings
            .get(&field)
            .and_then(|terms| terms.get(term))
            .map(Vec::as_slice)
            .unwrap_or_default()
    }

    /// Sorted terms of one field.
    pub fn terms(&self, field: Field) -> impl Iterator<Item = &str> {
        self.postings
            .get(&field)
            .into_iter()
            .flat_map(|terms| terms.keys().map(String::as_str))
    }

    pub(crate) fn posting_map(&self) -> &BTreeMap<Field, BTreeMap<String, Vec<u32>>> {
        &self.postings
    }
}

/// Statement documents for every edge, ordered by (dataset, attribute, value).
pub fn statement_docs(graph: &Graph) -> Vec<StatementDoc> {
    let mut docs: Vec<StatementDoc> = graph
        .edges()
        .iter()
        .map(|e| {
            let subject = graph.node(e.source);
            StatementDoc {
                dataset: subject.iri.clone().unwrap_or_default(),
                entity: subject.label.clone(),
                attribute: e.label.clone(),
                value: graph.node(e.target).label.clone(),
            }
        })
        .collect();
    docs.sort_by(|a, b| {
        (&a.dataset, &a.attribute, &a.value, &a.entity).cmp(&(
            &b.dataset,
            &b.attribute,
            &b.value,
            &b.entity,
        ))
    });
    docs
}

/// BASIC_INDEX: one document per statement of an inference-closed graph.
pub fn index_basic(graph: &Graph) -> Index {
    Index::build(
        IndexKind::Basic,
        statement_docs(graph)
            .into_iter()
            .map(StatementDoc::into_fields),
    )
}

/// Flattens a composite document into its field sequence.
pub fn composite_fields(doc: &CompositeDoc) -> Vec<(Field, String)> {
    let mut fields = vec![(Field::Dataset, doc.pattern_dataset.clone())];
    for block in &doc.blocks {
        fields.push((Field::Dataset, block.dataset.clone()));
        fields.push((Field::Entity, block.entity.clone()));
        for (a, v) in &block.pairs {
            fields.push((Field::Attribute, a.clone()));
            fields.push((Field::Value, v.clone()));
        }
    }
    fields
}

/// RULES_INDEX: one document per journey pattern.
pub fn index_rules(docs: &[CompositeDoc]) -> Index {
    Index::build(IndexKind::Rules, docs.iter().map(composite_fields))
}
