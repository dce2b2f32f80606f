//! On-disk index layout:
//!
//! ```text
//! manifest.json   {"format_version": 1, "kind": "BASIC", "doc_count": n}
//! docs.jsonl      {"id":0,"fields":[["Dataset","..."],...]}   one per line, ascending id
//! postings.tsv    field<TAB>term<TAB>id,id,id                 sorted by field, then term
//! ```
//!
//! All files are UTF-8 with LF endings; the same index always produces the
//! same bytes.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{Field, Index, IndexKind, IndexedDoc};
use crate::error::IndexError;

pub const FORMAT_VERSION: u64 = 1;
pub const MANIFEST_FILE: &str = "manifest.json";
pub const DOCS_FILE: &str = "docs.jsonl";
pub const POSTINGS_FILE: &str = "postings.tsv";

#[derive(Debug, Serialize, Deserialize)]
struct Manifest {
    format_version: u64,
    kind: IndexKind,
    doc_count: usize,
}

#[derive(Debug, Serialize, Deserialize)]
struct DocLine {
    id: u32,
    fields: Vec<(Field, String)>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IndexError + '_ {
    move |source| IndexError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn write_index(index: &Index, dir: &Path) -> Result<(), IndexError> {
    fs::create_dir_all(dir).map_err(io_err(dir))?;

    let manifest = Manifest {
        format_version: FORMAT_VERSION,
        kind: index.kind(),
        doc_count: index.len(),
    };
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    let path = dir.join(MANIFEST_FILE);
    fs::write(&path, text).map_err(io_err(&path))?;

    let mut docs = String::new();
    for doc in index.docs() {
        let line = DocLine {
            id: doc.doc_id,
            fields: doc.field_values.clone(),
        };
        docs.push_str(&serde_json::to_string(&line).expect("doc serializes"));
        docs.push('\n');
    }
    let path = dir.join(DOCS_FILE);
    fs::write(&path, docs).map_err(io_err(&path))?;

    let mut fields: Vec<(&Field, &BTreeMap<String, Vec<u32>>)> =
        index.posting_map().iter().collect();
    fields.sort_by_key(|(f, _)| f.name());
    let mut postings = String::new();
    for (field, terms) in fields {
        for (term, ids) in terms {
            let _ = write!(postings, "{}\t{}\t", field.name(), term);
            for (i, id) in ids.iter().enumerate() {
                if i > 0 {
                    postings.push(',');
                }
                let _ = write!(postings, "{id}");
            }
            postings.push('\n');
        }
    }
    let path = dir.join(POSTINGS_FILE);
    fs::write(&path, postings).map_err(io_err(&path))?;
    Ok(())
}

fn read_text(path: PathBuf) -> Result<(String, PathBuf), IndexError> {
    match fs::read(&path) {
        Ok(bytes) => match String::from_utf8(bytes) {
            Ok(text) => Ok((text, path)),
            Err(_) => Err(IndexError::Format {
                file: path,
                message: "not valid UTF-8".into(),
            }),
        },
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Err(IndexError::Format {
            file: path,
            message: "missing".into(),
        }),
        Err(source) => Err(IndexError::Io { path, source }),
    }
}

pub fn read_index(dir: &Path) -> Result<Index, IndexError> {
    let (text, path) = read_text(dir.join(MANIFEST_FILE))?;
    let fail = |file: &Path, message: String| IndexError::Format {
        file: file.to_path_buf(),
        message,
    };
    let raw: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| fail(&path, e.to_string()))?;
    match raw
        .get("format_version")
        .and_then(serde_json::Value::as_u64)
    {
        Some(FORMAT_VERSION) => {}
        Some(found) => {
            return Err(IndexError::Version {
                file: path,
                found,
                expected: FORMAT_VERSION,
            })
        }
        None => return Err(fail(&path, "format_version missing".into())),
    }
    let manifest: Manifest = serde_json::from_value(raw).map_err(|e| fail(&path, e.to_string()))?;

    let (text, path) = read_text(dir.join(DOCS_FILE))?;
    let mut docs = Vec::with_capacity(manifest.doc_count);
    for (n, line) in text.lines().enumerate() {
        let doc: DocLine =
            serde_json::from_str(line).map_err(|e| fail(&path, format!("line {}: {e}", n + 1)))?;
        if doc.id as usize != n {
            return Err(fail(
                &path,
                format!("line {}: expected id {n}, found {}", n + 1, doc.id),
            ));
        }
        docs.push(IndexedDoc {
            doc_id: doc.id,
            field_values: doc.fields,
        });
    }
    if docs.len() != manifest.doc_count {
        return Err(fail(
            &path,
            format!(
                "{} documents, manifest says {}",
                docs.len(),
                manifest.doc_count
            ),
        ));
    }

    let (text, path) = read_text(dir.join(POSTINGS_FILE))?;
    let mut postings: BTreeMap<Field, BTreeMap<String, Vec<u32>>> = BTreeMap::new();
    let mut previous: Option<(&str, &str)> = None;
    for (n, line) in text.lines().enumerate() {
        let bad = |message: &str| fail(&path, format!("line {}: {message}", n + 1));
        let mut parts = line.split('\t');
        let (Some(field), Some(term), Some(ids), None) =
            (parts.next(), parts.next(), parts.next(), parts.next())
        else {
            return Err(bad("expected field<TAB>term<TAB>ids"));
        };
        let field_enum = Field::from_name(field).ok_or_else(|| bad("unknown field"))?;
        if previous.is_some_and(|p| p >= (field, term)) {
            return Err(bad("entries out of order"));
        }
        previous = Some((field, term));
        let mut list = Vec::new();
        for id in ids.split(',') {
            let id: u32 = id.parse().map_err(|_| bad("bad doc id"))?;
            if id as usize >= docs.len() || list.last().is_some_and(|&last| last >= id) {
                return Err(bad("doc ids out of range or not strictly increasing"));
            }
            list.push(id);
        }
        postings
            .entry(field_enum)
            .or_default()
            .insert(term.to_string(), list);
    }

    let index = Index::from_parts(manifest.kind, docs, postings);
    let rebuilt = Index::build(
        index.kind(),
        index.docs().iter().map(|d| d.field_values.clone()),
    );
    if rebuilt.posting_map() != index.posting_map() {
        return Err(fail(
            &path,
            "posting lists do not match the stored documents".into(),
        ));
    }
    Ok(index)
}
