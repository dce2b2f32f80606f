//! Precision, recall and F-measure of query runs against relevance
//! judgments.
//!
//! Documents are identified by [`IndexedDoc::fingerprint`], so judgments
//! survive re-indexing.
//!
//! [`IndexedDoc::fingerprint`]: crate::index::IndexedDoc::fingerprint

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt::Write as _;

use crate::error::{EvalError, ParseError};
use crate::index::Index;
use crate::query::{parse_query, ranked_docs, QueryAst};

/// A ratio plus whether its denominator was zero (the value is then 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ratio {
    pub value: f64,
    pub degenerate: bool,
}

fn ratio(num: usize, den: usize) -> Ratio {
    if den == 0 {
        Ratio {
            value: 0.0,
            degenerate: true,
        }
    } else {
        Ratio {
            value: num as f64 / den as f64,
            degenerate: false,
        }
    }
}

/// `tp / (tp + fp)`.
pub fn precision(tp: usize, fp: usize) -> Ratio {
    ratio(tp, tp + fp)
}

/// `tp / (tp + fn)`.
pub fn recall(tp: usize, fn_: usize) -> Ratio {
    ratio(tp, tp + fn_)
}

/// Harmonic mean `2pr / (p + r)`, 0 when both are 0.
///
/// ```
/// let f = eavsearch::eval::f_measure(0.75, 1.0);
/// assert!((f - 0.857).abs() < 0.001);
/// ```
pub fn f_measure(p: f64, r: f64) -> f64 {
    if p + r == 0.0 {
        0.0
    } else {
        2.0 * p * r / (p + r)
    }
}

/// Binary relevance judgments: query id to relevant fingerprints.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Qrels {
    entries: BTreeMap<String, BTreeSet<String>>,
}

impl Qrels {
    /// Parses `query_id <ws> fingerprint <ws> relevance` lines. Lines with
    /// relevance 0 register the query without marking the document.
    pub fn parse(text: &str) -> Result<Qrels, ParseError> {
        let mut entries: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let err = |message: &str| ParseError {
                line: i + 1,
                text: raw.to_string(),
                message: message.to_string(),
            };
            let fields: Vec<&str> = line.split_whitespace().collect();
            let [qid, doc, rel] = fields[..] else {
                return Err(err("expected query_id, document and relevance"));
            };
            let rel: u32 = rel
                .parse()
                .map_err(|_| err("relevance must be a non-negative integer"))?;
            let set = entries.entry(qid.to_string()).or_default();
            if rel > 0 {
                set.insert(doc.to_string());
            }
        }
        Ok(Qrels { entries })
    }

    pub fn insert(&mut self, query_id: &str, relevant: impl IntoIterator<Item = String>) {
        self.entries
            .entry(query_id.to_string())
            .or_default()
            .extend(relevant);
    }

    pub fn relevant(&self, query_id: &str) -> Option<&BTreeSet<String>> {
        self.entries.get(query_id)
    }

    pub fn query_ids(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    /// Serializes in the format [`Qrels::parse`] reads.
    pub fn to_tsv(&self) -> String {
        let mut out = String::new();
        for (qid, docs) in &self.entries {
            for doc in docs {
                let _ = writeln!(out, "{qid}\t{doc}\t1");
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunResult {
    pub query_id: String,
    /// Retrieved fingerprints, best first, without duplicates.
    pub retrieved: Vec<String>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Metrics {
    pub precision: Ratio,
    pub recall: Ratio,
    pub f_measure: f64,
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
}

/// Scores a run by set overlap with the judged-relevant documents.
pub fn evaluate_run(run: &RunResult, qrels: &Qrels) -> Result<Metrics, EvalError> {
    let relevant = qrels
        .relevant(&run.query_id)
        .ok_or_else(|| EvalError::UnknownQuery(run.query_id.clone()))?;
    let retrieved: BTreeSet<&str> = run.retrieved.iter().map(String::as_str).collect();
    let tp = retrieved.iter().filter(|d| relevant.contains(**d)).count();
    let fp = retrieved.len() - tp;
    let fn_ = relevant.len() - tp;
    let p = precision(tp, fp);
    let r = recall(tp, fn_);
    Ok(Metrics {
        precision: p,
        recall: r,
        f_measure: f_measure(p.value, r.value),
        tp,
        fp,
        fn_,
    })
}

/// Parses `query_id<TAB>query` lines. Blank lines and `#` comments are
/// skipped; each query must parse.
pub fn parse_queries(text: &str) -> Result<Vec<(String, QueryAst)>, ParseError> {
    let mut out: Vec<(String, QueryAst)> = Vec::new();
    let mut seen = HashSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() || line.trim_start().starts_with('#') {
            continue;
        }
        let err = |message: String| ParseError {
            line: i + 1,
            text: raw.to_string(),
            message,
        };
        let Some((id, query)) = line.split_once('\t') else {
            return Err(err("expected query_id<TAB>query".into()));
        };
        let id = id.trim();
        if id.is_empty() {
            return Err(err("empty query id".into()));
        }
        if !seen.insert(id.to_string()) {
            return Err(err(format!("duplicate query id {id:?}")));
        }
        let ast = parse_query(query).map_err(|e| err(e.to_string()))?;
        out.push((id.to_string(), ast));
    }
    Ok(out)
}

/// Runs one query and lists the fingerprints of the matched documents.
pub fn run_query(index: &Index, query_id: &str, ast: &QueryAst) -> RunResult {
    let mut seen = HashSet::new();
    let retrieved = ranked_docs(index, ast)
        .into_iter()
        .map(|(d, _)| index.doc(d).fingerprint())
        .filter(|f| seen.insert(f.clone()))
        .collect();
    RunResult {
        query_id: query_id.to_string(),
        retrieved,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub query_id: String,
    /// `None` when the query has no judgments.
    pub metrics: Option<Metrics>,
}

/// Per-query metrics in queries-file order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    pub rows: Vec<ReportRow>,
}

impl Report {
    /// Unweighted mean of (P, R, F) over evaluated queries.
    pub fn average(&self) -> Option<(f64, f64, f64)> {
        let ms: Vec<&Metrics> = self
            .rows
            .iter()
            .filter_map(|r| r.metrics.as_ref())
            .collect();
        if ms.is_empty() {
            return None;
        }
        let n = ms.len() as f64;
        Some((
            ms.iter().map(|m| m.precision.value).sum::<f64>() / n,
            ms.iter().map(|m| m.recall.value).sum::<f64>() / n,
            ms.iter().map(|m| m.f_measure).sum::<f64>() / n,
        ))
    }

    pub fn missing(&self) -> impl Iterator<Item = &str> {
        self.rows
            .iter()
            .filter(|r| r.metrics.is_none())
            .map(|r| r.query_id.as_str())
    }

    /// `query_id P R F tp fp fn`, tab separated, then an `AVG` row.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("query_id\tP\tR\tF\ttp\tfp\tfn\n");
        for row in &self.rows {
            match &row.metrics {
                Some(m) => {
                    let _ = writeln!(
                        out,
                        "{}\t{:.3}\t{:.3}\t{:.3}\t{}\t{}\t{}",
                        row.query_id,
                        m.precision.value,
                        m.recall.value,
                        m.f_measure,
                        m.tp,
                        m.fp,
                        m.fn_
                    );
                }
                None => {
                    let _ = writeln!(out, "{}\t-\t-\t-\t-\t-\t-", row.query_id);
                }
            }
        }
        if let Some((p, r, f)) = self.average() {
            let _ = writeln!(out, "AVG\t{p:.3}\t{r:.3}\t{f:.3}\t-\t-\t-");
        }
        out
    }
}

/// Evaluates every query in `queries` against `index` and `qrels`.
pub fn run_eval(index: &Index, queries: &str, qrels: &str) -> Result<Report, EvalError> {
    let queries = parse_queries(queries)?;
    let qrels = Qrels::parse(qrels)?;
    let rows = queries
        .iter()
        .map(|(id, ast)| {
            let run = run_query(index, id, ast);
            ReportRow {
                query_id: id.clone(),
                metrics: evaluate_run(&run, &qrels).ok(),
            }
        })
        .collect();
    Ok(Report { rows })
}
