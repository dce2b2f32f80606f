//! Shared oracles, generators and fixture plumbing for the integration
//! tests and the acceptance runner.
#![allow(dead_code)]

pub mod query_oracle;
pub mod rules_oracle;
pub mod synth;

use std::collections::BTreeSet;
use std::path::PathBuf;

use eavsearch::graph::{parse_ntriples, Graph};
use eavsearch::index::{index_basic, index_rules, tokenize, Field, Index, IndexKind};
use eavsearch::inference::{apply_rules, materialize_all, parse_rules, CompositeDoc, RuleFile};
use eavsearch::query::{evaluate, expr_docs, project, select, Condition, Expr, QueryAst, Target};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

use query_oracle::{
    build, random_corpus, random_expr, random_projection, scan_docs, scan_rows, Doc, ALPHABET,
};
use rules_oracle::{graph_facts, naive_fixpoint, random_rule_case, rules_text};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

/// The bundled corpus after inference, with both indexes.
pub struct Fixture {
    pub closed: Graph,
    pub rules: RuleFile,
    pub journeys: Vec<CompositeDoc>,
    pub basic: Index,
    pub rules_index: Index,
}

pub fn load_fixture() -> Fixture {
    let graph = Graph::from_triples(
        &parse_ntriples(&fixture_text("transport.nt")).expect("fixture parses"),
    );
    let rules = parse_rules(&fixture_text("transport.rules")).expect("rules parse");
    let closed = apply_rules(&graph, &rules.rules).expect("fixpoint");
    let journeys = materialize_all(&closed, &rules.patterns);
    Fixture {
        basic: index_basic(&closed),
        rules_index: index_rules(&journeys),
        closed,
        rules,
        journeys,
    }
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn run(cases: u32, test: impl Fn(u64) -> Result<(), TestCaseError>) -> Result<(), String> {
    runner(cases)
        .run(&any::<u64>(), test)
        .map_err(|e| e.to_string())
}

/// Engine fixpoint equals the naive oracle, is idempotent and does not
/// depend on rule order.
pub fn check_inference(cases: u32) -> Result<(), String> {
    run(cases, |seed| {
        let case = random_rule_case(seed);
        let graph = Graph::from_triples(&parse_ntriples(&case.ntriples).unwrap());
        prop_assert_eq!(graph_facts(&graph), case.facts.clone());
        let text = rules_text(&case.rules);
        let rules = parse_rules(&text)
            .map_err(|e| TestCaseError::fail(format!("{e}\n{text}")))?
            .rules;
        let closed = apply_rules(&graph, &rules).map_err(|e| TestCaseError::fail(e.to_string()))?;
        prop_assert_eq!(
            graph_facts(&closed),
            naive_fixpoint(&case.facts, &case.rules),
            "rules:\n{}",
            text
        );
        prop_assert_eq!(
            &apply_rules(&closed, &rules).unwrap(),
            &closed,
            "not idempotent"
        );
        let mut shuffled = rules.clone();
        shuffled.shuffle(&mut StdRng::seed_from_u64(seed ^ 0x5eed));
        prop_assert_eq!(
            &apply_rules(&graph, &shuffled).unwrap(),
            &closed,
            "order dependent"
        );
        shuffled.reverse();
        prop_assert_eq!(
            &apply_rules(&graph, &shuffled).unwrap(),
            &closed,
            "order dependent"
        );
        Ok(())
    })
}

fn tuple_set(rel: &eavsearch::query::Relation) -> BTreeSet<Vec<String>> {
    rel.tuples().into_iter().collect()
}

const EAV: [Field; 3] = [Field::Entity, Field::Attribute, Field::Value];

/// `π(σ_{v:k1}) ∩ π(σ_{v:k2}) = π(σ_{v:k1 ∧ v:k2})` on statement corpora.
pub fn check_algebra_law(cases: u32) -> Result<(), String> {
    run(cases, |seed| {
        let docs = random_corpus(seed, IndexKind::Basic, 50);
        let index = build(IndexKind::Basic, &docs);
        let mut rng = StdRng::seed_from_u64(seed.rotate_left(17));
        let k1 = ALPHABET[rng.random_range(0..ALPHABET.len())];
        let k2 = ALPHABET[rng.random_range(0..ALPHABET.len())];
        let c1 = Condition::new(Target::Field(Field::Value), k1);
        let c2 = Condition::new(Target::Field(Field::Value), k2);
        let left = tuple_set(&project(&select(&index, &c1), &EAV).unwrap());
        let right = tuple_set(&project(&select(&index, &c2), &EAV).unwrap());
        let lhs: BTreeSet<Vec<String>> = left.intersection(&right).cloned().collect();
        let ast = QueryAst {
            root: Expr::And(vec![Expr::Cond(c1), Expr::Cond(c2)]),
            projection: EAV.to_vec(),
        };
        prop_assert_eq!(
            lhs,
            tuple_set(&evaluate(&index, &ast)),
            "k1={} k2={}",
            k1,
            k2
        );
        Ok(())
    })
}

fn random_case(seed: u64) -> (IndexKind, Vec<Doc>, StdRng) {
    let kind = if seed.is_multiple_of(2) {
        IndexKind::Basic
    } else {
        IndexKind::Rules
    };
    let docs = random_corpus(seed, kind, 50);
    (kind, docs, StdRng::seed_from_u64(seed.rotate_left(29)))
}

/// Posting-list evaluation equals a full scan of the raw documents.
pub fn check_query_oracle(cases: u32) -> Result<(), String> {
    run(cases, |seed| {
        let (kind, docs, mut rng) = random_case(seed);
        let index = build(kind, &docs);
        let expr = random_expr(&mut rng, 3);
        let cols = random_projection(&mut rng);
        prop_assert_eq!(
            expr_docs(&index, &expr),
            scan_docs(&docs, &expr),
            "{:?}",
            expr
        );
        let ast = QueryAst {
            root: expr.clone(),
            projection: cols.clone(),
        };
        prop_assert_eq!(
            tuple_set(&evaluate(&index, &ast)),
            scan_rows(&docs, &expr, &cols),
            "{:?}",
            expr
        );
        Ok(())
    })
}

/// `NOT (a AND b)` and `NOT a OR NOT b` select the same documents.
pub fn check_de_morgan(cases: u32) -> Result<(), String> {
    run(cases, |seed| {
        let (kind, docs, mut rng) = random_case(seed);
        let index = build(kind, &docs);
        let a = random_expr(&mut rng, 2);
        let b = random_expr(&mut rng, 2);
        let lhs = Expr::Not(Box::new(Expr::And(vec![a.clone(), b.clone()])));
        let rhs = Expr::Or(vec![Expr::Not(Box::new(a)), Expr::Not(Box::new(b))]);
        prop_assert_eq!(expr_docs(&index, &lhs), expr_docs(&index, &rhs));
        Ok(())
    })
}

/// Adding a conjunct never adds rows.
pub fn check_monotonicity(cases: u32) -> Result<(), String> {
    run(cases, |seed| {
        let (kind, docs, mut rng) = random_case(seed);
        let index = build(kind, &docs);
        let a = random_expr(&mut rng, 2);
        let b = random_expr(&mut rng, 2);
        let cols = Field::ALL.to_vec();
        let base = tuple_set(&evaluate(
            &index,
            &QueryAst {
                root: a.clone(),
                projection: cols.clone(),
            },
        ));
        let narrowed = tuple_set(&evaluate(
            &index,
            &QueryAst {
                root: Expr::And(vec![a, b]),
                projection: cols,
            },
        ));
        prop_assert!(narrowed.is_subset(&base));
        Ok(())
    })
}

/// Two evaluations agree row for row, and rows follow (score desc, entity,
/// doc id).
pub fn check_ranking(cases: u32) -> Result<(), String> {
    run(cases, |seed| {
        let (kind, docs, mut rng) = random_case(seed);
        let index = build(kind, &docs);
        let ast = QueryAst {
            root: random_expr(&mut rng, 3),
            projection: Field::ALL.to_vec(),
        };
        let first = evaluate(&index, &ast);
        prop_assert_eq!(&first, &evaluate(&index, &ast));
        for w in first.rows.windows(2) {
            let key = |r: &eavsearch::query::Row| {
                (
                    std::cmp::Reverse(r.score),
                    r.entity.clone().into_bytes(),
                    r.doc_id,
                )
            };
            prop_assert!(key(&w[0]) <= key(&w[1]), "{:?} before {:?}", w[0], w[1]);
        }
        let leaves = ast.root.leaves();
        for r in &first.rows {
            let doc = &docs[r.doc_id as usize];
            let expected = leaves
                .iter()
                .filter(|c| query_oracle::holds(doc, &Expr::Cond((**c).clone())))
                .count();
            prop_assert_eq!(r.score as usize, expected);
        }
        Ok(())
    })
}

/// Postings of a synthetic corpus against a term scan of every stored value.
pub fn check_index_scan(statements: usize, seed: u64) -> Result<(), String> {
    let mut rng = StdRng::seed_from_u64(seed);
    let docs: Vec<Doc> = (0..statements)
        .map(|_| query_oracle::random_statement(&mut rng))
        .collect();
    let index = build(IndexKind::Basic, &docs);
    for field in Field::ALL {
        let mut scan: std::collections::BTreeMap<String, BTreeSet<u32>> = Default::default();
        for (i, doc) in docs.iter().enumerate() {
            for (f, text) in doc {
                if *f == field {
                    for t in tokenize(text) {
                        scan.entry(t).or_default().insert(i as u32);
                    }
                }
            }
        }
        let terms: Vec<&str> = index.terms(field).collect();
        let expected: Vec<&str> = scan.keys().map(String::as_str).collect();
        if terms != expected {
            return Err(format!("{field}: vocabulary differs"));
        }
        for (term, ids) in &scan {
            let got = index.postings(field, term);
            if !got.iter().copied().eq(ids.iter().copied()) {
                return Err(format!("{field}:{term}: postings {got:?} != scan {ids:?}"));
            }
        }
        if !index.postings(field, "absentterm").is_empty() {
            return Err("posting for a term that never occurs".into());
        }
    }
    Ok(())
}

/// Reports for the fixture queries on BASIC and RULES, scored against the
/// checked-in judgments.
pub fn fixture_reports(fx: &Fixture) -> (eavsearch::eval::Report, eavsearch::eval::Report) {
    let queries = fixture_text("queries.tsv");
    let basic =
        eavsearch::eval::run_eval(&fx.basic, &queries, &fixture_text("qrels.basic.tsv")).unwrap();
    let rules =
        eavsearch::eval::run_eval(&fx.rules_index, &queries, &fixture_text("qrels.rules.tsv"))
            .unwrap();
    (basic, rules)
}

/// RULES recall at least BASIC recall on Q2 to Q4, precision at least 0.9
/// everywhere.
pub fn check_recall_trend(fx: &Fixture) -> Result<String, String> {
    let (basic, rules) = fixture_reports(fx);
    let mut summary = Vec::new();
    for (b, r) in basic.rows.iter().zip(&rules.rows) {
        let (Some(mb), Some(mr)) = (&b.metrics, &r.metrics) else {
            return Err(format!("{} has no judgments", b.query_id));
        };
        summary.push(format!(
            "{} P {:.3}/{:.3} R {:.3}/{:.3}",
            b.query_id, mb.precision.value, mr.precision.value, mb.recall.value, mr.recall.value
        ));
        if mb.precision.value < 0.9 || mr.precision.value < 0.9 {
            return Err(format!(
                "{}: precision below 0.9 ({})",
                b.query_id,
                summary.join("; ")
            ));
        }
        if b.query_id != "Q1" && mr.recall.value < mb.recall.value {
            return Err(format!(
                "{}: RULES recall below BASIC ({})",
                b.query_id,
                summary.join("; ")
            ));
        }
    }
    if basic.rows.len() != 4 {
        return Err(format!("expected 4 queries, got {}", basic.rows.len()));
    }
    Ok(summary.join("; "))
}

/// Writes the index twice from fresh builds and once more after a read;
/// all three file sets must be byte-identical and the read must equal the
/// original.
pub fn check_store_roundtrip(statements: usize, seed: u64) -> Result<(), String> {
    let make = || {
        let mut rng = StdRng::seed_from_u64(seed);
        let docs: Vec<Doc> = (0..statements)
            .map(|_| query_oracle::random_statement(&mut rng))
            .collect();
        build(IndexKind::Basic, &docs)
    };
    let tmp = tempfile::tempdir().map_err(|e| e.to_string())?;
    let dirs: Vec<PathBuf> = ["a", "b", "c"].iter().map(|d| tmp.path().join(d)).collect();
    let index = make();
    eavsearch::index::write_index(&index, &dirs[0]).map_err(|e| e.to_string())?;
    eavsearch::index::write_index(&make(), &dirs[1]).map_err(|e| e.to_string())?;
    let read = eavsearch::index::read_index(&dirs[0]).map_err(|e| e.to_string())?;
    if read != index {
        return Err("read index differs from the written one".into());
    }
    eavsearch::index::write_index(&read, &dirs[2]).map_err(|e| e.to_string())?;
    for file in [
        eavsearch::index::MANIFEST_FILE,
        eavsearch::index::DOCS_FILE,
        eavsearch::index::POSTINGS_FILE,
    ] {
        let bytes: Vec<Vec<u8>> = dirs
            .iter()
            .map(|d| std::fs::read(d.join(file)).unwrap())
            .collect();
        if bytes[0] != bytes[1] || bytes[0] != bytes[2] {
            return Err(format!("{file} differs between runs"));
        }
    }
    Ok(())
}

pub const NS: &str = "http://www.owlontologies.com/Ontology1256801179.owl#";

/// A connection point and a shelter that encircles it.
pub fn population_ntriples() -> String {
    format!(
        "<{NS}OBSERVATOIRE_ASSAS%20(Paris)> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <{NS}CONNECTION_POINT> .\n\
         <{NS}H%C3%B4tel%20Istria%20Montparnasse> <http://www.w3.org/1999/02/22-rdf-syntax-ns#type> <{NS}SHELTER> .\n\
         <{NS}H%C3%B4tel%20Istria%20Montparnasse> <{NS}encircles> <{NS}OBSERVATOIRE_ASSAS%20(Paris)> .\n"
    )
}

pub const INVERSE_RULE: &str = "[inverse] (?y is_encircled_by ?x) :- (?x encircles ?y).\n";

/// Runs the command line in-process: (exit code, stdout, stderr).
pub fn cli(args: &[&str], stdin: &str) -> (i32, String, String) {
    let mut input = std::io::Cursor::new(stdin.as_bytes().to_vec());
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("eavsearch").chain(args.iter().copied());
    let code = eavsearch::cli::run(argv, &mut input, &mut out, &mut err);
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}
