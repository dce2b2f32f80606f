//! Brute-force forward chaining over label triples, plus a random
//! graph/rule generator.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use eavsearch::graph::{local_name, Graph, Object};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Ent(String),
    Lit(String),
}

/// (subject, predicate label, object)
pub type Fact = (Node, String, Node);

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum T {
    /// node variable
    Var(usize),
    /// predicate variable
    PVar(usize),
    Pred(String),
    /// entity label
    Ent(String),
    Lit(String),
}

#[derive(Debug, Clone)]
pub struct Atom(pub T, pub T, pub T);

#[derive(Debug, Clone)]
pub struct ORule {
    pub head: Atom,
    pub body: Vec<Atom>,
}

impl fmt::Display for T {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            T::Var(i) => write!(f, "?v{i}"),
            T::PVar(i) => write!(f, "?q{i}"),
            T::Pred(p) | T::Ent(p) => write!(f, "{p}"),
            T::Lit(l) => write!(f, "\"{l}\""),
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({} {} {})", self.0, self.1, self.2)
    }
}

pub fn rules_text(rules: &[ORule]) -> String {
    let mut out = String::new();
    for r in rules {
        let body: Vec<String> = r.body.iter().map(|a| a.to_string()).collect();
        out.push_str(&format!("{} :- {}.\n", r.head, body.join(", ")));
    }
    out
}

#[derive(Debug, Clone, Default)]
struct Binding {
    nodes: HashMap<usize, Node>,
    preds: HashMap<usize, String>,
}

fn label_of(n: &Node) -> &str {
    match n {
        Node::Ent(iri) => iri.rsplit('#').next().unwrap_or(iri),
        Node::Lit(l) => l,
    }
}

fn unify_node(t: &T, n: &Node, b: &mut Binding) -> bool {
    match t {
        T::Var(i) => match b.nodes.get(i) {
            Some(bound) => bound == n,
            None => {
                b.nodes.insert(*i, n.clone());
                true
            }
        },
        T::Ent(label) => matches!(n, Node::Ent(_)) && label_of(n) == label,
        T::Lit(l) => n == &Node::Lit(l.clone()),
        _ => false,
    }
}

fn unify_pred(t: &T, p: &str, b: &mut Binding) -> bool {
    match t {
        T::PVar(i) => match b.preds.get(i) {
            Some(bound) => bound == p,
            None => {
                b.preds.insert(*i, p.to_string());
                true
            }
        },
        T::Pred(label) => label == p,
        _ => false,
    }
}

fn matches(atoms: &[Atom], facts: &BTreeSet<Fact>, b: Binding, out: &mut Vec<Binding>) {
    let Some((first, rest)) = atoms.split_first() else {
        out.push(b);
        return;
    };
    for (s, p, o) in facts {
        let mut nb = b.clone();
        if unify_node(&first.0, s, &mut nb)
            && unify_pred(&first.1, p, &mut nb)
            && unify_node(&first.2, o, &mut nb)
        {
            matches(rest, facts, nb, out);
        }
    }
}

/// Applies every rule to every fact combination until nothing changes.
pub fn naive_fixpoint(facts: &BTreeSet<Fact>, rules: &[ORule]) -> BTreeSet<Fact> {
    let mut all = facts.clone();
    loop {
        let mut new = Vec::new();
        for r in rules {
            let mut bindings = Vec::new();
            matches(&r.body, &all, Binding::default(), &mut bindings);
            for b in bindings {
                let s = match &r.head.0 {
                    T::Var(i) => b.nodes[i].clone(),
                    _ => unreachable!("generated heads use variables"),
                };
                if !matches!(s, Node::Ent(_)) {
                    continue;
                }
                let p = match &r.head.1 {
                    T::Pred(p) => p.clone(),
                    T::PVar(i) => b.preds[i].clone(),
                    _ => unreachable!(),
                };
                let o = match &r.head.2 {
                    T::Var(i) => b.nodes[i].clone(),
                    _ => unreachable!(),
                };
                let fact = (s, p, o);
                if !all.contains(&fact) {
                    new.push(fact);
                }
            }
        }
        if new.is_empty() {
            return all;
        }
        all.extend(new);
    }
}

/// A graph's edges as label facts.
pub fn graph_facts(g: &Graph) -> BTreeSet<Fact> {
    g.triples()
        .into_iter()
        .map(|t| {
            let o = match t.object {
                Object::Iri(i) => Node::Ent(i),
                Object::Literal(l) => Node::Lit(l),
            };
            (Node::Ent(t.subject), local_name(&t.predicate), o)
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct RuleCase {
    pub ntriples: String,
    pub facts: BTreeSet<Fact>,
    pub rules: Vec<ORule>,
}

const BASE: &str = "http://example.org/g#";

/// Up to 30 edges over at most 8 entities, and 1 to 4 safe rules.
pub fn random_rule_case(seed: u64) -> RuleCase {
    let mut rng = StdRng::seed_from_u64(seed);
    let n_ent = rng.random_range(2..=8);
    let n_edges = rng.random_range(0..=30);
    let mut facts = BTreeSet::new();
    for _ in 0..n_edges {
        let s = Node::Ent(format!("{BASE}n{}", rng.random_range(0..n_ent)));
        let p = format!("p{}", rng.random_range(0..3));
        let o = if rng.random_bool(0.2) {
            Node::Lit(format!("l{}", rng.random_range(0..2)))
        } else {
            Node::Ent(format!("{BASE}n{}", rng.random_range(0..n_ent)))
        };
        facts.insert((s, p, o));
    }
    let mut ntriples = String::new();
    for (s, p, o) in &facts {
        let Node::Ent(s) = s else { unreachable!() };
        let o = match o {
            Node::Ent(i) => format!("<{i}>"),
            Node::Lit(l) => format!("\"{l}\""),
        };
        ntriples.push_str(&format!("<{s}> <{BASE}{p}> {o} .\n"));
    }

    let mut rules = Vec::new();
    for _ in 0..rng.random_range(1..=4) {
        let mut body = Vec::new();
        let mut node_vars = BTreeSet::new();
        let mut pred_var = false;
        for _ in 0..rng.random_range(1..=3) {
            let s = if rng.random_bool(0.15) {
                T::Ent(format!("n{}", rng.random_range(0..n_ent)))
            } else {
                let v = rng.random_range(0..4);
                node_vars.insert(v);
                T::Var(v)
            };
            let p = if rng.random_bool(0.1) {
                pred_var = true;
                T::PVar(0)
            } else {
                T::Pred(format!("p{}", rng.random_range(0..3)))
            };
            let o = match rng.random_range(0..10) {
                0 => T::Ent(format!("n{}", rng.random_range(0..n_ent))),
                1 => T::Lit(format!("l{}", rng.random_range(0..2))),
                _ => {
                    let v = rng.random_range(0..4);
                    node_vars.insert(v);
                    T::Var(v)
                }
            };
            body.push(Atom(s, p, o));
        }
        if node_vars.is_empty() {
            let v = 0;
            node_vars.insert(v);
            body.push(Atom(T::Var(v), T::Pred("p0".into()), T::Var(v)));
        }
        let vars: Vec<usize> = node_vars.into_iter().collect();
        let pick = |rng: &mut StdRng| vars[rng.random_range(0..vars.len())];
        let hp = if pred_var && rng.random_bool(0.5) {
            T::PVar(0)
        } else {
            T::Pred(format!("p{}", rng.random_range(0..4)))
        };
        let head = Atom(T::Var(pick(&mut rng)), hp, T::Var(pick(&mut rng)));
        rules.push(ORule { head, body });
    }
    RuleCase {
        ntriples,
        facts,
        rules,
    }
}
