//! Semi-naive forward chaining over the graph's edges.
//!
//! Each round joins every rule body with at least one atom drawn from the
//! facts derived in the previous round (the delta). Atoms left of the delta
//! position range over facts older than the delta, atoms right of it over
//! everything, so each combination of facts is joined once.

use std::collections::{HashMap, HashSet};

use super::{Constant, Rule, Term, TriplePattern};
use crate::error::RuleError;
use crate::graph::{local_name, mint_iri, Graph, GraphBuilder, NodeKey};

/// Upper bound on semi-naive rounds before giving up.
pub const MAX_ITERATIONS: usize = 10_000;

type Fact = (u32, u32, u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Value {
    Node(u32),
    Pred(u32),
}

#[derive(Debug, Clone)]
enum Slot {
    Var(usize),
    /// Any of these nodes (a bare label can name several entities).
    Nodes(Vec<u32>),
    Node(u32),
    Pred(u32),
}

#[derive(Debug)]
struct CompiledRule {
    head: [Slot; 3],
    body: Vec<[Slot; 3]>,
    vars: usize,
}

#[derive(Default)]
struct FactIndex {
    set: HashSet<Fact>,
    facts: Vec<Fact>,
    by_p: HashMap<u32, Vec<Fact>>,
    by_ps: HashMap<(u32, u32), Vec<Fact>>,
    by_po: HashMap<(u32, u32), Vec<Fact>>,
}

impl FactIndex {
    fn insert(&mut self, f: Fact) -> bool {
        if !self.set.insert(f) {
            return false;
        }
        self.facts.push(f);
        self.by_p.entry(f.1).or_default().push(f);
        self.by_ps.entry((f.1, f.0)).or_default().push(f);
        self.by_po.entry((f.1, f.2)).or_default().push(f);
        true
    }

    fn contains(&self, f: &Fact) -> bool {
        self.set.contains(f)
    }

    fn candidates(&self, s: Option<u32>, p: Option<u32>, o: Option<u32>) -> &[Fact] {
        let found = match (s, p, o) {
            (Some(s), Some(p), _) => self.by_ps.get(&(p, s)),
            (_, Some(p), Some(o)) => self.by_po.get(&(p, o)),
            (_, Some(p), None) => self.by_p.get(&p),
            _ => return &self.facts,
        };
        found.map(Vec::as_slice).unwrap_or_default()
    }
}

struct Interner {
    keys: Vec<NodeKey>,
    ids: HashMap<NodeKey, u32>,
    entity_labels: HashMap<String, Vec<u32>>,
    preds: Vec<String>,
    pred_ids: HashMap<String, u32>,
    namespace: String,
}

impl Interner {
    fn new(graph: &Graph) -> Self {
        let mut me = Interner {
            keys: Vec::new(),
            ids: HashMap::new(),
            entity_labels: HashMap::new(),
            preds: Vec::new(),
            pred_ids: HashMap::new(),
            namespace: graph.namespace(),
        };
        for node in graph.nodes() {
            me.node(node.key());
        }
        for label in graph.edge_labels() {
            me.pred(label);
        }
        me
    }

    fn node(&mut self, key: NodeKey) -> u32 {
        if let Some(&id) = self.ids.get(&key) {
            return id;
        }
        let id = self.keys.len() as u32;
        if let NodeKey::Entity(iri) = &key {
            self.entity_labels
                .entry(local_name(iri))
                .or_default()
                .push(id);
        }
        self.ids.insert(key.clone(), id);
        self.keys.push(key);
        id
    }

    fn pred(&mut self, label: &str) -> u32 {
        if let Some(&id) = self.pred_ids.get(label) {
            return id;
        }
        let id = self.preds.len() as u32;
        self.preds.push(label.to_string());
        self.pred_ids.insert(label.to_string(), id);
        id
    }

    fn is_entity(&self, id: u32) -> bool {
        matches!(self.keys[id as usize], NodeKey::Entity(_))
    }

    /// A constant in a rule head: existing entity with that label, else a
    /// freshly minted IRI in the graph's namespace.
    fn head_node(&mut self, c: &Constant) -> u32 {
        match c {
            Constant::Label(l) => match self.entity_labels.get(l).and_then(|v| v.first()) {
                Some(&id) => id,
                None => {
                    let iri = mint_iri(&self.namespace, l);
                    self.node(NodeKey::Entity(iri))
                }
            },
            Constant::Iri(i) => self.node(NodeKey::Entity(i.clone())),
            Constant::Literal(t) => self.node(NodeKey::Literal(t.clone())),
        }
    }

    fn body_nodes(&self, c: &Constant) -> Vec<u32> {
        match c {
            Constant::Label(l) => self.entity_labels.get(l).cloned().unwrap_or_default(),
            Constant::Iri(i) => self
                .ids
                .get(&NodeKey::Entity(i.clone()))
                .copied()
                .into_iter()
                .collect(),
            Constant::Literal(t) => self
                .ids
                .get(&NodeKey::Literal(t.clone()))
                .copied()
                .into_iter()
                .collect(),
        }
    }

    fn pred_const(&mut self, c: &Constant, iris: &mut Vec<(String, String)>) -> u32 {
        match c {
            Constant::Label(l) => self.pred(l),
            Constant::Iri(i) => {
                let label = local_name(i);
                iris.push((label.clone(), i.clone()));
                self.pred(&label)
            }
            // rejected by the parser
            Constant::Literal(t) => self.pred(t),
        }
    }
}

fn compile(
    rules: &[Rule],
    interner: &mut Interner,
    iris: &mut Vec<(String, String)>,
) -> Vec<CompiledRule> {
    // Head constants first, so body constants can refer to minted nodes.
    let heads: Vec<[Option<u32>; 3]> = rules
        .iter()
        .map(|r| {
            let h = &r.head;
            [
                match &h.subject {
                    Term::Const(c) => Some(interner.head_node(c)),
                    Term::Var(_) => None,
                },
                match &h.predicate {
                    Term::Const(c) => Some(interner.pred_const(c, iris)),
                    Term::Var(_) => None,
                },
                match &h.object {
                    Term::Const(c) => Some(interner.head_node(c)),
                    Term::Var(_) => None,
                },
            ]
        })
        .collect();

    rules
        .iter()
        .zip(heads)
        .map(|(rule, head_consts)| {
            let mut vars: Vec<String> = Vec::new();
            let mut slot_of = |name: &str| match vars.iter().position(|v| v == name) {
                Some(i) => i,
                None => {
                    vars.push(name.to_string());
                    vars.len() - 1
                }
            };
            let mut body = Vec::with_capacity(rule.body.len());
            for atom in &rule.body {
                let TriplePattern {
                    subject,
                    predicate,
                    object,
                } = atom;
                let node_slot = |t: &Term, slot_of: &mut dyn FnMut(&str) -> usize| match t {
                    Term::Var(v) => Slot::Var(slot_of(v)),
                    Term::Const(c) => Slot::Nodes(interner.body_nodes(c)),
                };
                let s = node_slot(subject, &mut slot_of);
                let o = node_slot(object, &mut slot_of);
                let p = match predicate {
                    Term::Var(v) => Slot::Var(slot_of(v)),
                    Term::Const(c) => Slot::Pred(interner.pred_const(c, iris)),
                };
                body.push([s, p, o]);
            }
            let head_slot =
                |t: &Term, c: Option<u32>, pred: bool, slot_of: &mut dyn FnMut(&str) -> usize| {
                    match (t, c) {
                        (Term::Var(v), _) => Slot::Var(slot_of(v)),
                        (_, Some(id)) if pred => Slot::Pred(id),
                        (_, Some(id)) => Slot::Node(id),
                        (Term::Const(_), None) => unreachable!("head constants are pre-resolved"),
                    }
                };
            let head = [
                head_slot(&rule.head.subject, head_consts[0], false, &mut slot_of),
                head_slot(&rule.head.predicate, head_consts[1], true, &mut slot_of),
                head_slot(&rule.head.object, head_consts[2], false, &mut slot_of),
            ];
            CompiledRule {
                head,
                body,
                vars: vars.len(),
            }
        })
        .collect()
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Source {
    Old,
    Delta,
    All,
}

struct Round<'a> {
    old: &'a FactIndex,
    delta: &'a FactIndex,
    is_entity: &'a dyn Fn(u32) -> bool,
}

impl Round<'_> {
    fn run(&self, rule: &CompiledRule, out: &mut Vec<Fact>) {
        let mut bindings = vec![None; rule.vars];
        for delta_pos in 0..rule.body.len() {
            if self.delta.facts.is_empty() {
                return;
            }
            // delta atom first, then the rest in written order
            let mut order = vec![(delta_pos, Source::Delta)];
            for j in 0..rule.body.len() {
                if j != delta_pos {
                    order.push((
                        j,
                        if j < delta_pos {
                            Source::Old
                        } else {
                            Source::All
                        },
                    ));
                }
            }
            self.join(rule, &order, &mut bindings, out);
        }
    }

    fn join(
        &self,
        rule: &CompiledRule,
        order: &[(usize, Source)],
        bindings: &mut Vec<Option<Value>>,
        out: &mut Vec<Fact>,
    ) {
        let Some(&(atom_idx, source)) = order.first() else {
            if let Some(f) = self.instantiate(&rule.head, bindings) {
                out.push(f);
            }
            return;
        };
        let atom = &rule.body[atom_idx];
        let s = bound_node(&atom[0], bindings);
        let p = match &atom[1] {
            Slot::Pred(id) => Some(*id),
            Slot::Var(v) => match bindings[*v] {
                Some(Value::Pred(id)) => Some(id),
                _ => None,
            },
            _ => None,
        };
        let o = bound_node(&atom[2], bindings);
        let sources: &[&FactIndex] = match source {
            Source::Old => &[self.old],
            Source::Delta => &[self.delta],
            Source::All => &[self.old, self.delta],
        };
        for index in sources {
            for fact in index.candidates(s, p, o) {
                let mut newly = [usize::MAX; 3];
                let values = [
                    Value::Node(fact.0),
                    Value::Pred(fact.1),
                    Value::Node(fact.2),
                ];
                let mut ok = true;
                for k in 0..3 {
                    match &atom[k] {
                        Slot::Var(v) => match bindings[*v] {
                            Some(bound) => ok = bound == values[k],
                            None => {
                                bindings[*v] = Some(values[k]);
                                newly[k] = *v;
                            }
                        },
                        Slot::Nodes(ids) => {
                            ok = matches!(values[k], Value::Node(n) if ids.contains(&n))
                        }
                        Slot::Node(id) => ok = values[k] == Value::Node(*id),
                        Slot::Pred(id) => ok = values[k] == Value::Pred(*id),
                    }
                    if !ok {
                        break;
                    }
                }
                if ok {
                    self.join(rule, &order[1..], bindings, out);
                }
                for v in newly.into_iter().filter(|&v| v != usize::MAX) {
                    bindings[v] = None;
                }
            }
        }
    }

    fn instantiate(&self, head: &[Slot; 3], bindings: &[Option<Value>]) -> Option<Fact> {
        let value = |slot: &Slot| match slot {
            Slot::Var(v) => bindings[*v],
            Slot::Node(id) => Some(Value::Node(*id)),
            Slot::Pred(id) => Some(Value::Pred(*id)),
            Slot::Nodes(_) => None,
        };
        match (value(&head[0])?, value(&head[1])?, value(&head[2])?) {
            (Value::Node(s), Value::Pred(p), Value::Node(o)) if (self.is_entity)(s) => {
                Some((s, p, o))
            }
            // literal subject or mis-sorted variable: nothing to derive
            _ => None,
        }
    }
}

fn bound_node(slot: &Slot, bindings: &[Option<Value>]) -> Option<u32> {
    match slot {
        Slot::Node(id) => Some(*id),
        Slot::Nodes(ids) if ids.len() == 1 => Some(ids[0]),
        Slot::Var(v) => match bindings[*v] {
            Some(Value::Node(id)) => Some(id),
            _ => None,
        },
        _ => None,
    }
}

/// Closes `graph` under `rules`: the smallest edge superset of the input
/// that every rule is satisfied in. The input graph is not modified.
pub fn apply_rules(graph: &Graph, rules: &[Rule]) -> Result<Graph, RuleError> {
    if rules.is_empty() {
        return Ok(graph.clone());
    }
    let mut interner = Interner::new(graph);
    let mut pred_iris = Vec::new();
    let compiled = compile(rules, &mut interner, &mut pred_iris);

    let mut old = FactIndex::default();
    let mut delta = FactIndex::default();
    for e in graph.edges() {
        let s = interner.ids[&graph.node(e.source).key()];
        let o = interner.ids[&graph.node(e.target).key()];
        let p = interner.pred_ids[&e.label];
        delta.insert((s, p, o));
    }

    let is_entity = |id: u32| interner.is_entity(id);
    let mut rounds = 0;
    while !delta.facts.is_empty() {
        rounds += 1;
        if rounds > MAX_ITERATIONS {
            return Err(RuleError::Divergence(MAX_ITERATIONS));
        }
        let round = Round {
            old: &old,
            delta: &delta,
            is_entity: &is_entity,
        };
        let mut derived = Vec::new();
        for rule in &compiled {
            round.run(rule, &mut derived);
        }
        let mut next = FactIndex::default();
        for f in derived {
            if !old.contains(&f) && !delta.contains(&f) {
                next.insert(f);
            }
        }
        for f in std::mem::take(&mut delta.facts) {
            old.insert(f);
        }
        delta = next;
    }

    let mut builder = GraphBuilder::default();
    for node in graph.nodes() {
        builder.node(node.key());
    }
    for (label, iri) in graph.predicate_iris() {
        builder.predicate(label, iri);
    }
    for (label, iri) in &pred_iris {
        builder.predicate(label, iri);
    }
    for label in &interner.preds {
        if !graph.predicate_iris().contains_key(label) && !pred_iris.iter().any(|(l, _)| l == label)
        {
            builder.predicate(label, &mint_iri(&interner.namespace, label));
        }
    }
    for &(s, p, o) in &old.facts {
        builder.edge(
            interner.keys[s as usize].clone(),
            interner.preds[p as usize].clone(),
            interner.keys[o as usize].clone(),
        );
    }
    Ok(builder.build())
}
