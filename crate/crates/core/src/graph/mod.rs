//! The labelled directed graph built from RDF triples.
//!
//! Nodes are either entities (identified by IRI, labelled by the IRI's local
//! name) or literals (identified and labelled by their text). Every triple
//! becomes an edge from its subject entity, labelled with the predicate's
//! local name. Node ids are assigned in sorted key order, so two graphs with
//! the same content compare equal regardless of how they were built.

mod iri;
mod ntriples;

use std::collections::{BTreeMap, BTreeSet, HashMap};

pub use iri::{is_absolute_iri, local_name, mint_iri, split_iri};
pub use ntriples::{object_term, parse_ntriples, write_ntriples};

use crate::error::GraphError;

/// Namespace used to mint IRIs when a graph has no entities to borrow one from.
pub const DEFAULT_NAMESPACE: &str = "http://example.org/eavsearch#";

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Object {
    Iri(String),
    Literal(String),
}

/// One RDF statement as read from N-Triples.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: String,
    pub predicate: String,
    pub object: Object,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKind {
    Entity,
    Literal,
}

/// Identity of a node: entities by IRI, literals by text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum NodeKey {
    Entity(String),
    Literal(String),
}

impl From<&Object> for NodeKey {
    fn from(object: &Object) -> Self {
        match object {
            Object::Iri(iri) => NodeKey::Entity(iri.clone()),
            Object::Literal(text) => NodeKey::Literal(text.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Node {
    pub kind: NodeKind,
    pub label: String,
    /// Present iff `kind` is `Entity`.
    pub iri: Option<String>,
}

impl Node {
    fn from_key(key: NodeKey) -> Self {
        match key {
            NodeKey::Entity(iri) => Node {
                kind: NodeKind::Entity,
                label: local_name(&iri),
                iri: Some(iri),
            },
            NodeKey::Literal(text) => Node {
                kind: NodeKind::Literal,
                label: text,
                iri: None,
            },
        }
    }

    pub fn key(&self) -> NodeKey {
        match &self.iri {
            Some(iri) => NodeKey::Entity(iri.clone()),
            None => NodeKey::Literal(self.label.clone()),
        }
    }

    pub fn is_entity(&self) -> bool {
        self.kind == NodeKind::Entity
    }

    fn as_object(&self) -> Object {
        match &self.iri {
            Some(iri) => Object::Iri(iri.clone()),
            None => Object::Literal(self.label.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeId(pub u32);

impl NodeId {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// A labelled edge. `source` is always an entity node.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub source: NodeId,
    pub label: String,
    pub target: NodeId,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    nodes: Vec<Node>,
    ids: HashMap<NodeKey, NodeId>,
    entity_labels: HashMap<String, Vec<NodeId>>,
    /// Sorted by `(source, label, target)`, no duplicates.
    edges: Vec<Edge>,
    /// `edges[out[i]..out[i + 1]]` are the outgoing edges of node `i`.
    out: Vec<usize>,
    /// Edge label -> predicate IRI used when exporting. The bytewise
    /// smallest IRI wins when several share a local name.
    predicate_iris: BTreeMap<String, String>,
    node_labels: BTreeSet<String>,
    edge_labels: BTreeSet<String>,
}

/// Collects node keys and keyed edges, then freezes them into a [`Graph`].
#[derive(Debug, Default)]
pub(crate) struct GraphBuilder {
    nodes: BTreeSet<NodeKey>,
    edges: Vec<(NodeKey, String, NodeKey)>,
    predicate_iris: BTreeMap<String, String>,
}

impl GraphBuilder {
    pub(crate) fn node(&mut self, key: NodeKey) {
        self.nodes.insert(key);
    }

    pub(crate) fn predicate(&mut self, label: &str, iri: &str) {
        match self.predicate_iris.get_mut(label) {
            Some(existing) if existing.as_str() <= iri => {}
            Some(existing) => *existing = iri.to_string(),
            None => {
                self.predicate_iris
                    .insert(label.to_string(), iri.to_string());
            }
        }
    }

    pub(crate) fn edge(&mut self, source: NodeKey, label: String, target: NodeKey) {
        debug_assert!(matches!(source, NodeKey::Entity(_)));
        self.nodes.insert(source.clone());
        self.nodes.insert(target.clone());
        self.edges.push((source, label, target));
    }

    pub(crate) fn build(self) -> Graph {
        let nodes: Vec<Node> = self.nodes.into_iter().map(Node::from_key).collect();
        let ids: HashMap<NodeKey, NodeId> = nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.key(), NodeId(i as u32)))
            .collect();
        let mut edges: Vec<Edge> = self
            .edges
            .into_iter()
            .map(|(s, label, t)| Edge {
                source: ids[&s],
                label,
                target: ids[&t],
            })
            .collect();
        edges.sort_unstable();
        edges.dedup();

        let mut out = vec![0usize; nodes.len() + 1];
        for e in &edges {
            out[e.source.index() + 1] += 1;
        }
        for i in 1..out.len() {
            out[i] += out[i - 1];
        }

        let mut entity_labels: HashMap<String, Vec<NodeId>> = HashMap::new();
        for (i, n) in nodes.iter().enumerate() {
            if n.is_entity() {
                entity_labels
                    .entry(n.label.clone())
                    .or_default()
                    .push(NodeId(i as u32));
            }
        }
        let node_labels = nodes.iter().map(|n| n.label.clone()).collect();
        let edge_labels: BTreeSet<String> = edges.iter().map(|e| e.label.clone()).collect();
        let mut predicate_iris = self.predicate_iris;
        predicate_iris.retain(|label, _| edge_labels.contains(label));

        Graph {
            nodes,
            ids,
            entity_labels,
            edges,
            out,
            predicate_iris,
            node_labels,
            edge_labels,
        }
    }
}

/// Builds the graph for a list of triples; duplicate statements collapse.
pub fn build_graph(triples: &[Triple]) -> Graph {
    let mut builder = GraphBuilder::default();
    for t in triples {
        let label = local_name(&t.predicate);
        builder.predicate(&label, &t.predicate);
        builder.edge(
            NodeKey::Entity(t.subject.clone()),
            label,
            NodeKey::from(&t.object),
        );
    }
    builder.build()
}

impl Graph {
    pub fn empty() -> Self {
        GraphBuilder::default().build()
    }

    pub fn from_triples(triples: &[Triple]) -> Self {
        build_graph(triples)
    }

    pub fn nodes(&self) -> &[Node] {
        &self.nodes
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id.index()]
    }

    pub fn node_id(&self, key: &NodeKey) -> Option<NodeId> {
        self.ids.get(key).copied()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn outgoing(&self, id: NodeId) -> &[Edge] {
        &self.edges[self.out[id.index()]..self.out[id.index() + 1]]
    }

    pub fn node_labels(&self) -> &BTreeSet<String> {
        &self.node_labels
    }

    pub fn edge_labels(&self) -> &BTreeSet<String> {
        &self.edge_labels
    }

    pub fn predicate_iris(&self) -> &BTreeMap<String, String> {
        &self.predicate_iris
    }

    /// Entity nodes carrying `label`, in IRI order.
    pub fn entities_labelled(&self, label: &str) -> &[NodeId] {
        self.entity_labels
            .get(label)
            .map(Vec::as_slice)
            .unwrap_or_default()
    }

    pub fn entity_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        // Entity keys sort before literal keys.
        (0..self.nodes.len())
            .take_while(|&i| self.nodes[i].is_entity())
            .map(|i| NodeId(i as u32))
    }

    /// The most common namespace among entity IRIs (bytewise smallest on
    /// ties), or [`DEFAULT_NAMESPACE`] for a graph without entities.
    pub fn namespace(&self) -> String {
        let mut counts: BTreeMap<&str, usize> = BTreeMap::new();
        for node in &self.nodes {
            if let Some(iri) = &node.iri {
                let (ns, _) = split_iri(iri);
                if !ns.is_empty() {
                    *counts.entry(ns).or_default() += 1;
                }
            }
        }
        let mut best: Option<(&str, usize)> = None;
        for (ns, n) in counts {
            if best.is_none_or(|(_, m)| n > m) {
                best = Some((ns, n));
            }
        }
        best.map_or_else(|| DEFAULT_NAMESPACE.to_string(), |(ns, _)| ns.to_string())
    }

    fn predicate_iri_for(&self, label: &str) -> String {
        self.predicate_iris
            .get(label)
            .cloned()
            .unwrap_or_else(|| mint_iri(&self.namespace(), label))
    }

    /// The graph's statements, one per edge.
    pub fn triples(&self) -> Vec<Triple> {
        self.edges
            .iter()
            .map(|e| Triple {
                subject: self.node(e.source).iri.clone().unwrap_or_default(),
                predicate: self.predicate_iri_for(&e.label),
                object: self.node(e.target).as_object(),
            })
            .collect()
    }

    /// Canonical N-Triples export.
    pub fn to_ntriples(&self) -> String {
        write_ntriples(&self.triples())
    }

    /// Resolves an entity by label (first in IRI order), falling back to an
    /// exact IRI match.
    pub fn resolve_entity(&self, label_or_iri: &str) -> Option<NodeId> {
        self.entities_labelled(label_or_iri)
            .first()
            .copied()
            .or_else(|| self.node_id(&NodeKey::Entity(label_or_iri.to_string())))
    }

    /// The subgraph `<e, A_e, V_e>` describing one entity.
    pub fn entity_description(&self, entity_label: &str) -> Result<EntityDescription, GraphError> {
        let id = self
            .resolve_entity(entity_label)
            .ok_or_else(|| GraphError::EntityNotFound(entity_label.to_string()))?;
        Ok(self.describe(id))
    }

    pub fn describe(&self, id: NodeId) -> EntityDescription {
        let attribute_edges = self.outgoing(id).to_vec();
        let targets: BTreeSet<NodeId> = attribute_edges.iter().map(|e| e.target).collect();
        EntityDescription {
            id,
            entity: self.node(id).clone(),
            attribute_edges,
            value_ids: targets.iter().copied().collect(),
            value_nodes: targets.iter().map(|&t| self.node(t).clone()).collect(),
        }
    }

    /// One dataset per entity with at least one outgoing edge, sorted by
    /// dataset label (the entity IRI).
    pub fn datasets(&self) -> Vec<Dataset> {
        self.entity_ids()
            .filter(|&id| !self.outgoing(id).is_empty())
            .map(|id| {
                let node = self.node(id);
                let edges = self.outgoing(id).to_vec();
                let mut members: BTreeSet<NodeId> = edges.iter().map(|e| e.target).collect();
                members.insert(id);
                let entity_nodes: Vec<NodeId> = members
                    .iter()
                    .copied()
                    .filter(|&n| self.node(n).is_entity())
                    .collect();
                Dataset {
                    label: node.iri.clone().unwrap_or_default(),
                    entity: id,
                    entity_labels: entity_nodes
                        .iter()
                        .map(|&n| self.node(n).label.clone())
                        .collect(),
                    node_labels: members
                        .iter()
                        .map(|&n| self.node(n).label.clone())
                        .collect(),
                    nodes: members.into_iter().collect(),
                    entity_nodes,
                    edges,
                }
            })
            .collect()
    }
}

/// `<e, A_e, V_e>`: an entity, its outgoing edges and their targets.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EntityDescription {
    pub id: NodeId,
    pub entity: Node,
    pub attribute_edges: Vec<Edge>,
    /// Distinct edge targets, by node id.
    pub value_ids: Vec<NodeId>,
    pub value_nodes: Vec<Node>,
}

/// The per-subject slice of a graph, labelled by the subject's IRI.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub label: String,
    pub entity: NodeId,
    /// `V_D`: the entity and every value node it points at.
    pub nodes: Vec<NodeId>,
    /// `V_D^E`
    pub entity_nodes: Vec<NodeId>,
    /// `A_D`
    pub edges: Vec<Edge>,
    /// `L_D^E`
    pub entity_labels: BTreeSet<String>,
    /// `L_D^V`
    pub node_labels: BTreeSet<String>,
}
