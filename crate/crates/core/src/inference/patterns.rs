//! Journey-pattern materialization: one composite document per reachable
//! (origin, destination) pair along a path predicate.

use std::collections::{BTreeSet, HashMap, VecDeque};

use super::PatternConfig;
use crate::graph::{mint_iri, Graph, NodeId};

/// One entity inside a composite document.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Block {
    /// The entity's IRI.
    pub dataset: String,
    pub entity: String,
    /// `(attribute, value)` label pairs.
    pub pairs: Vec<(String, String)>,
}

/// A materialized journey pattern: path blocks in path order, then one block
/// per attached entity.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CompositeDoc {
    pub pattern_dataset: String,
    pub blocks: Vec<Block>,
    /// How many leading blocks are path stops (at least 2).
    pub path_len: usize,
}

impl CompositeDoc {
    pub fn origin(&self) -> &Block {
        &self.blocks[0]
    }

    pub fn destination(&self) -> &Block {
        &self.blocks[self.path_len - 1]
    }

    pub fn path(&self) -> &[Block] {
        &self.blocks[..self.path_len]
    }

    pub fn attachments(&self) -> &[Block] {
        &self.blocks[self.path_len..]
    }
}

/// Materializes every pattern in `configs`, in config order.
pub fn materialize_all(graph: &Graph, configs: &[PatternConfig]) -> Vec<CompositeDoc> {
    configs
        .iter()
        .flat_map(|c| materialize_journey_patterns(graph, c))
        .collect()
}

/// For every ordered pair of distinct entities joined by a path of
/// `1..=max_hops` edges labelled `path_predicate`, emits the document for the
/// shortest such path. BFS visits neighbours in label order (IRI order on
/// ties); output is sorted by origin label, then destination label.
pub fn materialize_journey_patterns(graph: &Graph, config: &PatternConfig) -> Vec<CompositeDoc> {
    let pattern_dataset = mint_iri(&graph.namespace(), &config.pattern_label);

    let mut neighbours: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for e in graph.edges() {
        if e.label == config.path_predicate
            && e.source != e.target
            && graph.node(e.target).is_entity()
        {
            neighbours.entry(e.source).or_default().push(e.target);
        }
    }
    for list in neighbours.values_mut() {
        // node ids already follow IRI order
        list.sort_by(|a, b| {
            graph
                .node(*a)
                .label
                .cmp(&graph.node(*b).label)
                .then(a.cmp(b))
        });
        list.dedup();
    }

    let mut found: Vec<(NodeId, NodeId, Vec<NodeId>)> = Vec::new();
    for origin in graph.entity_ids().filter(|id| neighbours.contains_key(id)) {
        let mut parent: HashMap<NodeId, NodeId> = HashMap::new();
        let mut depth: HashMap<NodeId, u32> = HashMap::from([(origin, 0)]);
        let mut queue = VecDeque::from([origin]);
        let mut reached = Vec::new();
        while let Some(u) = queue.pop_front() {
            let d = depth[&u];
            if d == config.max_hops {
                continue;
            }
            for &v in neighbours.get(&u).map(Vec::as_slice).unwrap_or_default() {
                if depth.contains_key(&v) {
                    continue;
                }
                depth.insert(v, d + 1);
                parent.insert(v, u);
                reached.push(v);
                queue.push_back(v);
            }
        }
        for dest in reached {
            let mut path = vec![dest];
            let mut cur = dest;
            while let Some(&p) = parent.get(&cur) {
                path.push(p);
                cur = p;
            }
            path.reverse();
            found.push((origin, dest, path));
        }
    }
    found.sort_by(|a, b| {
        let key = |(o, d, _): &(NodeId, NodeId, Vec<NodeId>)| {
            (&graph.node(*o).label, &graph.node(*d).label, *o, *d)
        };
        key(a).cmp(&key(b))
    });

    found
        .into_iter()
        .map(|(_, _, path)| build_doc(graph, config, &pattern_dataset, &path))
        .collect()
}

fn build_doc(
    graph: &Graph,
    config: &PatternConfig,
    pattern_dataset: &str,
    path: &[NodeId],
) -> CompositeDoc {
    let on_path: BTreeSet<NodeId> = path.iter().copied().collect();
    let mut blocks = Vec::with_capacity(path.len());
    let mut attached: Vec<NodeId> = Vec::new();
    for &stop in path {
        let mut pairs = literal_pairs(graph, stop);
        for predicate in &config.attach_predicates {
            for e in graph
                .outgoing(stop)
                .iter()
                .filter(|e| &e.label == predicate)
            {
                let target = graph.node(e.target);
                if !target.is_entity() {
                    continue; // already listed as a literal pair
                }
                pairs.push((e.label.clone(), target.label.clone()));
                if !on_path.contains(&e.target) && !attached.contains(&e.target) {
                    attached.push(e.target);
                }
            }
        }
        blocks.push(block(graph, stop, pairs));
    }
    let path_len = blocks.len();
    for id in attached {
        let pairs = literal_pairs(graph, id);
        if !pairs.is_empty() {
            blocks.push(block(graph, id, pairs));
        }
    }
    CompositeDoc {
        pattern_dataset: pattern_dataset.to_string(),
        blocks,
        path_len,
    }
}

fn literal_pairs(graph: &Graph, id: NodeId) -> Vec<(String, String)> {
    graph
        .outgoing(id)
        .iter()
        .filter(|e| !graph.node(e.target).is_entity())
        .map(|e| (e.label.clone(), graph.node(e.target).label.clone()))
        .collect()
}

fn block(graph: &Graph, id: NodeId, pairs: Vec<(String, String)>) -> Block {
    let node = graph.node(id);
    Block {
        dataset: node.iri.clone().unwrap_or_default(),
        entity: node.label.clone(),
        pairs,
    }
}
