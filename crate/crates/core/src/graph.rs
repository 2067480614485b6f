//! Enhanced dependency graphs.
//!
//! A graph is a node set (always containing the root) and a set of labeled
//! arcs. Unlike basic dependency trees, nodes may have several heads, a head
//! may be connected to the same dependent with several labels, and cycles are
//! allowed. Arcs iterate in `(head, dependent, label)` order.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::error::GraphError;
use crate::id::NodeId;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub head: NodeId,
    pub dependent: NodeId,
    pub label: String,
}

impl Arc {
    pub fn new(head: NodeId, dependent: NodeId, label: impl Into<String>) -> Self {
        Arc {
            head,
            dependent,
            label: label.into(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EnhancedGraph {
    nodes: BTreeSet<NodeId>,
    arcs: BTreeSet<Arc>,
}

impl Default for EnhancedGraph {
    fn default() -> Self {
        EnhancedGraph {
            nodes: BTreeSet::from([NodeId::Root]),
            arcs: BTreeSet::new(),
        }
    }
}

impl EnhancedGraph {
    /// A graph with the root and words `1..=word_count`, without arcs.
    pub fn with_words(word_count: u32) -> Self {
        let mut graph = EnhancedGraph::default();
        graph.nodes.extend((1..=word_count).map(NodeId::Word));
        graph
    }

    pub fn add_node(&mut self, node: NodeId) -> bool {
        self.nodes.insert(node)
    }

    /// Add an arc, rejecting unknown endpoints, root dependents, empty labels
    /// and duplicates.
    pub fn add_arc(&mut self, arc: Arc) -> Result<(), GraphError> {
        for node in [arc.head, arc.dependent] {
            if !self.nodes.contains(&node) {
                return Err(GraphError::UnknownNode(node));
            }
        }
        if arc.dependent.is_root() {
            return Err(GraphError::RootAsDependent(arc.head));
        }
        if arc.label.is_empty() {
            return Err(GraphError::EmptyLabel(arc.head, arc.dependent));
        }
        if self.arcs.contains(&arc) {
            return Err(GraphError::DuplicateArc(arc.head, arc.dependent, arc.label));
        }
        self.arcs.insert(arc);
        Ok(())
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    pub fn arcs(&self) -> &BTreeSet<Arc> {
        &self.arcs
    }

    pub fn contains_node(&self, node: NodeId) -> bool {
        self.nodes.contains(&node)
    }

    pub fn contains_arc(&self, head: NodeId, dependent: NodeId, label: &str) -> bool {
        self.arcs
            .range(Arc::new(head, dependent, "")..)
            .take_while(|a| a.head == head && a.dependent == dependent)
            .any(|a| a.label == label)
    }

    pub fn word_count(&self) -> usize {
        self.nodes.iter().filter(|n| n.is_word()).count()
    }

    pub fn null_nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.nodes.iter().copied().filter(|n| n.is_null())
    }

    fn check_node(&self, node: NodeId) -> Result<(), GraphError> {
        if self.nodes.contains(&node) {
            Ok(())
        } else {
            Err(GraphError::UnknownNode(node))
        }
    }

    pub fn heads_of(&self, node: NodeId) -> Result<BTreeSet<(NodeId, String)>, GraphError> {
        self.check_node(node)?;
        Ok(self
            .arcs
            .iter()
            .filter(|a| a.dependent == node)
            .map(|a| (a.head, a.label.clone()))
            .collect())
    }

    pub fn dependents_of(&self, node: NodeId) -> Result<BTreeSet<(NodeId, String)>, GraphError> {
        self.check_node(node)?;
        // Arcs are sorted by head, so the dependents of a node are contiguous.
        let start = Arc::new(node, NodeId::Root, "");
        Ok(self
            .arcs
            .range(start..)
            .take_while(|a| a.head == node)
            .map(|a| (a.dependent, a.label.clone()))
            .collect())
    }

    fn successors(&self) -> HashMap<NodeId, Vec<NodeId>> {
        let mut succ: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
        for arc in &self.arcs {
            succ.entry(arc.head).or_default().push(arc.dependent);
        }
        succ
    }

    /// Nodes reachable from `node` by following arcs from head to dependent.
    /// `node` itself is included only if it lies on a cycle.
    pub fn reachable_from(&self, node: NodeId) -> BTreeSet<NodeId> {
        reachable(&self.successors(), node)
    }

    pub fn is_connected(&self) -> bool {
        self.reachable_from(NodeId::Root).len() == self.nodes.len() - 1
    }

    /// Whether the two graphs are identical up to a renaming of their null
    /// nodes.
    pub fn equal_modulo_null_ids(&self, other: &EnhancedGraph) -> bool {
        if self.null_nodes().next().is_none() {
            return self == other;
        }
        null_bijection(self, other).is_some()
    }
}

pub(crate) fn reachable(succ: &HashMap<NodeId, Vec<NodeId>>, from: NodeId) -> BTreeSet<NodeId> {
    let mut seen = BTreeSet::new();
    let mut stack: Vec<NodeId> = succ.get(&from).cloned().unwrap_or_default();
    while let Some(node) = stack.pop() {
        if seen.insert(node) {
            if let Some(next) = succ.get(&node) {
                stack.extend(next.iter().copied().filter(|n| !seen.contains(n)));
            }
        }
    }
    seen
}

/// Incident arcs of a null node with the other endpoint replaced by `None`
/// when it is itself a null node.
type Signature = Vec<(bool, Option<NodeId>, String)>;

fn signature(graph: &EnhancedGraph, null: NodeId) -> Signature {
    let blank = |n: NodeId| if n.is_null() { None } else { Some(n) };
    let mut sig: Signature = graph
        .arcs
        .iter()
        .filter_map(|a| {
            if a.dependent == null {
                Some((false, blank(a.head), a.label.clone()))
            } else if a.head == null {
                Some((true, blank(a.dependent), a.label.clone()))
            } else {
                None
            }
        })
        .collect();
    sig.sort();
    sig
}

/// Find a mapping from the null nodes of `a` to those of `b` under which the
/// arc sets coincide. Candidates are restricted to nulls with identical
/// neighborhood signatures; ambiguity is resolved by backtracking.
pub fn null_bijection(a: &EnhancedGraph, b: &EnhancedGraph) -> Option<BTreeMap<NodeId, NodeId>> {
    let non_null = |g: &EnhancedGraph| -> BTreeSet<NodeId> {
        g.nodes.iter().copied().filter(|n| !n.is_null()).collect()
    };
    if a.arcs.len() != b.arcs.len() || a.nodes.len() != b.nodes.len() || non_null(a) != non_null(b)
    {
        return None;
    }
    let nulls_a: Vec<NodeId> = a.null_nodes().collect();
    let nulls_b: Vec<NodeId> = b.null_nodes().collect();
    let sig_b: Vec<Signature> = nulls_b.iter().map(|&n| signature(b, n)).collect();
    let candidates: Vec<Vec<usize>> = nulls_a
        .iter()
        .map(|&n| {
            let sig = signature(a, n);
            (0..nulls_b.len()).filter(|&j| sig_b[j] == sig).collect()
        })
        .collect();
    if candidates.iter().any(|c| c.is_empty()) {
        return None;
    }

    let mut assignment = vec![usize::MAX; nulls_a.len()];
    let mut used = vec![false; nulls_b.len()];
    let complete = |assignment: &[usize]| {
        let rename = |n: NodeId| match nulls_a.iter().position(|&x| x == n) {
            Some(i) => nulls_b[assignment[i]],
            None => n,
        };
        a.arcs
            .iter()
            .all(|arc| b.contains_arc(rename(arc.head), rename(arc.dependent), &arc.label))
    };

    fn search(
        i: usize,
        candidates: &[Vec<usize>],
        assignment: &mut [usize],
        used: &mut [bool],
        complete: &dyn Fn(&[usize]) -> bool,
    ) -> bool {
        if i == candidates.len() {
            return complete(assignment);
        }
        for &j in &candidates[i] {
            if used[j] {
                continue;
            }
            used[j] = true;
            assignment[i] = j;
            if search(i + 1, candidates, assignment, used, complete) {
                return true;
            }
            used[j] = false;
        }
        false
    }

    if search(0, &candidates, &mut assignment, &mut used, &complete) {
        Some(
            nulls_a
                .iter()
                .zip(&assignment)
                .map(|(&x, &j)| (x, nulls_b[j]))
                .collect(),
        )
    } else {
        None
    }
}
