//! Connectivity repair and validation of predicted graphs.
//!
//! Every node of a valid graph is reachable from the root. Parses can end
//! with detached cycles or, after a premature finish, with headless nodes;
//! both are attached to the predicate with `orphan` arcs.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use crate::graph::{reachable, Arc, EnhancedGraph};
use crate::id::NodeId;

pub const ORPHAN: &str = "orphan";

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RepairReport {
    /// `(node, attached_to)` pairs in attachment order.
    pub attached_nodes: Vec<(NodeId, NodeId)>,
    pub premature_finish: bool,
}

impl RepairReport {
    pub fn is_empty(&self) -> bool {
        self.attached_nodes.is_empty() && !self.premature_finish
    }
}

/// The attachment point for repairs: the smallest `root`-labeled dependent of
/// the root, else its smallest dependent, else the root itself.
pub fn predicate(graph: &EnhancedGraph) -> NodeId {
    // Root arcs come first and are sorted by dependent.
    let mut first = None;
    for arc in graph.arcs().iter().take_while(|a| a.head == NodeId::Root) {
        if arc.label == "root" {
            return arc.dependent;
        }
        first.get_or_insert(arc.dependent);
    }
    first.unwrap_or(NodeId::Root)
}

fn successors(graph: &EnhancedGraph) -> HashMap<NodeId, Vec<NodeId>> {
    let mut succ: HashMap<NodeId, Vec<NodeId>> = HashMap::new();
    for arc in graph.arcs() {
        succ.entry(arc.head).or_default().push(arc.dependent);
    }
    succ
}

/// Attach unreachable nodes and headless nodes with `orphan` arcs.
///
/// Unreachable nodes are handled first, one at a time: the one with the most
/// distinct descendants (smallest id on ties) is attached and reachability is
/// recomputed.
pub fn repair(graph: &EnhancedGraph) -> (EnhancedGraph, RepairReport) {
    let mut graph = graph.clone();
    let mut report = RepairReport::default();
    loop {
        let succ = successors(&graph);
        let connected = reachable(&succ, NodeId::Root);
        let best = graph
            .nodes()
            .iter()
            .filter(|n| !n.is_root() && !connected.contains(n))
            .map(|&n| (reachable(&succ, n).len(), n))
            // Larger descendant count first, then smaller id.
            .min_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
        let Some((_, node)) = best else { break };
        attach(&mut graph, &mut report, node);
    }

    let headed: BTreeSet<NodeId> = graph.arcs().iter().map(|a| a.dependent).collect();
    let headless: Vec<NodeId> = graph
        .nodes()
        .iter()
        .copied()
        .filter(|n| !n.is_root() && !headed.contains(n))
        .collect();
    for node in headless {
        attach(&mut graph, &mut report, node);
    }
    (graph, report)
}

fn attach(graph: &mut EnhancedGraph, report: &mut RepairReport, node: NodeId) {
    let head = predicate(graph);
    // The predicate is always reachable and `node` is not, so they differ.
    graph
        .add_arc(Arc::new(head, node, ORPHAN))
        .expect("orphan arc to an unattached node is new");
    report.attached_nodes.push((node, head));
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GraphViolation {
    RootHasHead(NodeId),
    DuplicateArc(Arc),
    Headless(NodeId),
    Unreachable(NodeId),
}

impl fmt::Display for GraphViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GraphViolation::RootHasHead(h) => write!(f, "root has head {}", h),
            GraphViolation::DuplicateArc(a) => {
                write!(f, "duplicate arc {} -> {} ({})", a.head, a.dependent, a.label)
            }
            GraphViolation::Headless(n) => write!(f, "node {} has no head", n),
            GraphViolation::Unreachable(n) => write!(f, "node {} is not reachable from the root", n),
        }
    }
}

/// Structural violations of a graph. Headless nodes are reported as such and
/// not additionally as unreachable.
pub fn validate(graph: &EnhancedGraph) -> Vec<GraphViolation> {
    // The graph type rejects root dependents and duplicates on insertion;
    // those checks live in `validate_arcs` for raw arc lists.
    let mut violations = Vec::new();
    let headed: BTreeSet<NodeId> = graph.arcs().iter().map(|a| a.dependent).collect();
    let connected = graph.reachable_from(NodeId::Root);
    for &node in graph.nodes() {
        if node.is_root() {
            continue;
        }
        if !headed.contains(&node) {
            violations.push(GraphViolation::Headless(node));
        } else if !connected.contains(&node) {
            violations.push(GraphViolation::Unreachable(node));
        }
    }
    violations
}

/// Validate a raw arc list over `nodes`, including the conditions the graph
/// type enforces on construction.
pub fn validate_arcs(nodes: &BTreeSet<NodeId>, arcs: &[Arc]) -> Vec<GraphViolation> {
    let mut violations = Vec::new();
    let mut graph = EnhancedGraph::default();
    for &n in nodes {
        graph.add_node(n);
    }
    let mut seen = BTreeSet::new();
    for arc in arcs {
        if arc.dependent.is_root() {
            violations.push(GraphViolation::RootHasHead(arc.head));
            continue;
        }
        if !seen.insert(arc.clone()) {
            violations.push(GraphViolation::DuplicateArc(arc.clone()));
            continue;
        }
        // Unknown endpoints and empty labels are rejected by CoNLL-U parsing.
        let _ = graph.add_arc(arc.clone());
    }
    violations.extend(validate(&graph));
    violations
}
