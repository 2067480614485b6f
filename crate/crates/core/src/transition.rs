//! The transition system: configurations, legality and application.
//!
//! Eight transitions operate on a stack (top at the end) and a buffer (front
//! at the start). Edge transitions add an arc between the two topmost stack
//! items without popping either of them, so a node can collect several heads
//! and two nodes can point at each other. Two reduce transitions pop the top
//! or the second item, `Node` inserts a null node at the buffer front and
//! `Swap` moves the second stack item back to the buffer.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use crate::error::TransitionError;
use crate::graph::{Arc, EnhancedGraph};
use crate::id::NodeId;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Transition {
    Shift,
    Reduce0,
    Reduce1,
    Node,
    LeftEdge(String),
    RightEdge(String),
    Swap,
    Finish,
}

impl Transition {
    pub fn is_edge(&self) -> bool {
        matches!(self, Transition::LeftEdge(_) | Transition::RightEdge(_))
    }

    pub fn label(&self) -> Option<&str> {
        match self {
            Transition::LeftEdge(l) | Transition::RightEdge(l) => Some(l),
            _ => None,
        }
    }

    /// Transitions that carry no label.
    pub const UNLABELED: [Transition; 6] = [
        Transition::Shift,
        Transition::Reduce0,
        Transition::Reduce1,
        Transition::Node,
        Transition::Swap,
        Transition::Finish,
    ];
}

impl fmt::Display for Transition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Transition::Shift => f.write_str("SHIFT"),
            Transition::Reduce0 => f.write_str("REDUCE-0"),
            Transition::Reduce1 => f.write_str("REDUCE-1"),
            Transition::Node => f.write_str("NODE"),
            Transition::LeftEdge(l) => write!(f, "LEFT-EDGE:{}", l),
            Transition::RightEdge(l) => write!(f, "RIGHT-EDGE:{}", l),
            Transition::Swap => f.write_str("SWAP"),
            Transition::Finish => f.write_str("FINISH"),
        }
    }
}

impl FromStr for Transition {
    type Err = TransitionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let labeled = |l: &str| {
            if l.is_empty() {
                Err(TransitionError::Malformed(s.to_owned()))
            } else {
                Ok(l.to_owned())
            }
        };
        match s {
            "SHIFT" => Ok(Transition::Shift),
            "REDUCE-0" => Ok(Transition::Reduce0),
            "REDUCE-1" => Ok(Transition::Reduce1),
            "NODE" => Ok(Transition::Node),
            "SWAP" => Ok(Transition::Swap),
            "FINISH" => Ok(Transition::Finish),
            _ => {
                if let Some(l) = s.strip_prefix("LEFT-EDGE:") {
                    labeled(l).map(Transition::LeftEdge)
                } else if let Some(l) = s.strip_prefix("RIGHT-EDGE:") {
                    labeled(l).map(Transition::RightEdge)
                } else {
                    Err(TransitionError::Malformed(s.to_owned()))
                }
            }
        }
    }
}

/// Why a transition is not applicable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    Terminal,
    BufferEmpty,
    StackTooShort,
    ReduceRoot,
    Headless(NodeId),
    NullLimit,
    RootAsDependent,
    DuplicateArc,
    HeadLimit(NodeId),
    OutOfGeneratedOrder,
    FinishNotAllowed,
    EmptyLabel,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Terminal => f.write_str("the configuration is terminal"),
            Violation::BufferEmpty => f.write_str("the buffer is empty"),
            Violation::StackTooShort => f.write_str("the stack has too few items"),
            Violation::ReduceRoot => f.write_str("the root cannot be reduced or moved"),
            Violation::Headless(n) => write!(f, "node {} has no head yet", n),
            Violation::NullLimit => f.write_str("null node limit reached"),
            Violation::RootAsDependent => f.write_str("the root cannot be a dependent"),
            Violation::DuplicateArc => f.write_str("the arc already exists"),
            Violation::HeadLimit(n) => write!(f, "node {} reached the head limit", n),
            Violation::OutOfGeneratedOrder => {
                f.write_str("the two top stack items are not in generated order")
            }
            Violation::FinishNotAllowed => {
                f.write_str("finish needs an empty buffer and only the root on the stack")
            }
            Violation::EmptyLabel => f.write_str("edge label is empty"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstraintParams {
    /// Upper bound on incoming arcs per node.
    pub max_heads: usize,
    /// Upper bound on null nodes relative to the number of words.
    pub max_nulls_per_word: f64,
}

impl Default for ConstraintParams {
    fn default() -> Self {
        ConstraintParams {
            max_heads: 7,
            max_nulls_per_word: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Configuration {
    stack: Vec<NodeId>,
    buffer: VecDeque<NodeId>,
    arcs: BTreeSet<Arc>,
    nodes: BTreeSet<NodeId>,
    gen_order: BTreeMap<NodeId, u32>,
    next_gen: u32,
    head_counts: BTreeMap<NodeId, usize>,
    null_subs: BTreeMap<u32, u32>,
    null_count: u32,
    word_count: u32,
    terminal: bool,
}

impl Configuration {
    pub fn stack(&self) -> &[NodeId] {
        &self.stack
    }

    pub fn buffer(&self) -> &VecDeque<NodeId> {
        &self.buffer
    }

    pub fn arcs(&self) -> &BTreeSet<Arc> {
        &self.arcs
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    /// Stack item `i` counted from the top (`0` is the top).
    pub fn stack_item(&self, i: usize) -> Option<NodeId> {
        self.stack.len().checked_sub(i + 1).map(|j| self.stack[j])
    }

    pub fn buffer_item(&self, i: usize) -> Option<NodeId> {
        self.buffer.get(i).copied()
    }

    pub fn gen_order(&self, node: NodeId) -> Option<u32> {
        self.gen_order.get(&node).copied()
    }

    pub fn head_count(&self, node: NodeId) -> usize {
        self.head_counts.get(&node).copied().unwrap_or(0)
    }

    pub fn has_arc(&self, head: NodeId, dependent: NodeId, label: &str) -> bool {
        self.labels_between(head, dependent).any(|l| l == label)
    }

    /// Labels of constructed arcs from `head` to `dependent`.
    pub fn labels_between(&self, head: NodeId, dependent: NodeId) -> impl Iterator<Item = &str> {
        let start = Arc::new(head, dependent, "");
        self.arcs
            .range(start..)
            .take_while(move |a| a.head == head && a.dependent == dependent)
            .map(|a| a.label.as_str())
    }

    pub fn null_count(&self) -> u32 {
        self.null_count
    }

    pub fn word_count(&self) -> u32 {
        self.word_count
    }

    pub fn is_terminal(&self) -> bool {
        self.terminal
    }

    /// The id the next `Node` transition will create: `p.k` where `p` is the
    /// word position of the stack top and `k` counts nulls per position.
    pub fn next_null_id(&self) -> NodeId {
        let anchor = self.stack.last().map(|n| n.anchor()).unwrap_or(0);
        let sub = self.null_subs.get(&anchor).copied().unwrap_or(0) + 1;
        NodeId::Null(anchor, sub)
    }

    /// The graph built so far.
    pub fn to_graph(&self) -> EnhancedGraph {
        let mut graph = EnhancedGraph::default();
        for &node in &self.nodes {
            graph.add_node(node);
        }
        for arc in &self.arcs {
            graph
                .add_arc(arc.clone())
                .expect("configuration arcs are valid graph arcs");
        }
        graph
    }

    /// Terminate without checking the finish conditions.
    pub(crate) fn halt(&mut self) {
        self.terminal = true;
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct TransitionSystem {
    pub params: ConstraintParams,
}

impl TransitionSystem {
    pub fn new(params: ConstraintParams) -> Self {
        TransitionSystem { params }
    }

    /// Stack `[root]`, buffer holding all words.
    pub fn initial(&self, word_count: u32) -> Result<Configuration, TransitionError> {
        if word_count == 0 {
            return Err(TransitionError::EmptySentence);
        }
        let mut nodes = BTreeSet::from([NodeId::Root]);
        nodes.extend((1..=word_count).map(NodeId::Word));
        Ok(Configuration {
            stack: vec![NodeId::Root],
            buffer: (1..=word_count).map(NodeId::Word).collect(),
            arcs: BTreeSet::new(),
            nodes,
            gen_order: BTreeMap::from([(NodeId::Root, 0)]),
            next_gen: 1,
            head_counts: BTreeMap::new(),
            null_subs: BTreeMap::new(),
            null_count: 0,
            word_count,
            terminal: false,
        })
    }

    fn null_limit_reached(&self, c: &Configuration) -> bool {
        f64::from(c.null_count + 1) > self.params.max_nulls_per_word * f64::from(c.word_count)
    }

    /// Check a transition against the constraints, naming the first violated
    /// condition.
    pub fn check(&self, c: &Configuration, t: &Transition) -> Result<(), Violation> {
        if c.terminal {
            return Err(Violation::Terminal);
        }
        let s0 = c.stack_item(0);
        let s1 = c.stack_item(1);
        let top_two = || match (s1, s0) {
            (Some(s1), Some(s0)) => Ok((s1, s0)),
            _ => Err(Violation::StackTooShort),
        };
        match t {
            Transition::Shift => {
                if c.buffer.is_empty() {
                    return Err(Violation::BufferEmpty);
                }
            }
            Transition::Reduce0 => {
                let s0 = s0.ok_or(Violation::StackTooShort)?;
                if s0.is_root() {
                    return Err(Violation::ReduceRoot);
                }
                if c.head_count(s0) == 0 {
                    return Err(Violation::Headless(s0));
                }
            }
            Transition::Reduce1 => {
                let (s1, _) = top_two()?;
                if s1.is_root() {
                    return Err(Violation::ReduceRoot);
                }
                if c.head_count(s1) == 0 {
                    return Err(Violation::Headless(s1));
                }
            }
            Transition::Node => {
                if self.null_limit_reached(c) {
                    return Err(Violation::NullLimit);
                }
            }
            Transition::LeftEdge(l) => {
                let (s1, s0) = top_two()?;
                if l.is_empty() {
                    return Err(Violation::EmptyLabel);
                }
                if s1.is_root() {
                    return Err(Violation::RootAsDependent);
                }
                if c.has_arc(s0, s1, l) {
                    return Err(Violation::DuplicateArc);
                }
                if c.head_count(s1) >= self.params.max_heads {
                    return Err(Violation::HeadLimit(s1));
                }
            }
            Transition::RightEdge(l) => {
                let (s1, s0) = top_two()?;
                if l.is_empty() {
                    return Err(Violation::EmptyLabel);
                }
                if c.has_arc(s1, s0, l) {
                    return Err(Violation::DuplicateArc);
                }
                if c.head_count(s0) >= self.params.max_heads {
                    return Err(Violation::HeadLimit(s0));
                }
            }
            Transition::Swap => {
                let (s1, s0) = top_two()?;
                if s1.is_root() {
                    return Err(Violation::ReduceRoot);
                }
                if c.gen_order(s1) >= c.gen_order(s0) {
                    return Err(Violation::OutOfGeneratedOrder);
                }
            }
            Transition::Finish => {
                if !c.buffer.is_empty() || c.stack != [NodeId::Root] {
                    return Err(Violation::FinishNotAllowed);
                }
            }
        }
        Ok(())
    }

    pub fn legal(&self, c: &Configuration, t: &Transition) -> bool {
        self.check(c, t).is_ok()
    }

    /// All legal transitions, with edge transitions instantiated over
    /// `labels`. The order is fixed: unlabeled kinds first, then left edges
    /// and right edges in label order.
    pub fn legal_transitions(&self, c: &Configuration, labels: &[String]) -> Vec<Transition> {
        let mut legal: Vec<Transition> = Transition::UNLABELED
            .iter()
            .filter(|t| self.legal(c, t))
            .cloned()
            .collect();
        if c.stack.len() >= 2 && !c.terminal {
            for l in labels {
                let t = Transition::LeftEdge(l.clone());
                if self.legal(c, &t) {
                    legal.push(t);
                }
            }
            for l in labels {
                let t = Transition::RightEdge(l.clone());
                if self.legal(c, &t) {
                    legal.push(t);
                }
            }
        }
        legal
    }

    pub fn apply(&self, c: &Configuration, t: &Transition) -> Result<Configuration, TransitionError> {
        let mut next = c.clone();
        self.apply_mut(&mut next, t)?;
        Ok(next)
    }

    /// Apply `t` in place, returning the arc it added (edge transitions only).
    pub fn apply_mut(
        &self,
        c: &mut Configuration,
        t: &Transition,
    ) -> Result<Option<Arc>, TransitionError> {
        self.check(c, t)
            .map_err(|violation| TransitionError::Illegal {
                transition: t.clone(),
                violation,
            })?;
        let len = c.stack.len();
        match t {
            Transition::Shift => {
                let b = c.buffer.pop_front().expect("checked");
                if let std::collections::btree_map::Entry::Vacant(e) = c.gen_order.entry(b) {
                    e.insert(c.next_gen);
                    c.next_gen += 1;
                }
                c.stack.push(b);
            }
            Transition::Reduce0 => {
                c.stack.pop();
            }
            Transition::Reduce1 => {
                c.stack.remove(len - 2);
            }
            Transition::Node => {
                let id = c.next_null_id();
                *c.null_subs.entry(id.anchor()).or_insert(0) += 1;
                c.null_count += 1;
                c.nodes.insert(id);
                c.buffer.push_front(id);
            }
            Transition::LeftEdge(l) => {
                let arc = Arc::new(c.stack[len - 1], c.stack[len - 2], l.clone());
                *c.head_counts.entry(arc.dependent).or_insert(0) += 1;
                c.arcs.insert(arc.clone());
                return Ok(Some(arc));
            }
            Transition::RightEdge(l) => {
                let arc = Arc::new(c.stack[len - 2], c.stack[len - 1], l.clone());
                *c.head_counts.entry(arc.dependent).or_insert(0) += 1;
                c.arcs.insert(arc.clone());
                return Ok(Some(arc));
            }
            Transition::Swap => {
                let s1 = c.stack.remove(len - 2);
                c.buffer.push_front(s1);
            }
            Transition::Finish => {
                c.terminal = true;
            }
        }
        Ok(None)
    }

    /// Whether no transition (with edges over `labels`) is applicable in a
    /// non-terminal configuration.
    pub fn is_dead_end(&self, c: &Configuration, labels: &[String]) -> bool {
        !c.terminal && self.legal_transitions(c, labels).is_empty()
    }

    /// Terminate a configuration that has no legal transition, keeping its
    /// stack and buffer for postprocessing.
    pub fn forced_finish(
        &self,
        c: &Configuration,
        labels: &[String],
    ) -> Result<Configuration, TransitionError> {
        if !self.is_dead_end(c, labels) {
            return Err(TransitionError::ForcedFinishNotAllowed);
        }
        let mut done = c.clone();
        done.halt();
        Ok(done)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(i: u32) -> NodeId {
        NodeId::Word(i)
    }

    fn run(sys: &TransitionSystem, n: u32, ts: &[Transition]) -> Configuration {
        let mut c = sys.initial(n).unwrap();
        for t in ts {
            sys.apply_mut(&mut c, t).unwrap();
        }
        c
    }

    fn left(l: &str) -> Transition {
        Transition::LeftEdge(l.into())
    }

    fn right(l: &str) -> Transition {
        Transition::RightEdge(l.into())
    }

    #[test]
    fn initial_configuration() {
        let sys = TransitionSystem::default();
        assert_eq!(sys.initial(0), Err(TransitionError::EmptySentence));
        let c = sys.initial(8).unwrap();
        assert_eq!(c.stack(), &[NodeId::Root]);
        assert_eq!(c.buffer().len(), 8);
        assert_eq!(c.gen_order(NodeId::Root), Some(0));
        assert_eq!(c.gen_order(w(1)), None);
        let c = sys.initial(1).unwrap();
        assert_eq!(c.buffer().iter().copied().collect::<Vec<_>>(), vec![w(1)]);
    }

    #[test]
    fn transition_text_encoding() {
        for s in [
            "SHIFT",
            "REDUCE-0",
            "REDUCE-1",
            "NODE",
            "LEFT-EDGE:nmod:van",
            "RIGHT-EDGE:root",
            "SWAP",
            "FINISH",
        ] {
            assert_eq!(s.parse::<Transition>().unwrap().to_string(), s);
        }
        assert_eq!(
            "LEFT-EDGE:conj:en".parse::<Transition>().unwrap(),
            left("conj:en")
        );
        for bad in ["LEFT-EDGE:", "shift", "EDGE:x", ""] {
            assert!(bad.parse::<Transition>().is_err());
        }
    }

    #[test]
    fn reduce_requires_a_head() {
        let sys = TransitionSystem::default();
        let c = run(&sys, 2, &[Transition::Shift]);
        assert_eq!(
            sys.check(&c, &Transition::Reduce0),
            Err(Violation::Headless(w(1)))
        );
        let c = run(&sys, 2, &[Transition::Shift, Transition::Shift]);
        assert_eq!(
            sys.check(&c, &Transition::Reduce1),
            Err(Violation::Headless(w(1)))
        );
        let c = run(&sys, 2, &[Transition::Shift, right("root")]);
        assert!(sys.legal(&c, &Transition::Reduce0));
        let c = sys.initial(2).unwrap();
        assert_eq!(sys.check(&c, &Transition::Reduce0), Err(Violation::ReduceRoot));
    }

    #[test]
    fn edges_are_not_duplicated() {
        let sys = TransitionSystem::default();
        let c = run(&sys, 2, &[Transition::Shift, Transition::Shift, left("cc")]);
        assert_eq!(sys.check(&c, &left("cc")), Err(Violation::DuplicateArc));
        assert!(sys.legal(&c, &left("conj")));
        assert!(sys.legal(&c, &right("cc")));
        // Root never becomes a dependent.
        let c = run(&sys, 2, &[Transition::Shift]);
        assert_eq!(sys.check(&c, &left("x")), Err(Violation::RootAsDependent));
    }

    #[test]
    fn head_limit() {
        let sys = TransitionSystem::default();
        let mut ts = vec![Transition::Shift, Transition::Shift];
        for i in 0..7 {
            ts.push(right(&format!("l{}", i)));
        }
        let c = run(&sys, 2, &ts);
        assert_eq!(c.head_count(w(2)), 7);
        assert_eq!(sys.check(&c, &right("other")), Err(Violation::HeadLimit(w(2))));
        // The other direction is unaffected.
        assert!(sys.legal(&c, &left("l0")));

        let tight = TransitionSystem::new(ConstraintParams {
            max_heads: 1,
            ..Default::default()
        });
        let c = run(&tight, 2, &[Transition::Shift, Transition::Shift, right("a")]);
        assert_eq!(tight.check(&c, &right("b")), Err(Violation::HeadLimit(w(2))));
    }

    #[test]
    fn null_limit_and_ids() {
        let sys = TransitionSystem::default();
        let c = run(&sys, 2, &[Transition::Shift, Transition::Shift]);
        assert_eq!(c.next_null_id(), NodeId::Null(2, 1));
        let c = run(
            &sys,
            2,
            &[Transition::Shift, Transition::Shift, Transition::Node, Transition::Node],
        );
        assert_eq!(c.null_count(), 2);
        assert_eq!(
            c.buffer().iter().copied().collect::<Vec<_>>(),
            vec![NodeId::Null(2, 2), NodeId::Null(2, 1)]
        );
        assert_eq!(sys.check(&c, &Transition::Node), Err(Violation::NullLimit));
        let c = run(&sys, 1, &[Transition::Node]);
        assert!(c.nodes().contains(&NodeId::Null(0, 1)));
    }

    #[test]
    fn swap_respects_generated_order() {
        let sys = TransitionSystem::default();
        let c = run(&sys, 2, &[Transition::Shift, Transition::Shift]);
        assert!(sys.legal(&c, &Transition::Swap));
        let c = sys.apply(&c, &Transition::Swap).unwrap();
        assert_eq!(c.stack(), &[NodeId::Root, w(2)]);
        assert_eq!(c.buffer_item(0), Some(w(1)));
        let c = sys.apply(&c, &Transition::Shift).unwrap();
        // Generated order is kept across the round trip, so no second swap.
        assert_eq!(c.gen_order(w(1)), Some(1));
        assert_eq!(
            sys.check(&c, &Transition::Swap),
            Err(Violation::OutOfGeneratedOrder)
        );
        let c = run(&sys, 1, &[Transition::Shift]);
        assert_eq!(sys.check(&c, &Transition::Swap), Err(Violation::ReduceRoot));
    }

    #[test]
    fn finish_conditions() {
        let sys = TransitionSystem::default();
        let labels = vec!["a".to_owned()];
        let c = run(&sys, 1, &[Transition::Shift, right("a"), Transition::Reduce0]);
        assert_eq!(sys.legal_transitions(&c, &labels), vec![Transition::Node, Transition::Finish]);
        let done = sys.apply(&c, &Transition::Finish).unwrap();
        assert!(done.is_terminal());
        assert!(sys.legal_transitions(&done, &labels).is_empty());
        assert_eq!(
            sys.apply(&done, &Transition::Shift),
            Err(TransitionError::Illegal {
                transition: Transition::Shift,
                violation: Violation::Terminal
            })
        );
    }

    #[test]
    fn initial_legal_set() {
        let sys = TransitionSystem::default();
        let c = sys.initial(3).unwrap();
        let legal = sys.legal_transitions(&c, &["a".to_owned()]);
        assert_eq!(legal, vec![Transition::Shift, Transition::Node]);
    }

    #[test]
    fn two_cycle_without_pops() {
        let sys = TransitionSystem::default();
        let c = run(
            &sys,
            2,
            &[Transition::Shift, Transition::Shift, right("acl:relcl"), left("nsubj:relsubj")],
        );
        assert_eq!(c.stack(), &[NodeId::Root, w(1), w(2)]);
        assert!(c.has_arc(w(1), w(2), "acl:relcl"));
        assert!(c.has_arc(w(2), w(1), "nsubj:relsubj"));
    }

    #[test]
    fn forced_finish_preconditions() {
        let sys = TransitionSystem::default();
        let labels: Vec<String> = vec![];
        let c = sys.initial(1).unwrap();
        assert_eq!(
            sys.forced_finish(&c, &labels),
            Err(TransitionError::ForcedFinishNotAllowed)
        );
        let c = run(&sys, 1, &[Transition::Shift, right("a"), Transition::Reduce0, Transition::Finish]);
        assert_eq!(
            sys.forced_finish(&c, &labels),
            Err(TransitionError::ForcedFinishNotAllowed)
        );
        // Shift the only word, create and shift a null, swap: no labels means
        // no way to give either node a head.
        let c = run(
            &sys,
            1,
            &[
                Transition::Shift,
                Transition::Node,
                Transition::Shift,
                Transition::Swap,
                Transition::Shift,
            ],
        );
        assert!(sys.is_dead_end(&c, &labels));
        let done = sys.forced_finish(&c, &labels).unwrap();
        assert!(done.is_terminal());
        assert_eq!(done.stack(), c.stack());
    }
}
