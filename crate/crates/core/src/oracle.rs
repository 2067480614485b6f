//! Static oracle: the single gold transition sequence for a gold graph.
//!
//! At each configuration the oracle picks the first applicable rule:
//!
//! 1. `Finish` when the buffer is empty and only the root is on the stack.
//! 2. An edge for a gold arc between `s1` and `s0` that is not built yet
//!    (right edges before left edges, smallest label first).
//! 3. `Node` when `s0` has a gold null neighbor that has not been created.
//! 4. `Reduce0` when `s0` has all its gold arcs, else `Reduce1` when `s1`
//!    has.
//! 5. `Swap` when `s1`, `s0` are in generated order and `s0` still misses an
//!    arc to a stack item below `s1`.
//! 6. `Shift`.
//!
//! Created nulls are placeholders; each is aligned to the gold null that
//! motivated its creation.

use std::collections::BTreeMap;
use std::fmt;

use crate::conllu::Sentence;
use crate::error::{GraphError, TransitionError};
use crate::graph::{Arc, EnhancedGraph};
use crate::id::NodeId;
use crate::transition::{Configuration, Transition, TransitionSystem};

/// Default transition budget per word.
pub const BUDGET_PER_WORD: usize = 50;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    /// 1-based position in the sequence.
    pub index: usize,
    pub transition: Transition,
    pub arc_added: Option<Arc>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OracleError {
    Terminal,
    /// No rule applies.
    DeadEnd,
    /// A gold arc cannot be built because its dependent has too many heads.
    HeadLimit(NodeId),
    NullLimit,
}

impl fmt::Display for OracleError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OracleError::Terminal => f.write_str("configuration is terminal"),
            OracleError::DeadEnd => f.write_str("no oracle rule applies"),
            OracleError::HeadLimit(n) => write!(f, "node {} exceeds the head limit", n),
            OracleError::NullLimit => f.write_str("gold graph exceeds the null node limit"),
        }
    }
}

impl std::error::Error for OracleError {}

#[derive(Clone, Debug)]
pub struct OracleState {
    gold: EnhancedGraph,
    incident: BTreeMap<NodeId, Vec<Arc>>,
    /// Created placeholder null -> gold null.
    alignment: BTreeMap<NodeId, NodeId>,
    /// Gold null -> created placeholder null.
    created: BTreeMap<NodeId, NodeId>,
}

impl OracleState {
    pub fn new(gold: EnhancedGraph) -> Self {
        let mut incident: BTreeMap<NodeId, Vec<Arc>> = BTreeMap::new();
        for arc in gold.arcs() {
            incident.entry(arc.head).or_default().push(arc.clone());
            incident.entry(arc.dependent).or_default().push(arc.clone());
        }
        OracleState {
            gold,
            incident,
            alignment: BTreeMap::new(),
            created: BTreeMap::new(),
        }
    }

    pub fn gold(&self) -> &EnhancedGraph {
        &self.gold
    }

    pub fn alignment(&self) -> &BTreeMap<NodeId, NodeId> {
        &self.alignment
    }

    /// Whether the arcs of `c` equal the gold arcs, checked through the
    /// alignment first and under any null renaming if that fails.
    pub fn matches(&self, c: &Configuration) -> bool {
        let aligned = c.arcs().len() == self.gold.arcs().len()
            && c.nodes().len() == self.gold.nodes().len()
            && c.arcs().iter().all(|a| match (self.to_gold(a.head), self.to_gold(a.dependent)) {
                (Some(h), Some(d)) => self.gold.contains_arc(h, d, &a.label),
                _ => false,
            });
        aligned || c.to_graph().equal_modulo_null_ids(&self.gold)
    }

    fn to_gold(&self, node: NodeId) -> Option<NodeId> {
        if node.is_null() {
            self.alignment.get(&node).copied()
        } else {
            Some(node)
        }
    }

    fn to_config(&self, node: NodeId) -> Option<NodeId> {
        if node.is_null() {
            self.created.get(&node).copied()
        } else {
            Some(node)
        }
    }

    fn incident(&self, gold: NodeId) -> &[Arc] {
        self.incident.get(&gold).map(Vec::as_slice).unwrap_or(&[])
    }

    fn built(&self, c: &Configuration, arc: &Arc) -> bool {
        match (self.to_config(arc.head), self.to_config(arc.dependent)) {
            (Some(h), Some(d)) => c.has_arc(h, d, &arc.label),
            _ => false,
        }
    }

    fn complete(&self, c: &Configuration, node: NodeId) -> bool {
        match self.to_gold(node) {
            Some(g) => self.incident(g).iter().all(|a| self.built(c, a)),
            None => false,
        }
    }

    /// The next gold transition. Choosing `Node` aligns the placeholder the
    /// transition is about to create, so the returned transition must be
    /// applied before the next call.
    pub fn next(
        &mut self,
        sys: &TransitionSystem,
        c: &Configuration,
    ) -> Result<Transition, OracleError> {
        if c.is_terminal() {
            return Err(OracleError::Terminal);
        }
        if c.buffer().is_empty() && c.stack() == [NodeId::Root] {
            return Ok(Transition::Finish);
        }
        let s0 = c.stack_item(0);
        let s1 = c.stack_item(1);
        let g0 = s0.and_then(|n| self.to_gold(n));
        let g1 = s1.and_then(|n| self.to_gold(n));

        if let (Some(g1), Some(g0)) = (g1, g0) {
            let pending = |head: NodeId, dep: NodeId| {
                self.incident(g1)
                    .iter()
                    .filter(move |a| a.head == head && a.dependent == dep)
                    .filter(|a| !self.built(c, a))
            };
            let edge = pending(g1, g0)
                .map(|a| Transition::RightEdge(a.label.clone()))
                .chain(pending(g0, g1).map(|a| Transition::LeftEdge(a.label.clone())))
                .next();
            if let Some(edge) = edge {
                let dependent = match edge {
                    Transition::RightEdge(_) => s0,
                    _ => s1,
                };
                return if sys.legal(c, &edge) {
                    Ok(edge)
                } else {
                    Err(OracleError::HeadLimit(dependent.expect("stack has two items")))
                };
            }
        }

        if let Some(g0) = g0 {
            let missing_null = self
                .incident(g0)
                .iter()
                .map(|a| if a.head == g0 { a.dependent } else { a.head })
                .filter(|n| n.is_null() && !self.created.contains_key(n))
                .min();
            if let Some(gold_null) = missing_null {
                if !sys.legal(c, &Transition::Node) {
                    return Err(OracleError::NullLimit);
                }
                let placeholder = c.next_null_id();
                self.alignment.insert(placeholder, gold_null);
                self.created.insert(gold_null, placeholder);
                return Ok(Transition::Node);
            }
        }

        if let Some(s0) = s0 {
            if self.complete(c, s0) && sys.legal(c, &Transition::Reduce0) {
                return Ok(Transition::Reduce0);
            }
        }
        if let Some(s1) = s1 {
            if self.complete(c, s1) && sys.legal(c, &Transition::Reduce1) {
                return Ok(Transition::Reduce1);
            }
        }

        if let (Some(g0), true) = (g0, sys.legal(c, &Transition::Swap)) {
            let below = &c.stack()[..c.stack().len() - 2];
            let wants_below = self.incident(g0).iter().any(|a| {
                let other = if a.head == g0 { a.dependent } else { a.head };
                !self.built(c, a)
                    && self
                        .to_config(other)
                        .is_some_and(|o| below.contains(&o))
            });
            if wants_below {
                return Ok(Transition::Swap);
            }
        }

        if sys.legal(c, &Transition::Shift) {
            Ok(Transition::Shift)
        } else {
            Err(OracleError::DeadEnd)
        }
    }
}

/// Why a gold graph could not be derived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NonDerivable {
    Oracle { step: usize, error: OracleError },
    BudgetExhausted { budget: usize },
    /// The sequence finished but the built graph differs from gold.
    Mismatch,
}

impl fmt::Display for NonDerivable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NonDerivable::Oracle { step, error } => write!(f, "step {}: {}", step, error),
            NonDerivable::BudgetExhausted { budget } => {
                write!(f, "transition budget of {} exhausted", budget)
            }
            NonDerivable::Mismatch => f.write_str("finished graph differs from gold"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct OracleRun {
    pub steps: Vec<TraceStep>,
    pub config: Configuration,
    pub failure: Option<NonDerivable>,
}

impl OracleRun {
    pub fn is_derivable(&self) -> bool {
        self.failure.is_none()
    }

    pub fn transitions(&self) -> Vec<Transition> {
        self.steps.iter().map(|s| s.transition.clone()).collect()
    }
}

pub fn default_budget(word_count: u32) -> usize {
    BUDGET_PER_WORD * word_count as usize
}

/// Run the oracle from the initial configuration until it finishes, fails or
/// runs out of budget.
pub fn oracle_sequence(
    sys: &TransitionSystem,
    gold: &EnhancedGraph,
    budget: usize,
) -> Result<OracleRun, TransitionError> {
    let mut config = sys.initial(gold.word_count() as u32)?;
    let mut state = OracleState::new(gold.clone());
    let mut steps = Vec::new();
    let mut failure = None;
    while !config.is_terminal() {
        if steps.len() >= budget {
            failure = Some(NonDerivable::BudgetExhausted { budget });
            break;
        }
        let transition = match state.next(sys, &config) {
            Ok(t) => t,
            Err(error) => {
                failure = Some(NonDerivable::Oracle {
                    step: steps.len() + 1,
                    error,
                });
                break;
            }
        };
        let arc_added = sys.apply_mut(&mut config, &transition)?;
        steps.push(TraceStep {
            index: steps.len() + 1,
            transition,
            arc_added,
        });
    }
    if failure.is_none() && !state.matches(&config) {
        failure = Some(NonDerivable::Mismatch);
    }
    Ok(OracleRun {
        steps,
        config,
        failure,
    })
}

#[derive(Debug, thiserror::Error)]
pub enum SentenceOracleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Transition(#[from] TransitionError),
}

/// Oracle run on the DEPS graph of a sentence with the default budget.
pub fn oracle_for_sentence(
    sys: &TransitionSystem,
    sentence: &Sentence,
) -> Result<OracleRun, SentenceOracleError> {
    let gold = sentence.extract_graph()?;
    Ok(oracle_sequence(
        sys,
        &gold,
        default_budget(sentence.word_count()),
    )?)
}

/// Apply a transition sequence from the initial configuration.
pub fn replay(
    sys: &TransitionSystem,
    word_count: u32,
    transitions: &[Transition],
) -> Result<Configuration, TransitionError> {
    let mut config = sys.initial(word_count)?;
    for t in transitions {
        sys.apply_mut(&mut config, t)?;
    }
    Ok(config)
}

/// One trace block: a `# sent_id` line, then `index<TAB>TRANSITION` lines and
/// a blank line.
pub fn format_trace(sent_id: &str, transitions: &[Transition]) -> String {
    let mut out = format!("# sent_id = {}\n", sent_id);
    for (i, t) in transitions.iter().enumerate() {
        out.push_str(&format!("{}\t{}\n", i + 1, t));
    }
    out.push('\n');
    out
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceBlock {
    pub sent_id: Option<String>,
    pub transitions: Vec<Transition>,
}

pub fn parse_trace(input: &str) -> Result<Vec<TraceBlock>, String> {
    let mut blocks = Vec::new();
    let mut current: Option<TraceBlock> = None;
    for (n, line) in input.lines().enumerate() {
        let lineno = n + 1;
        if line.is_empty() {
            blocks.extend(current.take());
            continue;
        }
        let block = current.get_or_insert_with(|| TraceBlock {
            sent_id: None,
            transitions: Vec::new(),
        });
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(id) = comment.trim().strip_prefix("sent_id") {
                block.sent_id = Some(id.trim_start().trim_start_matches('=').trim().to_owned());
            }
            continue;
        }
        let (index, transition) = line
            .split_once('\t')
            .ok_or_else(|| format!("line {}: expected `index<TAB>transition`", lineno))?;
        let expected = block.transitions.len() + 1;
        if index.parse::<usize>() != Ok(expected) {
            return Err(format!("line {}: expected step index {}", lineno, expected));
        }
        block.transitions.push(
            transition
                .parse()
                .map_err(|e| format!("line {}: {}", lineno, e))?,
        );
    }
    blocks.extend(current);
    Ok(blocks)
}
