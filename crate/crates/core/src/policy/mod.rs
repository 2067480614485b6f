//! Transition policies and the greedy parse driver.

mod baseline;
pub mod features;
mod model;

use std::collections::BTreeSet;

pub use baseline::{copy_tree_baseline, label_inventory, LabelInventory};
pub use model::{oracle_accuracy, train, LinearModel, ModelPolicy, TrainOptions, TrainReport};

use crate::conllu::Sentence;
use crate::error::TransitionError;
use crate::graph::EnhancedGraph;
use crate::oracle::OracleState;
use crate::repair::{repair, RepairReport};
use crate::transition::{Configuration, Transition, TransitionSystem};

/// Chooses the next transition in a non-terminal configuration.
pub trait Policy {
    /// Labels used to instantiate edge transitions.
    fn labels(&self) -> &[String];

    /// Pick one of `legal` (never empty), or `None` to stop early.
    fn choose(
        &mut self,
        sys: &TransitionSystem,
        config: &Configuration,
        sentence: &Sentence,
        legal: &[Transition],
    ) -> Option<Transition>;
}

/// Follows the static oracle for a known gold graph.
pub struct OraclePolicy {
    state: OracleState,
    labels: Vec<String>,
}

impl OraclePolicy {
    pub fn new(gold: EnhancedGraph) -> Self {
        let labels: BTreeSet<String> = gold.arcs().iter().map(|a| a.label.clone()).collect();
        OraclePolicy {
            state: OracleState::new(gold),
            labels: labels.into_iter().collect(),
        }
    }
}

impl Policy for OraclePolicy {
    fn labels(&self) -> &[String] {
        &self.labels
    }

    fn choose(
        &mut self,
        sys: &TransitionSystem,
        config: &Configuration,
        _sentence: &Sentence,
        _legal: &[Transition],
    ) -> Option<Transition> {
        self.state.next(sys, config).ok()
    }
}

/// Shifts every word and then stops, leaving all attachments to repair.
#[derive(Clone, Copy, Debug, Default)]
pub struct ShiftPolicy;

impl Policy for ShiftPolicy {
    fn labels(&self) -> &[String] {
        &[]
    }

    fn choose(
        &mut self,
        _sys: &TransitionSystem,
        _config: &Configuration,
        _sentence: &Sentence,
        legal: &[Transition],
    ) -> Option<Transition> {
        [Transition::Shift, Transition::Finish]
            .into_iter()
            .find(|t| legal.contains(t))
    }
}

#[derive(Clone, Debug)]
pub struct ParseOutput {
    /// The repaired graph.
    pub graph: EnhancedGraph,
    pub report: RepairReport,
    pub trace: Vec<Transition>,
    /// The final configuration before repair.
    pub config: Configuration,
    pub budget_exhausted: bool,
}

/// Greedy parse: ask the policy for transitions until the configuration is
/// terminal, then repair connectivity.
///
/// The parse stops without `Finish` when no transition is legal, when the
/// policy returns `None` or after `budget` transitions; such stops are
/// flagged as premature in the repair report.
pub fn parse(
    sys: &TransitionSystem,
    sentence: &Sentence,
    policy: &mut dyn Policy,
    budget: usize,
) -> Result<ParseOutput, TransitionError> {
    let mut config = sys.initial(sentence.word_count())?;
    let mut trace = Vec::new();
    let mut premature = false;
    let mut budget_exhausted = false;
    while !config.is_terminal() {
        if trace.len() >= budget {
            budget_exhausted = true;
            premature = true;
            config.halt();
            break;
        }
        let legal = sys.legal_transitions(&config, policy.labels());
        if legal.is_empty() {
            config = sys.forced_finish(&config, policy.labels())?;
            premature = true;
            break;
        }
        let Some(t) = policy.choose(sys, &config, sentence, &legal) else {
            premature = true;
            config.halt();
            break;
        };
        sys.apply_mut(&mut config, &t)?;
        trace.push(t);
    }
    let (graph, mut report) = repair(&config.to_graph());
    report.premature_finish = premature;
    Ok(ParseOutput {
        graph,
        report,
        trace,
        config,
        budget_exhausted,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::parse_conllu;
    use crate::id::NodeId;
    use crate::oracle::default_budget;
    use crate::repair::{validate, ORPHAN};

    const CONTROL: &str = "1\tkids\t_\tNOUN\t_\t_\t2\tnsubj\t2:nsubj|3:nsubj:xsubj\t_\n\
2\twant\t_\tVERB\t_\t_\t0\troot\t0:root\t_\n\
3\tplay\t_\tVERB\t_\t_\t2\txcomp\t2:xcomp\t_\n\n";

    #[test]
    fn oracle_policy_reproduces_gold() {
        let s = parse_conllu(CONTROL).unwrap().remove(0);
        let gold = s.extract_graph().unwrap();
        let sys = TransitionSystem::default();
        let out = parse(&sys, &s, &mut OraclePolicy::new(gold.clone()), 150).unwrap();
        assert!(out.report.is_empty());
        assert_eq!(out.graph, gold);
        assert_eq!(out.trace.last(), Some(&Transition::Finish));
    }

    #[test]
    fn shift_policy_leaves_attachment_to_repair() {
        let s = parse_conllu(CONTROL).unwrap().remove(0);
        let sys = TransitionSystem::default();
        let out = parse(&sys, &s, &mut ShiftPolicy, default_budget(3)).unwrap();
        assert_eq!(out.trace, vec![Transition::Shift; 3]);
        assert!(out.report.premature_finish);
        assert!(validate(&out.graph).is_empty());
        // The first attached word becomes the predicate for the rest.
        assert!(out.graph.contains_arc(NodeId::Root, NodeId::Word(1), ORPHAN));
        for i in 2..=3 {
            assert!(out.graph.contains_arc(NodeId::Word(1), NodeId::Word(i), ORPHAN));
        }
    }

    #[test]
    fn budget_stops_parse() {
        let s = parse_conllu(CONTROL).unwrap().remove(0);
        let sys = TransitionSystem::default();
        let out = parse(&sys, &s, &mut ShiftPolicy, 1).unwrap();
        assert!(out.budget_exhausted);
        assert_eq!(out.trace.len(), 1);
        assert!(validate(&out.graph).is_empty());
    }
}
