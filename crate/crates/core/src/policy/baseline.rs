//! Label inventory and the copy-tree baseline.

use std::collections::BTreeMap;

use crate::conllu::Sentence;
use crate::error::ConlluError;
use crate::graph::{Arc, EnhancedGraph};
use crate::id::NodeId;
use crate::transition::Transition;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct LabelInventory {
    /// Enhanced label -> number of arcs.
    pub labels: BTreeMap<String, usize>,
}

impl LabelInventory {
    /// Labels carrying a subtype or case suffix, such as `nmod:van`.
    pub fn suffixed(&self) -> usize {
        self.labels.keys().filter(|l| l.contains(':')).count()
    }

    pub fn label_list(&self) -> Vec<String> {
        self.labels.keys().cloned().collect()
    }

    /// Distinct labels plus the unlabeled transitions.
    pub fn transition_count(&self) -> usize {
        self.labels.len() + Transition::UNLABELED.len()
    }

    /// Left and right edge transitions over all labels.
    pub fn edge_transition_count(&self) -> usize {
        2 * self.labels.len()
    }
}

/// Count enhanced labels over the DEPS columns of a treebank.
pub fn label_inventory(treebank: &[Sentence]) -> LabelInventory {
    let mut labels: BTreeMap<String, usize> = BTreeMap::new();
    for sentence in treebank {
        for row in sentence.rows() {
            for dep in &row.deps {
                *labels.entry(dep.label.clone()).or_insert(0) += 1;
            }
        }
    }
    LabelInventory { labels }
}

/// Predict the enhanced graph as a copy of the basic tree (HEAD and DEPREL);
/// null nodes are dropped.
pub fn copy_tree_baseline(sentence: &Sentence) -> Result<Sentence, ConlluError> {
    let mut graph = EnhancedGraph::with_words(sentence.word_count());
    for i in 1..=sentence.word_count() {
        let row = sentence.word(i).expect("word index in range");
        let head = row.head.ok_or(ConlluError::MissingHead(i))?;
        graph
            .add_arc(Arc::new(head, NodeId::Word(i), row.deprel.clone()))
            .map_err(|source| ConlluError::Graph {
                sentence: 0,
                source,
            })?;
    }
    sentence.inject_graph(&graph)
}
