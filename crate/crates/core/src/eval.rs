//! Enhanced labeled attachment score (ELAS).
//!
//! Null nodes have no counterpart in the input tokens, so both graphs are
//! first collapsed onto words: every path `h -l1-> null -l2-> d` from a
//! non-null head through null nodes to a word becomes the item
//! `(h, d, "l1>l2")`. A path ending in a null node without outgoing arcs
//! yields `(h, ⊥, l1)`; arcs leading back to a null already on the path do
//! not count as outgoing. Precision, recall and F1 are micro-averaged over items.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::conllu::Sentence;
use crate::error::EvalError;
use crate::graph::{Arc, EnhancedGraph};
use crate::id::NodeId;

/// Label chain separator in collapsed items.
pub const CHAIN_SEP: char = '>';

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Item {
    pub head: NodeId,
    /// `None` for paths ending in a null node.
    pub dependent: Option<NodeId>,
    pub label: String,
}

/// Collapsed items with multiplicities.
pub fn collapse_nulls(graph: &EnhancedGraph) -> BTreeMap<Item, usize> {
    let mut out: HashMap<NodeId, Vec<&Arc>> = HashMap::new();
    for arc in graph.arcs() {
        out.entry(arc.head).or_default().push(arc);
    }
    let mut items = BTreeMap::new();
    for arc in graph.arcs().iter().filter(|a| !a.head.is_null()) {
        let mut path = Vec::new();
        expand(&out, arc.head, arc, &mut path, &mut items);
    }
    items
}

fn expand(
    out: &HashMap<NodeId, Vec<&Arc>>,
    head: NodeId,
    arc: &Arc,
    path: &mut Vec<(NodeId, String)>,
    items: &mut BTreeMap<Item, usize>,
) {
    let label = |path: &[(NodeId, String)], last: &str| {
        let mut l: Vec<&str> = path.iter().map(|(_, l)| l.as_str()).collect();
        l.push(last);
        l.join(&CHAIN_SEP.to_string())
    };
    if !arc.dependent.is_null() {
        let item = Item {
            head,
            dependent: Some(arc.dependent),
            label: label(path, &arc.label),
        };
        *items.entry(item).or_insert(0) += 1;
        return;
    }
    let next: Vec<&Arc> = out
        .get(&arc.dependent)
        .map(|arcs| {
            arcs.iter()
                .copied()
                .filter(|a| !path.iter().any(|(n, _)| *n == a.dependent) && a.dependent != arc.dependent)
                .collect()
        })
        .unwrap_or_default();
    if next.is_empty() {
        let item = Item {
            head,
            dependent: None,
            label: label(path, &arc.label),
        };
        *items.entry(item).or_insert(0) += 1;
        return;
    }
    path.push((arc.dependent, arc.label.clone()));
    for a in next {
        expand(out, head, a, path, items);
    }
    path.pop();
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Score {
    pub correct: usize,
    pub predicted: usize,
    pub gold: usize,
}

fn ratio(a: usize, b: usize) -> f64 {
    if b == 0 {
        0.0
    } else {
        a as f64 / b as f64
    }
}

impl Score {
    pub fn precision(&self) -> f64 {
        ratio(self.correct, self.predicted)
    }

    pub fn recall(&self) -> f64 {
        ratio(self.correct, self.gold)
    }

    pub fn f1(&self) -> f64 {
        let (p, r) = (self.precision(), self.recall());
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn add(&mut self, other: Score) {
        self.correct += other.correct;
        self.predicted += other.predicted;
        self.gold += other.gold;
    }
}

impl fmt::Display for Score {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ELAS_P={:.2}", 100.0 * self.precision())?;
        writeln!(f, "ELAS_R={:.2}", 100.0 * self.recall())?;
        write!(f, "ELAS_F1={:.2}", 100.0 * self.f1())
    }
}

/// Score one predicted graph against gold.
pub fn score_graphs(gold: &EnhancedGraph, pred: &EnhancedGraph) -> Score {
    let g = collapse_nulls(gold);
    let p = collapse_nulls(pred);
    let correct = p
        .iter()
        .map(|(item, &n)| n.min(g.get(item).copied().unwrap_or(0)))
        .sum();
    Score {
        correct,
        predicted: p.values().sum(),
        gold: g.values().sum(),
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Evaluation {
    pub total: Score,
    pub per_sentence: Vec<Score>,
    /// Scores by collapsed label.
    pub per_label: BTreeMap<String, Score>,
}

impl Evaluation {
    /// Append the sentences of `other`.
    pub fn merge(&mut self, other: Evaluation) {
        self.total.add(other.total);
        self.per_sentence.extend(other.per_sentence);
        for (label, score) in other.per_label {
            self.per_label.entry(label).or_default().add(score);
        }
    }
}

fn check_alignment(index: usize, gold: &Sentence, pred: &Sentence) -> Result<(), EvalError> {
    let same = gold.word_count() == pred.word_count()
        && (1..=gold.word_count()).all(|i| gold.word(i).map(|r| &r.form) == pred.word(i).map(|r| &r.form));
    if same {
        Ok(())
    } else {
        Err(EvalError::Tokenization { sentence: index + 1 })
    }
}

/// Score one aligned sentence pair; `index` is 0-based and only used in
/// error messages.
pub fn elas_sentence(index: usize, gold: &Sentence, pred: &Sentence) -> Result<Evaluation, EvalError> {
    check_alignment(index, gold, pred)?;
    let graph = |s: &Sentence| {
        s.extract_graph().map_err(|source| EvalError::Graph {
            sentence: index + 1,
            source,
        })
    };
    let (gg, pg) = (graph(gold)?, graph(pred)?);
    let score = score_graphs(&gg, &pg);
    let mut eval = Evaluation {
        total: score,
        per_sentence: vec![score],
        per_label: BTreeMap::new(),
    };
    let gi = collapse_nulls(&gg);
    let pi = collapse_nulls(&pg);
    for (item, &n) in &gi {
        eval.per_label.entry(item.label.clone()).or_default().gold += n;
    }
    for (item, &n) in &pi {
        let s = eval.per_label.entry(item.label.clone()).or_default();
        s.predicted += n;
        s.correct += n.min(gi.get(item).copied().unwrap_or(0));
    }
    Ok(eval)
}

/// Micro-averaged ELAS of a predicted document against gold. Sentences are
/// aligned by position and must have the same word forms.
pub fn elas(gold: &[Sentence], pred: &[Sentence]) -> Result<Evaluation, EvalError> {
    if gold.len() != pred.len() {
        return Err(EvalError::SentenceCount {
            gold: gold.len(),
            pred: pred.len(),
        });
    }
    let mut eval = Evaluation::default();
    for (i, (g, p)) in gold.iter().zip(pred).enumerate() {
        eval.merge(elas_sentence(i, g, p)?);
    }
    Ok(eval)
}

/// One line per label: `label<TAB>P<TAB>R<TAB>F1<TAB>gold<TAB>predicted`.
pub fn per_label_report(eval: &Evaluation) -> String {
    let mut out = String::from("label\tP\tR\tF1\tgold\tpredicted\n");
    for (label, s) in &eval.per_label {
        out.push_str(&format!(
            "{}\t{:.2}\t{:.2}\t{:.2}\t{}\t{}\n",
            label,
            100.0 * s.precision(),
            100.0 * s.recall(),
            100.0 * s.f1(),
            s.gold,
            s.predicted
        ));
    }
    out
}
