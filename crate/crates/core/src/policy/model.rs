//! Averaged perceptron over hashed features, trained by imitating the
//! static oracle.
//!
//! # Model file format
//!
//! A line-based UTF-8 text file:
//!
//! ```text
//! edparse-linear-model 1
//! feature_dim<TAB>1048576
//! averaged<TAB>true
//! transitions<TAB>N
//! SHIFT                      (N lines, one transition each; line order is
//! ...                         the weight column index)
//! weights<TAB>M
//! <feature><TAB><col>=<w> <col>=<w> ...   (M lines, ascending feature)
//! ```
//!
//! Weights are `f32` in shortest round-trip notation and zero weights are
//! omitted, so a model serializes to the same bytes every time.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt::Write as _;

use log::{info, warn};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::conllu::Sentence;
use crate::error::ModelError;
use crate::oracle::{default_budget, OracleState};
use crate::transition::{Transition, TransitionSystem};

use super::features::{featurize, FeatureVector, DEFAULT_FEATURE_DIM};
use super::Policy;

const MAGIC: &str = "edparse-linear-model 1";

#[derive(Clone, Debug, PartialEq)]
pub struct LinearModel {
    feature_dim: u32,
    averaged: bool,
    transitions: Vec<Transition>,
    index: HashMap<Transition, usize>,
    labels: Vec<String>,
    weights: BTreeMap<u32, Vec<f32>>,
}

impl LinearModel {
    /// An all-zero model over the unlabeled transitions plus left and right
    /// edges for every label.
    pub fn new(feature_dim: u32, labels: &BTreeSet<String>) -> Self {
        let mut transitions: Vec<Transition> = Transition::UNLABELED.to_vec();
        transitions.extend(labels.iter().map(|l| Transition::LeftEdge(l.clone())));
        transitions.extend(labels.iter().map(|l| Transition::RightEdge(l.clone())));
        Self::from_parts(feature_dim, false, transitions, BTreeMap::new())
    }

    fn from_parts(
        feature_dim: u32,
        averaged: bool,
        transitions: Vec<Transition>,
        weights: BTreeMap<u32, Vec<f32>>,
    ) -> Self {
        let index = transitions
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        let labels: BTreeSet<String> = transitions
            .iter()
            .filter_map(|t| t.label().map(str::to_owned))
            .collect();
        LinearModel {
            feature_dim,
            averaged,
            transitions,
            index,
            labels: labels.into_iter().collect(),
            weights,
        }
    }

    pub fn feature_dim(&self) -> u32 {
        self.feature_dim
    }

    pub fn is_averaged(&self) -> bool {
        self.averaged
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn column(&self, t: &Transition) -> Option<usize> {
        self.index.get(t).copied()
    }

    pub fn score(&self, features: &FeatureVector, column: usize) -> f32 {
        features
            .indices()
            .iter()
            .filter_map(|f| self.weights.get(f))
            .map(|w| w[column])
            .sum()
    }

    /// Highest scoring candidate; ties go to the earliest candidate.
    pub fn best<'a>(
        &self,
        features: &FeatureVector,
        candidates: &'a [Transition],
    ) -> Option<&'a Transition> {
        let mut best: Option<(&Transition, f32)> = None;
        for t in candidates {
            let Some(col) = self.column(t) else { continue };
            let s = self.score(features, col);
            if best.is_none_or(|(_, b)| s > b) {
                best = Some((t, s));
            }
        }
        best.map(|(t, _)| t)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{}", MAGIC);
        let _ = writeln!(out, "feature_dim\t{}", self.feature_dim);
        let _ = writeln!(out, "averaged\t{}", self.averaged);
        let _ = writeln!(out, "transitions\t{}", self.transitions.len());
        for t in &self.transitions {
            let _ = writeln!(out, "{}", t);
        }
        let rows: Vec<(&u32, &Vec<f32>)> = self
            .weights
            .iter()
            .filter(|(_, w)| w.iter().any(|&x| x != 0.0))
            .collect();
        let _ = writeln!(out, "weights\t{}", rows.len());
        for (feature, w) in rows {
            let _ = write!(out, "{}\t", feature);
            let mut first = true;
            for (col, &x) in w.iter().enumerate() {
                if x == 0.0 {
                    continue;
                }
                if !first {
                    out.push(' ');
                }
                first = false;
                let _ = write!(out, "{}={}", col, x);
            }
            out.push('\n');
        }
        out
    }

    pub fn from_text(text: &str) -> Result<Self, ModelError> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let err = |line: usize, message: &str| ModelError::Format {
            line,
            message: message.to_owned(),
        };
        let mut next = |what: &str| {
            lines
                .next()
                .ok_or_else(|| err(0, &format!("unexpected end of file, expected {}", what)))
        };
        let (n, magic) = next("header")?;
        if magic != MAGIC {
            return Err(err(n, "not an edparse model file"));
        }
        let field = |(n, line): (usize, &str), key: &str| -> Result<String, ModelError> {
            line.strip_prefix(key)
                .and_then(|r| r.strip_prefix('\t'))
                .map(str::to_owned)
                .ok_or_else(|| err(n, &format!("expected `{}`", key)))
        };
        let num = |n: usize, s: &str| -> Result<usize, ModelError> {
            s.parse().map_err(|_| err(n, &format!("bad number `{}`", s)))
        };

        let line = next("feature_dim")?;
        let feature_dim = num(line.0, &field(line, "feature_dim")?)? as u32;
        if feature_dim == 0 {
            return Err(err(line.0, "feature_dim must be positive"));
        }
        let line = next("averaged")?;
        let averaged = match field(line, "averaged")?.as_str() {
            "true" => true,
            "false" => false,
            _ => return Err(err(line.0, "averaged must be true or false")),
        };
        let line = next("transitions")?;
        let count = num(line.0, &field(line, "transitions")?)?;
        let mut transitions = Vec::with_capacity(count);
        for _ in 0..count {
            let (n, l) = next("transition")?;
            transitions.push(l.parse().map_err(|e| err(n, &format!("{}", e)))?);
        }
        let line = next("weights")?;
        let rows = num(line.0, &field(line, "weights")?)?;
        let mut weights = BTreeMap::new();
        for _ in 0..rows {
            let (n, l) = next("weight row")?;
            let (feature, cells) = l
                .split_once('\t')
                .ok_or_else(|| err(n, "expected `feature<TAB>weights`"))?;
            let feature = num(n, feature)? as u32;
            let mut w = vec![0.0f32; count];
            for cell in cells.split(' ').filter(|c| !c.is_empty()) {
                let (col, x) = cell
                    .split_once('=')
                    .ok_or_else(|| err(n, "expected `column=weight`"))?;
                let col = num(n, col)?;
                if col >= count {
                    return Err(err(n, "weight column out of range"));
                }
                w[col] = x.parse().map_err(|_| err(n, &format!("bad weight `{}`", x)))?;
            }
            weights.insert(feature, w);
        }
        if let Some((n, _)) = lines.next() {
            return Err(err(n, "trailing content"));
        }
        Ok(Self::from_parts(feature_dim, averaged, transitions, weights))
    }
}

/// Greedy parsing policy backed by a linear model.
pub struct ModelPolicy<'a> {
    model: &'a LinearModel,
}

impl<'a> ModelPolicy<'a> {
    pub fn new(model: &'a LinearModel) -> Self {
        ModelPolicy { model }
    }
}

impl Policy for ModelPolicy<'_> {
    fn labels(&self) -> &[String] {
        self.model.labels()
    }

    fn choose(
        &mut self,
        _sys: &TransitionSystem,
        config: &crate::transition::Configuration,
        sentence: &Sentence,
        legal: &[Transition],
    ) -> Option<Transition> {
        let features = featurize(config, sentence, self.model.feature_dim);
        self.model.best(&features, legal).cloned()
    }
}

#[derive(Clone, Debug)]
pub struct TrainOptions {
    pub epochs: usize,
    pub seed: u64,
    pub feature_dim: u32,
    pub system: TransitionSystem,
}

impl Default for TrainOptions {
    fn default() -> Self {
        TrainOptions {
            epochs: 10,
            seed: 0,
            feature_dim: DEFAULT_FEATURE_DIM,
            system: TransitionSystem::default(),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct TrainReport {
    /// Fraction of oracle transitions predicted correctly during each epoch,
    /// before the update.
    pub epoch_accuracy: Vec<f64>,
    /// Indices of sentences the oracle cannot derive, with the reason.
    pub dropped: Vec<(usize, String)>,
    pub examples: usize,
}

/// One oracle decision: features, legal columns and the gold column.
struct Example {
    features: FeatureVector,
    legal: Vec<usize>,
    gold: usize,
}

fn collect_examples(
    sentence: &Sentence,
    model: &LinearModel,
    opts: &TrainOptions,
) -> Result<Vec<Example>, String> {
    let sys = &opts.system;
    let gold = sentence.extract_graph().map_err(|e| e.to_string())?;
    let mut state = OracleState::new(gold.clone());
    let mut config = sys
        .initial(sentence.word_count())
        .map_err(|e| e.to_string())?;
    let budget = default_budget(sentence.word_count());
    let mut examples = Vec::new();
    while !config.is_terminal() {
        if examples.len() >= budget {
            return Err(format!("transition budget of {} exhausted", budget));
        }
        let legal = sys.legal_transitions(&config, model.labels());
        let transition = state.next(sys, &config).map_err(|e| e.to_string())?;
        let legal: Vec<usize> = legal.iter().filter_map(|t| model.column(t)).collect();
        let gold_col = model
            .column(&transition)
            .ok_or_else(|| format!("transition {} outside the inventory", transition))?;
        examples.push(Example {
            features: featurize(&config, sentence, model.feature_dim),
            legal,
            gold: gold_col,
        });
        sys.apply_mut(&mut config, &transition)
            .map_err(|e| e.to_string())?;
    }
    if !config.to_graph().equal_modulo_null_ids(&gold) {
        return Err("finished graph differs from gold".into());
    }
    Ok(examples)
}

/// Dense weights and running sums for lazy averaging.
struct Trainer {
    columns: usize,
    weights: HashMap<u32, Vec<f64>>,
    totals: HashMap<u32, Vec<f64>>,
    step: f64,
}

impl Trainer {
    fn score(&self, features: &FeatureVector, col: usize) -> f64 {
        features
            .indices()
            .iter()
            .filter_map(|f| self.weights.get(f))
            .map(|w| w[col])
            .sum()
    }

    fn predict(&self, ex: &Example) -> usize {
        let mut best = (ex.legal[0], f64::NEG_INFINITY);
        for &col in &ex.legal {
            let s = self.score(&ex.features, col);
            if s > best.1 {
                best = (col, s);
            }
        }
        best.0
    }

    fn update(&mut self, features: &FeatureVector, col: usize, delta: f64) {
        for &f in features.indices() {
            let columns = self.columns;
            self.weights.entry(f).or_insert_with(|| vec![0.0; columns])[col] += delta;
            self.totals.entry(f).or_insert_with(|| vec![0.0; columns])[col] += delta * self.step;
        }
    }

    fn averaged(&self) -> BTreeMap<u32, Vec<f32>> {
        self.weights
            .iter()
            .map(|(&f, w)| {
                let totals = &self.totals[&f];
                let avg = w
                    .iter()
                    .zip(totals)
                    .map(|(&w, &t)| (w - t / self.step) as f32)
                    .collect();
                (f, avg)
            })
            .collect()
    }
}

/// Train an averaged perceptron on the oracle decisions of a treebank.
///
/// Sentences the oracle cannot derive are skipped with a warning. Sentence
/// order is shuffled every epoch with a generator seeded from
/// `opts.seed`, so equal options give equal models.
pub fn train(
    treebank: &[Sentence],
    opts: &TrainOptions,
) -> Result<(LinearModel, TrainReport), ModelError> {
    if treebank.is_empty() {
        return Err(ModelError::EmptyTreebank);
    }
    let inventory = super::label_inventory(treebank);
    let template = LinearModel::new(opts.feature_dim, &inventory.labels.keys().cloned().collect());

    let mut report = TrainReport::default();
    let mut data: Vec<Vec<Example>> = Vec::new();
    for (i, sentence) in treebank.iter().enumerate() {
        match collect_examples(sentence, &template, opts) {
            Ok(examples) => data.push(examples),
            Err(reason) => {
                warn!(
                    "dropping sentence {} ({}): {}",
                    i + 1,
                    sentence.sent_id().unwrap_or("no sent_id"),
                    reason
                );
                report.dropped.push((i, reason));
            }
        }
    }
    if data.is_empty() {
        return Err(ModelError::NothingDerivable);
    }
    report.examples = data.iter().map(Vec::len).sum();

    let mut trainer = Trainer {
        columns: template.transitions.len(),
        weights: HashMap::new(),
        totals: HashMap::new(),
        step: 1.0,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut order: Vec<usize> = (0..data.len()).collect();
    for epoch in 0..opts.epochs {
        order.shuffle(&mut rng);
        let mut correct = 0usize;
        for &i in &order {
            for ex in &data[i] {
                let guess = trainer.predict(ex);
                if guess == ex.gold {
                    correct += 1;
                } else {
                    trainer.update(&ex.features, ex.gold, 1.0);
                    trainer.update(&ex.features, guess, -1.0);
                }
                trainer.step += 1.0;
            }
        }
        let accuracy = correct as f64 / report.examples as f64;
        info!("epoch {}: oracle transition accuracy {:.4}", epoch + 1, accuracy);
        report.epoch_accuracy.push(accuracy);
    }

    let model = LinearModel::from_parts(
        opts.feature_dim,
        true,
        template.transitions.clone(),
        trainer.averaged(),
    );
    Ok((model, report))
}

/// Fraction of oracle decisions the model reproduces when following the
/// oracle path. Sentences the oracle cannot derive are skipped.
pub fn oracle_accuracy(model: &LinearModel, treebank: &[Sentence], system: &TransitionSystem) -> f64 {
    let opts = TrainOptions {
        feature_dim: model.feature_dim,
        system: *system,
        ..Default::default()
    };
    let (mut correct, mut total) = (0usize, 0usize);
    for sentence in treebank {
        let Ok(examples) = collect_examples(sentence, model, &opts) else {
            continue;
        };
        for ex in examples {
            let legal: Vec<Transition> = ex.legal.iter().map(|&c| model.transitions[c].clone()).collect();
            if model.best(&ex.features, &legal) == Some(&model.transitions[ex.gold]) {
                correct += 1;
            }
            total += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        correct as f64 / total as f64
    }
}
