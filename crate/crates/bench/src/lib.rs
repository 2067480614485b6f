//! Shared inputs for the benchmarks.

use edparse::policy::{train, TrainOptions};
use edparse::synth::synthetic_treebank;
use edparse::{parse_conllu, LinearModel, Sentence};

const FIGURE2: &str = include_str!("../../core/tests/fixtures/figure2.conllu");

/// The 20-word sentence with one null node used throughout the tests.
pub fn figure2() -> Sentence {
    parse_conllu(FIGURE2).expect("fixture parses").remove(0)
}

/// A fixed synthetic treebank.
pub fn treebank(sentences: usize) -> Vec<Sentence> {
    synthetic_treebank(sentences, 2020)
}

/// A small model trained on `treebank(200)`.
pub fn small_model() -> LinearModel {
    let opts = TrainOptions {
        epochs: 3,
        feature_dim: 1 << 16,
        ..TrainOptions::default()
    };
    train(&treebank(200), &opts).expect("synthetic data trains").0
}
