#![allow(dead_code)]

use std::path::PathBuf;

use edparse::{parse_conllu, NodeId, Sentence};

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests")
        .join("fixtures")
        .join(name)
}

pub fn fixture_text(name: &str) -> String {
    std::fs::read_to_string(fixture_path(name)).expect("fixture is readable")
}

pub fn fixture(name: &str) -> Vec<Sentence> {
    parse_conllu(&fixture_text(name)).expect("fixture parses")
}

pub fn figure1() -> Sentence {
    fixture("figure1.conllu").remove(0)
}

pub fn figure2() -> Sentence {
    fixture("figure2.conllu").remove(0)
}

pub fn synthetic50() -> Vec<Sentence> {
    fixture("synthetic50.conllu")
}

/// Word form of a node, `ROOT` for the root and `NULL` for null nodes.
pub fn form(sentence: &Sentence, node: NodeId) -> String {
    match node {
        NodeId::Root => "ROOT".into(),
        NodeId::Null(..) => "NULL".into(),
        NodeId::Word(i) => sentence.word(i).expect("word exists").form.clone(),
    }
}

/// Figure 2 word ids by position in the sentence (the null sits after
/// word 11).
pub mod fig2 {
    use edparse::NodeId;

    pub const MODERNSTE: NodeId = NodeId::Word(4);
    pub const EN: NodeId = NodeId::Word(5);
    pub const GROOTSTE: NodeId = NodeId::Word(6);
    pub const HAL: NodeId = NodeId::Word(7);
    pub const EN2: NodeId = NodeId::Word(11);
    pub const NULL: NodeId = NodeId::Null(11, 1);
    pub const DE2: NodeId = NodeId::Word(12);
    pub const VOLDOET: NodeId = NodeId::Word(15);
}
