use thiserror::Error;

use crate::id::NodeId;
use crate::transition::{Transition, Violation};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("the root cannot be a dependent ({0} -> 0)")]
    RootAsDependent(NodeId),
    #[error("duplicate arc ({0}, {1}, {2})")]
    DuplicateArc(NodeId, NodeId, String),
    #[error("empty arc label ({0} -> {1})")]
    EmptyLabel(NodeId, NodeId),
}

#[derive(Debug, Error)]
pub enum ConlluError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("sentence {sentence}: {source}")]
    Graph {
        sentence: usize,
        #[source]
        source: GraphError,
    },
    #[error("graph references word {word} but the sentence has {len} words")]
    WordOutOfRange { word: u32, len: usize },
    #[error("word {0} has no HEAD")]
    MissingHead(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl ConlluError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        ConlluError::Parse {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TransitionError {
    #[error("a sentence needs at least one word")]
    EmptySentence,
    #[error("{transition} is not applicable: {violation}")]
    Illegal {
        transition: Transition,
        violation: Violation,
    },
    #[error("forced finish requires a non-terminal configuration without legal transitions")]
    ForcedFinishNotAllowed,
    #[error("malformed transition `{0}`")]
    Malformed(String),
}

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot train on an empty treebank")]
    EmptyTreebank,
    #[error("no sentence in the treebank is derivable by the oracle")]
    NothingDerivable,
    #[error("model file line {line}: {message}")]
    Format { line: usize, message: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EvalError {
    #[error("gold has {gold} sentences but prediction has {pred}")]
    SentenceCount { gold: usize, pred: usize },
    #[error("sentence {sentence}: tokenization differs between gold and prediction")]
    Tokenization { sentence: usize },
    #[error("sentence {sentence}: {source}")]
    Graph {
        sentence: usize,
        #[source]
        source: GraphError,
    },
}
