//! Transition-based parsing of enhanced Universal Dependencies graphs.
//!
//! The crate covers CoNLL-U input and output ([`conllu`]), the graph model
//! ([`graph`]), the transition system ([`transition`]), a static oracle
//! ([`oracle`]), connectivity repair ([`repair`]), parsing policies
//! ([`policy`]), ELAS evaluation ([`eval`]) and a synthetic treebank
//! generator ([`synth`]).

pub mod conllu;
pub mod error;
pub mod eval;
pub mod graph;
pub mod id;
pub mod oracle;
pub mod policy;
pub mod repair;
pub mod synth;
pub mod transition;

pub use conllu::{parse_conllu, read_conllu, serialize_conllu, write_conllu, Sentence, TokenRow};
pub use error::{ConlluError, EvalError, GraphError, ModelError, TransitionError};
pub use eval::{elas, elas_sentence, Evaluation, Score};
pub use graph::{Arc, EnhancedGraph};
pub use id::NodeId;
pub use oracle::{oracle_sequence, OracleRun};
pub use policy::{parse, LinearModel, ParseOutput, Policy};
pub use repair::{repair, validate, RepairReport};
pub use transition::{Configuration, ConstraintParams, Transition, TransitionSystem};
