mod common;

use std::collections::BTreeSet;

use edparse::eval::{collapse_nulls, elas, Item};
use edparse::oracle::{format_trace, oracle_for_sentence, parse_trace, replay, OracleState};
use edparse::policy::{copy_tree_baseline, label_inventory, parse, OraclePolicy};
use edparse::repair::{repair, validate};
use edparse::{parse_conllu, serialize_conllu, Arc, EnhancedGraph, NodeId, Transition, TransitionSystem};

use common::fig2::*;
use common::{figure1, figure2, fixture_text, synthetic50};

fn w(i: u32) -> NodeId {
    NodeId::Word(i)
}

#[test]
fn fixtures_round_trip_byte_identically() {
    for name in ["figure1.conllu", "figure2.conllu", "synthetic50.conllu"] {
        let text = fixture_text(name);
        let doc = parse_conllu(&text).unwrap();
        assert_eq!(serialize_conllu(&doc), text, "{}", name);
    }
}

#[test]
fn figure1_graph() {
    let s = figure1();
    let g = s.extract_graph().unwrap();
    assert_eq!(g.word_count(), 8);
    assert_eq!(g.arcs().len(), 10);
    let heads: BTreeSet<(NodeId, String)> = [(3, "nsubj:pass"), (5, "nsubj:xsubj"), (7, "nsubj:xsubj")]
        .into_iter()
        .map(|(h, l)| (w(h), l.to_owned()))
        .collect();
    assert_eq!(g.heads_of(w(1)).unwrap(), heads);
    assert_eq!(g.reachable_from(NodeId::Root), (1..=8).map(w).collect());
    let (fixed, report) = repair(&g);
    assert_eq!(fixed, g);
    assert!(report.is_empty());
}

#[test]
fn figure2_graph() {
    let s = figure2();
    let g = s.extract_graph().unwrap();
    assert_eq!(g.word_count(), 20);
    assert_eq!(g.null_nodes().collect::<Vec<_>>(), vec![NULL]);
    assert_eq!(g.arcs().len(), 23);
    assert!(g.contains_arc(NULL, VOLDOET, "acl:relcl"));
    assert!(g.contains_arc(VOLDOET, NULL, "nsubj:relsubj"));
    assert!(g.contains_arc(MODERNSTE, GROOTSTE, "conj:en"));
    assert!(g.contains_arc(HAL, GROOTSTE, "nmod"));
    let deps = g.dependents_of(NULL).unwrap();
    for (d, l) in [(EN2, "cc"), (DE2, "det"), (VOLDOET, "acl:relcl")] {
        assert!(deps.contains(&(d, l.to_owned())), "{} {}", d, l);
    }
    assert!(validate(&g).is_empty());
}

#[test]
fn figure2_equality_modulo_null_ids() {
    let g = figure2().extract_graph().unwrap();
    let renamed_id = NodeId::Null(12, 1);
    let rename = |n: NodeId| if n == NULL { renamed_id } else { n };
    let mut renamed = EnhancedGraph::with_words(20);
    renamed.add_node(renamed_id);
    for a in g.arcs() {
        renamed.add_arc(Arc::new(rename(a.head), rename(a.dependent), a.label.clone())).unwrap();
    }
    assert!(g.equal_modulo_null_ids(&renamed));
    assert_ne!(g, renamed);

    let mut missing = EnhancedGraph::with_words(20);
    missing.add_node(NULL);
    for a in g.arcs().iter().filter(|a| !(a.head == NULL && a.dependent == EN2)) {
        missing.add_arc(a.clone()).unwrap();
    }
    assert!(!g.equal_modulo_null_ids(&missing));
}

#[test]
fn figure2_label_inventory() {
    let inv = label_inventory(&[figure2()]);
    let labels: Vec<&str> = inv.labels.keys().map(String::as_str).collect();
    assert_eq!(
        labels,
        vec![
            "acl:relcl", "amod", "case", "cc", "conj:en", "cop", "det", "nmod", "nmod:van", "nsubj",
            "nsubj:relsubj", "obl:aan", "punct", "ref", "root"
        ]
    );
    assert_eq!(inv.transition_count(), 21);
    assert_eq!(inv.edge_transition_count(), 30);
}

#[test]
fn figure2_collapsed_items() {
    let g = figure2().extract_graph().unwrap();
    let items = collapse_nulls(&g);
    assert_eq!(items.values().sum::<usize>(), 26);
    assert!(items.contains_key(&Item {
        head: HAL,
        dependent: Some(EN2),
        label: "conj:en>cc".into(),
    }));
    // The cycle through the null contributes a path back to voldoet itself.
    assert!(items.contains_key(&Item {
        head: VOLDOET,
        dependent: Some(VOLDOET),
        label: "nsubj:relsubj>acl:relcl".into(),
    }));
}

#[test]
fn copy_tree_baseline_on_figures() {
    let fig1 = vec![figure1()];
    let pred = vec![copy_tree_baseline(&fig1[0]).unwrap()];
    let score = elas(&fig1, &pred).unwrap().total;
    assert_eq!((score.correct, score.predicted, score.gold), (8, 8, 10));
    assert_eq!(score.recall(), 0.8);
    assert_eq!(score.precision(), 1.0);

    // The arcs added below the sentence in Figure 2 are the null's arcs and
    // hal -> grootste; copying the tree yields none of them.
    let pred = copy_tree_baseline(&figure2()).unwrap().extract_graph().unwrap();
    assert_eq!(pred.null_nodes().count(), 0);
    assert!(!pred.contains_arc(HAL, GROOTSTE, "nmod"));
}

#[test]
fn elas_identity_on_fixtures() {
    for doc in [vec![figure1()], vec![figure2()], synthetic50()] {
        let eval = elas(&doc, &doc).unwrap();
        assert_eq!(eval.total.to_string(), "ELAS_P=100.00\nELAS_R=100.00\nELAS_F1=100.00");
        assert!(eval.per_label.values().all(|s| s.f1() == 1.0));
    }
}

#[test]
fn oracle_policy_parses_figure2() {
    let s = figure2();
    let gold = s.extract_graph().unwrap();
    let sys = TransitionSystem::default();
    let out = parse(&sys, &s, &mut OraclePolicy::new(gold.clone()), 1000).unwrap();
    assert!(out.report.is_empty());
    assert!(out.graph.equal_modulo_null_ids(&gold));
    // The placeholder is created while hal is on top of the stack.
    assert_eq!(out.graph.null_nodes().collect::<Vec<_>>(), vec![NodeId::Null(7, 1)]);
    let injected = s.inject_graph(&out.graph).unwrap();
    assert!(injected.extract_graph().unwrap().equal_modulo_null_ids(&gold));
}

#[test]
fn figure4_intermediate_configurations() {
    let s = figure2();
    let sys = TransitionSystem::default();
    let run = oracle_for_sentence(&sys, &s).unwrap();
    let ts = run.transitions();

    // Step 7: en and grootste on top, the cc arc is still missing.
    let c = replay(&sys, 20, &ts[..6]).unwrap();
    assert_eq!(c.stack_item(1), Some(EN));
    assert_eq!(c.stack_item(0), Some(GROOTSTE));
    let mut state = OracleState::new(s.extract_graph().unwrap());
    let mut replayed = sys.initial(20).unwrap();
    for t in &ts[..6] {
        assert_eq!(&state.next(&sys, &replayed).unwrap(), t);
        sys.apply_mut(&mut replayed, t).unwrap();
    }
    assert_eq!(state.next(&sys, &replayed).unwrap(), Transition::LeftEdge("cc".into()));

    // Step 12: Node puts the null at the front of the buffer.
    let before = replay(&sys, 20, &ts[..11]).unwrap();
    assert_eq!(before.stack_item(0), Some(HAL));
    assert_eq!(before.buffer_item(0), Some(w(8)));
    let after = replay(&sys, 20, &ts[..12]).unwrap();
    assert_eq!(after.buffer_item(0), Some(NodeId::Null(7, 1)));
    assert_eq!(after.buffer_item(1), Some(w(8)));
}

#[test]
fn figure2_trace_round_trip() {
    let s = figure2();
    let run = oracle_for_sentence(&TransitionSystem::default(), &s).unwrap();
    let text = format_trace(s.sent_id().unwrap(), &run.transitions());
    assert!(text.starts_with("# sent_id = wiki-3745.p.38.s.5\n1\tSHIFT\n"));
    assert!(text.ends_with("73\tFINISH\n\n"));
    let blocks = parse_trace(&text).unwrap();
    assert_eq!(blocks.len(), 1);
    assert_eq!(blocks[0].transitions, run.transitions());
}

#[test]
fn sentence_without_words_is_rejected() {
    let err = parse_conllu("0.1\tx\t_\t_\t_\t_\t_\t_\t_\t_\n\n").unwrap_err();
    assert!(err.to_string().contains("no words"), "{}", err);
}
