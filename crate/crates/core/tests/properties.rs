mod common;

use std::collections::{HashSet, VecDeque};

use proptest::prelude::*;
use proptest::sample::Index;

use edparse::eval::{collapse_nulls, score_graphs};
use edparse::graph::null_bijection;
use edparse::oracle::{default_budget, oracle_for_sentence};
use edparse::policy::features::featurize;
use edparse::repair::{repair, validate};
use edparse::synth::synthetic_treebank;
use edparse::{parse_conllu, serialize_conllu, Arc, Configuration, EnhancedGraph, NodeId, Transition, TransitionSystem};

const LABELS: [&str; 3] = ["a", "b", "c"];

/// Raw ingredients of a small graph: word count, nulls per anchor and arc
/// picks resolved against the node list.
fn graph_strategy(max_words: u32, max_nulls: usize) -> impl Strategy<Value = EnhancedGraph> {
    (1..=max_words, proptest::collection::vec(any::<Index>(), 0..=max_nulls))
        .prop_flat_map(|(words, null_anchors)| {
            let arcs = proptest::collection::vec((any::<Index>(), any::<Index>(), 0..LABELS.len()), 0..12);
            (Just(words), Just(null_anchors), arcs)
        })
        .prop_map(|(words, null_anchors, arcs)| {
            let mut g = EnhancedGraph::with_words(words);
            let mut per_anchor = vec![0u32; words as usize + 1];
            for a in null_anchors {
                let anchor = a.index(words as usize + 1);
                per_anchor[anchor] += 1;
                g.add_node(NodeId::Null(anchor as u32, per_anchor[anchor]));
            }
            let nodes: Vec<NodeId> = g.nodes().iter().copied().collect();
            for (h, d, l) in arcs {
                let head = nodes[h.index(nodes.len())];
                let dep = nodes[1 + d.index(nodes.len() - 1)];
                let _ = g.add_arc(Arc::new(head, dep, LABELS[l]));
            }
            g
        })
}

fn rename_nulls(g: &EnhancedGraph, perm: &[NodeId]) -> EnhancedGraph {
    let nulls: Vec<NodeId> = g.null_nodes().collect();
    let rename = |n: NodeId| nulls.iter().position(|&x| x == n).map_or(n, |i| perm[i]);
    let mut out = EnhancedGraph::default();
    for &n in g.nodes() {
        out.add_node(rename(n));
    }
    for a in g.arcs() {
        out.add_arc(Arc::new(rename(a.head), rename(a.dependent), a.label.clone())).unwrap();
    }
    out
}

fn permutations(items: &[NodeId]) -> Vec<Vec<NodeId>> {
    if items.is_empty() {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for i in 0..items.len() {
        let mut rest = items.to_vec();
        let first = rest.remove(i);
        for mut p in permutations(&rest) {
            p.insert(0, first);
            out.push(p);
        }
    }
    out
}

/// Brute force: some renaming of the nulls of `a` onto those of `b` makes
/// the graphs equal.
fn brute_force_equal(a: &EnhancedGraph, b: &EnhancedGraph) -> bool {
    let nulls_b: Vec<NodeId> = b.null_nodes().collect();
    if a.null_nodes().count() != nulls_b.len() {
        return false;
    }
    permutations(&nulls_b).iter().any(|p| rename_nulls(a, p) == *b)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn conllu_round_trip(n in 1usize..20, seed in any::<u64>()) {
        let doc = synthetic_treebank(n, seed);
        let text = serialize_conllu(&doc);
        let back = parse_conllu(&text).unwrap();
        prop_assert_eq!(&back, &doc);
        prop_assert_eq!(serialize_conllu(&back), text);
    }

    #[test]
    fn synthetic_sentences_are_derivable(n in 1usize..10, seed in any::<u64>()) {
        let sys = TransitionSystem::default();
        for s in synthetic_treebank(n, seed) {
            let run = oracle_for_sentence(&sys, &s).unwrap();
            prop_assert!(run.is_derivable(), "{}", s.to_conllu());
        }
    }

    #[test]
    fn null_equality_matches_brute_force(a in graph_strategy(3, 3), b in graph_strategy(3, 3)) {
        prop_assert_eq!(a.equal_modulo_null_ids(&b), brute_force_equal(&a, &b));
        prop_assert!(a.equal_modulo_null_ids(&a));
    }

    #[test]
    fn null_equality_survives_renaming(g in graph_strategy(4, 3), shift in 1u32..4) {
        let nulls: Vec<NodeId> = g.null_nodes().collect();
        let perm: Vec<NodeId> = nulls.iter().rev().map(|n| match *n {
            NodeId::Null(a, s) => NodeId::Null(a, s + shift),
            other => other,
        }).collect();
        let renamed = rename_nulls(&g, &perm);
        prop_assert!(g.equal_modulo_null_ids(&renamed));
        prop_assert!(null_bijection(&renamed, &g).is_some());
        prop_assert_eq!(collapse_nulls(&g), collapse_nulls(&renamed));
    }

    #[test]
    fn reachability_is_monotone(g in graph_strategy(5, 2), extra in (any::<Index>(), any::<Index>())) {
        let before = g.reachable_from(NodeId::Root);
        let nodes: Vec<NodeId> = g.nodes().iter().copied().collect();
        let mut bigger = g.clone();
        let _ = bigger.add_arc(Arc::new(
            nodes[extra.0.index(nodes.len())],
            nodes[1 + extra.1.index(nodes.len() - 1)],
            "extra",
        ));
        prop_assert!(before.is_subset(&bigger.reachable_from(NodeId::Root)));
    }

    #[test]
    fn random_rollouts_terminate(n in 1u32..7, labels in 1usize..4, picks in proptest::collection::vec(any::<Index>(), 400)) {
        let sys = TransitionSystem::default();
        let labels: Vec<String> = LABELS[..labels].iter().map(|l| l.to_string()).collect();
        let mut c = sys.initial(n).unwrap();
        let mut steps = 0;
        while !c.is_terminal() {
            let legal = sys.legal_transitions(&c, &labels);
            prop_assert!(!legal.is_empty(), "dead end after {} steps", steps);
            let t = &legal[picks[steps % picks.len()].index(legal.len())];
            sys.apply_mut(&mut c, t).unwrap();
            steps += 1;
            prop_assert!(steps <= default_budget(n), "rollout exceeded budget");
        }
    }

    #[test]
    fn repair_validates_and_is_idempotent(g in graph_strategy(6, 2)) {
        let (fixed, report) = repair(&g);
        prop_assert!(validate(&fixed).is_empty());
        prop_assert_eq!(report.attached_nodes.is_empty(), validate(&g).is_empty());
        let (again, second) = repair(&fixed);
        prop_assert_eq!(again, fixed);
        prop_assert!(second.is_empty());
    }

    #[test]
    fn repair_ignores_arc_insertion_order(g in graph_strategy(6, 2), seed in any::<u64>()) {
        use rand::seq::SliceRandom;
        use rand::SeedableRng;
        let mut arcs: Vec<Arc> = g.arcs().iter().cloned().collect();
        arcs.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
        let mut shuffled = EnhancedGraph::default();
        for &n in g.nodes() {
            shuffled.add_node(n);
        }
        for a in arcs {
            shuffled.add_arc(a).unwrap();
        }
        prop_assert_eq!(repair(&g), repair(&shuffled));
    }

    #[test]
    fn elas_symmetry(a in graph_strategy(4, 2), b in graph_strategy(4, 2)) {
        let ab = score_graphs(&a, &b);
        let ba = score_graphs(&b, &a);
        prop_assert_eq!(ab.precision(), ba.recall());
        prop_assert_eq!(ab.recall(), ba.precision());
    }

    #[test]
    fn removing_a_correct_item_never_raises_f1(gold in graph_strategy(4, 0), pick in any::<Index>()) {
        prop_assume!(!gold.arcs().is_empty());
        let arcs: Vec<&Arc> = gold.arcs().iter().collect();
        let drop = arcs[pick.index(arcs.len())];
        let mut pred = EnhancedGraph::with_words(gold.word_count() as u32);
        for a in gold.arcs().iter().filter(|a| *a != drop) {
            pred.add_arc(a.clone()).unwrap();
        }
        prop_assert!(score_graphs(&gold, &pred).f1() <= score_graphs(&gold, &gold).f1());
    }
}

fn config_key(c: &Configuration) -> (Vec<NodeId>, Vec<NodeId>, Vec<Arc>, bool) {
    (
        c.stack().to_vec(),
        c.buffer().iter().copied().collect(),
        c.arcs().iter().cloned().collect(),
        c.is_terminal(),
    )
}

/// Breadth-first search over every configuration reachable for `n` words,
/// counting those without a legal transition.
fn dead_ends(n: u32, labels: &[String], limit: usize) -> (usize, usize) {
    let sys = TransitionSystem::default();
    let start = sys.initial(n).unwrap();
    let mut seen = HashSet::from([config_key(&start)]);
    let mut queue = VecDeque::from([start]);
    let mut dead = 0;
    while let Some(c) = queue.pop_front() {
        if c.is_terminal() {
            continue;
        }
        let legal = sys.legal_transitions(&c, labels);
        if legal.is_empty() {
            dead += 1;
        }
        for t in legal {
            let next = sys.apply(&c, &t).unwrap();
            if seen.len() < limit && seen.insert(config_key(&next)) {
                queue.push_back(next);
            }
        }
    }
    (seen.len(), dead)
}

#[test]
fn no_dead_ends_with_a_label() {
    let labels = vec!["a".to_owned()];
    for n in 1..=2 {
        let (states, dead) = dead_ends(n, &labels, 200_000);
        assert!(states > 10);
        assert_eq!(dead, 0, "n = {}", n);
    }
}

#[test]
fn empty_inventory_has_dead_ends() {
    let (_, dead) = dead_ends(1, &[], 10_000);
    assert!(dead > 0);
}

#[test]
fn features_distinguish_figure4_configurations() {
    let s = common::figure2();
    let sys = TransitionSystem::default();
    let run = oracle_for_sentence(&sys, &s).unwrap();
    let mut c = sys.initial(s.word_count()).unwrap();
    let mut seen = HashSet::new();
    let mut configs = 0;
    for t in run.transitions() {
        if t != Transition::Finish {
            configs += 1;
            seen.insert(featurize(&c, &s, 1 << 20));
        }
        sys.apply_mut(&mut c, &t).unwrap();
    }
    assert_eq!(configs, 72);
    assert_eq!(seen.len(), configs);
}
