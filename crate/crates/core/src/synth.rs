//! Seeded toy-grammar treebank with basic trees and enhanced graphs.
//!
//! Sentences cover the main enhanced constructions: control (a subject with
//! two heads), verb coordination with a shared subject, relative clauses
//! (a two-cycle plus a `ref` arc), gapping (a null node standing in for the
//! elided verb) and case-suffixed modifier labels.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conllu::{EnhancedArcRef, RowId, Sentence, TokenRow};
use crate::id::NodeId;

const NOUNS: &[&str] = &["dog", "cat", "child", "farmer", "teacher", "bird", "student", "car", "house", "book"];
const VERBS: &[&str] = &["saw", "chased", "liked", "found", "helped", "watched", "took", "sold"];
const CONTROL: &[&str] = &["tried", "wanted", "hoped", "decided"];
const INFINITIVES: &[&str] = &["see", "find", "help", "buy", "read", "visit"];
const DETS: &[&str] = &["the", "a", "every", "this"];
const ADJS: &[&str] = &["old", "small", "red", "happy", "quiet"];
const ADPS: &[&str] = &["in", "near", "with", "behind"];
const CONJS: &[&str] = &["and", "or"];

struct Word {
    form: String,
    upos: &'static str,
    head: u32,
    deprel: String,
}

#[derive(Default)]
struct Builder {
    words: Vec<Word>,
    enhanced: Vec<(NodeId, NodeId, String)>,
    /// Anchor and form of the null node, if any.
    null: Option<(u32, String)>,
}

impl Builder {
    fn word(&mut self, form: &str, upos: &'static str) -> u32 {
        self.words.push(Word {
            form: form.to_owned(),
            upos,
            head: 0,
            deprel: String::new(),
        });
        self.words.len() as u32
    }

    fn basic(&mut self, dep: u32, head: u32, rel: &str) {
        let w = &mut self.words[dep as usize - 1];
        w.head = head;
        w.deprel = rel.to_owned();
    }

    fn enhanced(&mut self, head: NodeId, dep: NodeId, label: &str) {
        self.enhanced.push((head, dep, label.to_owned()));
    }

    /// Same arc in both layers, with an enhanced label.
    fn both(&mut self, dep: u32, head: u32, rel: &str, label: &str) {
        self.basic(dep, head, rel);
        let head = if head == 0 { NodeId::Root } else { NodeId::Word(head) };
        self.enhanced(head, NodeId::Word(dep), label);
    }

    fn tree(&mut self, dep: u32, head: u32, rel: &str) {
        self.both(dep, head, rel, rel);
    }

    fn sentence(self, index: usize) -> Sentence {
        let text: Vec<&str> = self.words.iter().map(|w| w.form.as_str()).collect();
        let comments = vec![
            format!("# sent_id = synth-{}", index + 1),
            format!("# text = {}", text.join(" ")),
        ];
        let deps_of = |node: NodeId| -> Vec<EnhancedArcRef> {
            self.enhanced
                .iter()
                .filter(|(_, d, _)| *d == node)
                .map(|(h, _, l)| EnhancedArcRef::new(*h, l.clone()))
                .collect()
        };
        let mut rows = Vec::new();
        for (i, w) in self.words.iter().enumerate() {
            let id = NodeId::Word(i as u32 + 1);
            rows.push(TokenRow {
                lemma: w.form.clone(),
                form: w.form.clone(),
                upos: w.upos.to_owned(),
                head: Some(if w.head == 0 { NodeId::Root } else { NodeId::Word(w.head) }),
                deprel: w.deprel.clone(),
                deps: deps_of(id),
                ..TokenRow::blank(RowId::Node(id))
            });
            if let Some((anchor, form)) = &self.null {
                if *anchor == i as u32 + 1 {
                    let null = NodeId::Null(*anchor, 1);
                    rows.push(TokenRow {
                        form: form.clone(),
                        lemma: form.clone(),
                        upos: "VERB".into(),
                        deps: deps_of(null),
                        ..TokenRow::blank(RowId::Node(null))
                    });
                }
            }
        }
        Sentence::new(comments, rows).expect("generated sentences are well formed")
    }
}

struct Generator {
    rng: ChaCha8Rng,
}

impl Generator {
    fn pick(&mut self, items: &[&'static str]) -> &'static str {
        items.choose(&mut self.rng).expect("non-empty vocabulary")
    }

    fn chance(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    /// Noun phrase; returns the head noun. `rich` allows modifiers.
    fn noun_phrase(&mut self, b: &mut Builder, rich: bool) -> u32 {
        let det = b.word(self.pick(DETS), "DET");
        let adj = (rich && self.chance(0.3)).then(|| b.word(self.pick(ADJS), "ADJ"));
        let noun = b.word(self.pick(NOUNS), "NOUN");
        b.tree(det, noun, "det");
        if let Some(adj) = adj {
            b.tree(adj, noun, "amod");
        }
        if rich && self.chance(0.25) {
            let adp = self.pick(ADPS);
            let case = b.word(adp, "ADP");
            let inner = self.noun_phrase(b, false);
            b.tree(case, inner, "case");
            b.both(inner, noun, "nmod", &format!("nmod:{}", adp));
        }
        if rich && self.chance(0.2) {
            // Relative clause: the verb takes the noun as subject, closing a
            // cycle with the acl:relcl arc; the pronoun is a ref of the noun.
            let pron = b.word("that", "PRON");
            let verb = b.word(self.pick(VERBS), "VERB");
            let obj = self.noun_phrase(b, false);
            b.basic(pron, verb, "nsubj");
            b.enhanced(NodeId::Word(noun), NodeId::Word(pron), "ref");
            b.enhanced(NodeId::Word(verb), NodeId::Word(noun), "nsubj");
            b.tree(verb, noun, "acl:relcl");
            b.tree(obj, verb, "obj");
        }
        noun
    }

    fn oblique(&mut self, b: &mut Builder, verb: u32) {
        if self.chance(0.25) {
            let adp = self.pick(ADPS);
            let case = b.word(adp, "ADP");
            let noun = self.noun_phrase(b, false);
            b.tree(case, noun, "case");
            b.both(noun, verb, "obl", &format!("obl:{}", adp));
        }
    }

    fn sentence(&mut self, index: usize) -> Sentence {
        let mut b = Builder::default();
        let subj = self.noun_phrase(&mut b, true);
        let main;
        match self.rng.gen_range(0..4) {
            0 => {
                main = b.word(self.pick(VERBS), "VERB");
                b.tree(subj, main, "nsubj");
                let obj = self.noun_phrase(&mut b, true);
                b.tree(obj, main, "obj");
                self.oblique(&mut b, main);
            }
            1 => {
                main = b.word(self.pick(CONTROL), "VERB");
                let to = b.word("to", "PART");
                let inf = b.word(self.pick(INFINITIVES), "VERB");
                let obj = self.noun_phrase(&mut b, true);
                b.tree(subj, main, "nsubj");
                b.tree(to, inf, "mark");
                b.tree(inf, main, "xcomp");
                b.tree(obj, inf, "obj");
                b.enhanced(NodeId::Word(inf), NodeId::Word(subj), "nsubj:xsubj");
            }
            2 => {
                main = b.word(self.pick(VERBS), "VERB");
                let obj1 = self.noun_phrase(&mut b, false);
                let conj = self.pick(CONJS);
                let cc = b.word(conj, "CCONJ");
                let second = b.word(self.pick(VERBS), "VERB");
                let obj2 = self.noun_phrase(&mut b, false);
                b.tree(subj, main, "nsubj");
                b.tree(obj1, main, "obj");
                b.tree(cc, second, "cc");
                b.both(second, main, "conj", &format!("conj:{}", conj));
                b.enhanced(NodeId::Word(second), NodeId::Word(subj), "nsubj");
                b.tree(obj2, second, "obj");
            }
            _ => {
                // Gapping: "A saw B and C D"; the elided verb becomes a null
                // node after the second subject.
                let verb = self.pick(VERBS);
                main = b.word(verb, "VERB");
                let obj1 = self.noun_phrase(&mut b, false);
                let conj = self.pick(CONJS);
                let cc = b.word(conj, "CCONJ");
                let subj2 = self.noun_phrase(&mut b, false);
                let anchor = b.words.len() as u32;
                let obj2 = self.noun_phrase(&mut b, false);
                let null = NodeId::Null(anchor, 1);
                b.null = Some((anchor, verb.to_owned()));
                b.tree(subj, main, "nsubj");
                b.tree(obj1, main, "obj");
                b.basic(cc, subj2, "cc");
                b.basic(subj2, main, "conj");
                b.basic(obj2, subj2, "orphan");
                b.enhanced(NodeId::Word(main), null, &format!("conj:{}", conj));
                b.enhanced(null, NodeId::Word(cc), "cc");
                b.enhanced(null, NodeId::Word(subj2), "nsubj");
                b.enhanced(null, NodeId::Word(obj2), "obj");
            }
        }
        let punct = b.word(".", "PUNCT");
        b.tree(punct, main, "punct");
        b.tree(main, 0, "root");
        b.sentence(index)
    }
}

/// `n` sentences generated from `seed`; equal arguments give equal output.
pub fn synthetic_treebank(n: usize, seed: u64) -> Vec<Sentence> {
    let mut generator = Generator {
        rng: ChaCha8Rng::seed_from_u64(seed),
    };
    (0..n).map(|i| generator.sentence(i)).collect()
}
