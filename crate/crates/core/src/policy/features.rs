//! Sparse hashed features over parser configurations.

use std::fmt::Write as _;

use crate::conllu::Sentence;
use crate::id::NodeId;
use crate::transition::Configuration;

pub const DEFAULT_FEATURE_DIM: u32 = 1 << 20;

const NONE: &str = "<NONE>";
const ROOT: &str = "<ROOT>";
const NULL: &str = "<NULL>";

/// Sorted, deduplicated hashed feature indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FeatureVector(pub Vec<u32>);

impl FeatureVector {
    pub fn indices(&self) -> &[u32] {
        &self.0
    }
}

/// 64-bit FNV-1a.
pub fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0100_0000_01b3);
    }
    hash
}

fn token(sentence: &Sentence, node: Option<NodeId>) -> (&str, &str) {
    match node {
        None => (NONE, NONE),
        Some(NodeId::Root) => (ROOT, ROOT),
        Some(NodeId::Null(..)) => (NULL, NULL),
        Some(NodeId::Word(i)) => match sentence.word(i) {
            Some(row) => (row.form.as_str(), row.upos.as_str()),
            None => (NONE, NONE),
        },
    }
}

fn bucket(n: usize) -> &'static str {
    match n {
        0 => "0",
        1 => "1",
        2 => "2",
        3..=5 => "3-5",
        6..=10 => "6-10",
        _ => "11+",
    }
}

/// Feature strings before hashing. Each starts with a template name so equal
/// values from different templates stay distinct.
pub fn feature_strings(c: &Configuration, sentence: &Sentence) -> Vec<String> {
    let s0 = c.stack_item(0);
    let s1 = c.stack_item(1);
    let s2 = c.stack_item(2);
    let b0 = c.buffer_item(0);
    let b1 = c.buffer_item(1);
    let (s0f, s0p) = token(sentence, s0);
    let (s1f, s1p) = token(sentence, s1);
    let (s2f, s2p) = token(sentence, s2);
    let (b0f, b0p) = token(sentence, b0);
    let (b1f, b1p) = token(sentence, b1);
    let flag = |n: Option<NodeId>| if n.is_some_and(NodeId::is_null) { '1' } else { '0' };
    let heads = |n: Option<NodeId>| n.map(|n| c.head_count(n).min(3)).unwrap_or(0);
    let (h0, h1) = (heads(s0), heads(s1));

    let mut f = vec![
        "bias".to_owned(),
        format!("s0f={}", s0f),
        format!("s0p={}", s0p),
        format!("s1f={}", s1f),
        format!("s1p={}", s1p),
        format!("s2f={}", s2f),
        format!("s2p={}", s2p),
        format!("b0f={}", b0f),
        format!("b0p={}", b0p),
        format!("b1f={}", b1f),
        format!("b1p={}", b1p),
        format!("s0p,s1p={},{}", s0p, s1p),
        format!("s0f,s1f={},{}", s0f, s1f),
        format!("s0f,s1p={},{}", s0f, s1p),
        format!("s0p,s1f={},{}", s0p, s1f),
        format!("s0p,b0p={},{}", s0p, b0p),
        format!("s0f,b0f={},{}", s0f, b0f),
        format!("s1p,s0p,b0p={},{},{}", s1p, s0p, b0p),
        format!("s2p,s1p,s0p={},{},{}", s2p, s1p, s0p),
        format!("null={}{}{}", flag(s0), flag(s1), flag(b0)),
        format!("h0={}", h0),
        format!("h1={}", h1),
        format!("h0,h1,s0p,s1p={},{},{},{}", h0, h1, s0p, s1p),
        format!("h0,h1,s0f,s1f={},{},{},{}", h0, h1, s0f, s1f),
        format!("blen={}", bucket(c.buffer().len())),
        format!("slen={}", bucket(c.stack().len())),
    ];

    let ratio = f64::from(c.null_count()) / f64::from(c.word_count().max(1));
    f.push(format!("nullratio={}", (ratio * 10.0).floor().min(10.0) as u32));

    if let (Some(s1), Some(s0)) = (s1, s0) {
        let ordered = c.gen_order(s1) < c.gen_order(s0);
        f.push(format!("ordered={},{},{}", ordered, s0p, s1p));
        let distance = s0.anchor().abs_diff(s1.anchor()) as usize;
        f.push(format!("dist={},{},{}", bucket(distance), s0p, s1p));

        let mut left = String::new();
        for l in c.labels_between(s0, s1) {
            let _ = write!(left, "{}|", l);
            f.push(format!("l01={}", l));
        }
        let mut right = String::new();
        for l in c.labels_between(s1, s0) {
            let _ = write!(right, "{}|", l);
            f.push(format!("l10={}", l));
        }
        f.push(format!("arcs01,10={},{},{},{}", left, right, s0p, s1p));
        f.push(format!("arcs01,10,forms={},{},{},{}", left, right, s0f, s1f));
    }
    f
}

pub fn featurize(c: &Configuration, sentence: &Sentence, dim: u32) -> FeatureVector {
    let mut indices: Vec<u32> = feature_strings(c, sentence)
        .iter()
        .map(|s| (fnv1a(s.as_bytes()) % u64::from(dim)) as u32)
        .collect();
    indices.sort_unstable();
    indices.dedup();
    FeatureVector(indices)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conllu::parse_conllu;
    use crate::transition::{Transition, TransitionSystem};

    fn sentence() -> Sentence {
        parse_conllu(
            "1\tthe\t_\tDET\t_\t_\t2\tdet\t2:det\t_\n\
2\tdog\t_\tNOUN\t_\t_\t0\troot\t0:root\t_\n",
        )
        .unwrap()
        .remove(0)
    }

    #[test]
    fn fnv_reference_values() {
        // Published FNV-1a 64 test vectors.
        assert_eq!(fnv1a(b""), 0xcbf29ce484222325);
        assert_eq!(fnv1a(b"a"), 0xaf63dc4c8601ec8c);
        assert_eq!(fnv1a(b"foobar"), 0x85944171f73967e8);
    }

    #[test]
    fn sentinels_in_initial_configuration() {
        let s = sentence();
        let c = TransitionSystem::default().initial(2).unwrap();
        let f = feature_strings(&c, &s);
        assert!(f.contains(&"s1f=<NONE>".to_owned()));
        assert!(f.contains(&"s2p=<NONE>".to_owned()));
        assert!(f.contains(&"s0f=<ROOT>".to_owned()));
        assert!(f.contains(&"b0f=the".to_owned()));
        assert!(f.contains(&"b1f=dog".to_owned()));
    }

    #[test]
    fn null_ratio_changes_features() {
        let s = sentence();
        let sys = TransitionSystem::default();
        let c = sys.initial(2).unwrap();
        let with_null = sys.apply(&c, &Transition::Node).unwrap();
        let a = feature_strings(&c, &s);
        let b = feature_strings(&with_null, &s);
        assert!(a.contains(&"nullratio=0".to_owned()));
        assert!(b.contains(&"nullratio=5".to_owned()));
        assert_ne!(
            featurize(&c, &s, DEFAULT_FEATURE_DIM),
            featurize(&with_null, &s, DEFAULT_FEATURE_DIM)
        );
    }

    #[test]
    fn featurize_is_deterministic() {
        let s = sentence();
        let c = TransitionSystem::default().initial(2).unwrap();
        assert_eq!(
            featurize(&c, &s, DEFAULT_FEATURE_DIM),
            featurize(&c, &s, DEFAULT_FEATURE_DIM)
        );
        assert!(featurize(&c, &s, 16).indices().iter().all(|&i| i < 16));
    }
}
