use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

/// Identifier of a graph node, mirroring the CoNLL-U ID column.
///
/// `Root` is index 0, `Word(i)` is token `i` and `Null(a, s)` is the empty
/// node `a.s`. Nodes are ordered as they appear in a CoNLL-U sentence:
/// `Root < Word(1) < Null(1, 1) < Null(1, 2) < Word(2) < ...`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum NodeId {
    Root,
    Word(u32),
    Null(u32, u32),
}

impl NodeId {
    fn sort_key(self) -> (u32, u32) {
        match self {
            NodeId::Root => (0, 0),
            NodeId::Word(i) => (i, 0),
            NodeId::Null(a, s) => (a, s),
        }
    }

    pub fn is_root(self) -> bool {
        self == NodeId::Root
    }

    pub fn is_null(self) -> bool {
        matches!(self, NodeId::Null(..))
    }

    pub fn is_word(self) -> bool {
        matches!(self, NodeId::Word(_))
    }

    /// The word index a node is positioned after: 0 for the root, `i` for a
    /// word and `a` for an empty node `a.s`.
    pub fn anchor(self) -> u32 {
        self.sort_key().0
    }
}

impl Ord for NodeId {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

impl PartialOrd for NodeId {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Root => write!(f, "0"),
            NodeId::Word(i) => write!(f, "{}", i),
            NodeId::Null(a, s) => write!(f, "{}.{}", a, s),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseIdError(pub String);

impl fmt::Display for ParseIdError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "malformed node id `{}`", self.0)
    }
}

impl std::error::Error for ParseIdError {}

fn parse_index(s: &str) -> Option<u32> {
    if s.is_empty() || !s.bytes().all(|b| b.is_ascii_digit()) || (s.len() > 1 && s.starts_with('0')) {
        return None;
    }
    s.parse().ok()
}

impl FromStr for NodeId {
    type Err = ParseIdError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseIdError(s.to_owned());
        match s.split_once('.') {
            Some((anchor, sub)) => {
                let anchor = parse_index(anchor).ok_or_else(err)?;
                let sub = parse_index(sub).ok_or_else(err)?;
                if sub == 0 {
                    return Err(err());
                }
                Ok(NodeId::Null(anchor, sub))
            }
            None => match parse_index(s).ok_or_else(err)? {
                0 => Ok(NodeId::Root),
                i => Ok(NodeId::Word(i)),
            },
        }
    }
}
