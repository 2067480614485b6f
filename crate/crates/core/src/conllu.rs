//! CoNLL-U reading and writing with enhanced dependencies.
//!
//! Rows keep their columns verbatim so that a document re-serializes
//! byte-identically, with one exception: DEPS entries are normalized to
//! ascending head order (ties broken by label).

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::io::{self, BufRead, Write};

use crate::error::{ConlluError, GraphError};
use crate::graph::{Arc, EnhancedGraph};
use crate::id::NodeId;

const EMPTY: &str = "_";

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RowId {
    Node(NodeId),
    /// A multiword token range `start-end`.
    Range(u32, u32),
}

impl std::fmt::Display for RowId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RowId::Node(n) => n.fmt(f),
            RowId::Range(s, e) => write!(f, "{}-{}", s, e),
        }
    }
}

/// One DEPS entry: the head and the (unsplit) relation label.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EnhancedArcRef {
    pub head: NodeId,
    pub label: String,
}

impl EnhancedArcRef {
    pub fn new(head: NodeId, label: impl Into<String>) -> Self {
        EnhancedArcRef {
            head,
            label: label.into(),
        }
    }
}

impl std::fmt::Display for EnhancedArcRef {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}", self.head, self.label)
    }
}

/// Parse a DEPS entry. The id ends at the first colon, so `12.1:conj:en` is
/// head `12.1` with label `conj:en`.
pub fn parse_deps_entry(entry: &str) -> Result<EnhancedArcRef, String> {
    let (head, label) = entry
        .split_once(':')
        .ok_or_else(|| format!("DEPS entry `{}` lacks a label", entry))?;
    let head = head.parse::<NodeId>().map_err(|e| e.to_string())?;
    if label.is_empty() {
        return Err(format!("DEPS entry `{}` has an empty label", entry));
    }
    Ok(EnhancedArcRef::new(head, label))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TokenRow {
    pub id: RowId,
    pub form: String,
    pub lemma: String,
    pub upos: String,
    pub xpos: String,
    pub feats: String,
    pub head: Option<NodeId>,
    pub deprel: String,
    pub deps: Vec<EnhancedArcRef>,
    pub misc: String,
}

impl TokenRow {
    /// A row with every column except the id set to `_`.
    pub fn blank(id: RowId) -> Self {
        TokenRow {
            id,
            form: EMPTY.into(),
            lemma: EMPTY.into(),
            upos: EMPTY.into(),
            xpos: EMPTY.into(),
            feats: EMPTY.into(),
            head: None,
            deprel: EMPTY.into(),
            deps: Vec::new(),
            misc: EMPTY.into(),
        }
    }

    pub fn node(&self) -> Option<NodeId> {
        match self.id {
            RowId::Node(n) => Some(n),
            RowId::Range(..) => None,
        }
    }

    fn parse(line: &str, lineno: usize) -> Result<Self, ConlluError> {
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 10 {
            return Err(ConlluError::parse(
                lineno,
                format!("expected 10 columns, found {}", cols.len()),
            ));
        }
        let err = |m: String| ConlluError::parse(lineno, m);

        let id = match cols[0].split_once('-') {
            Some((s, e)) => {
                let (s, e) = match (s.parse::<NodeId>(), e.parse::<NodeId>()) {
                    (Ok(NodeId::Word(s)), Ok(NodeId::Word(e))) if s < e => (s, e),
                    _ => return Err(err(format!("malformed range id `{}`", cols[0]))),
                };
                RowId::Range(s, e)
            }
            None => match cols[0].parse::<NodeId>() {
                Ok(NodeId::Root) => return Err(err("row id 0 is reserved for the root".into())),
                Ok(n) => RowId::Node(n),
                Err(e) => return Err(err(e.to_string())),
            },
        };

        let head = match cols[6] {
            EMPTY => None,
            h => match h.parse::<NodeId>() {
                Ok(n) if !n.is_null() => Some(n),
                _ => return Err(err(format!("malformed HEAD `{}`", h))),
            },
        };

        let mut deps = Vec::new();
        if cols[8] != EMPTY {
            for entry in cols[8].split('|') {
                deps.push(parse_deps_entry(entry).map_err(err)?);
            }
        }
        deps.sort();

        Ok(TokenRow {
            id,
            form: cols[1].into(),
            lemma: cols[2].into(),
            upos: cols[3].into(),
            xpos: cols[4].into(),
            feats: cols[5].into(),
            head,
            deprel: cols[7].into(),
            deps,
            misc: cols[9].into(),
        })
    }

    fn write_to(&self, out: &mut String) {
        let head = self.head.map(|h| h.to_string());
        let deps = if self.deps.is_empty() {
            EMPTY.to_owned()
        } else {
            let mut deps = self.deps.clone();
            deps.sort();
            deps.iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>()
                .join("|")
        };
        let _ = writeln!(
            out,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.id,
            self.form,
            self.lemma,
            self.upos,
            self.xpos,
            self.feats,
            head.as_deref().unwrap_or(EMPTY),
            self.deprel,
            deps,
            self.misc
        );
    }
}

/// A sentence: metadata comment lines followed by token rows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sentence {
    comments: Vec<String>,
    rows: Vec<TokenRow>,
    /// Row index of word `i` at position `i - 1`.
    words: Vec<usize>,
}

impl Sentence {
    /// Build a sentence, checking id consecutiveness and that every HEAD and
    /// DEPS reference points at a node of the sentence.
    pub fn new(comments: Vec<String>, rows: Vec<TokenRow>) -> Result<Self, ConlluError> {
        let lines: Vec<usize> = (1..=rows.len()).collect();
        Self::validated(comments, rows, &lines)
    }

    fn validated(
        comments: Vec<String>,
        mut rows: Vec<TokenRow>,
        lines: &[usize],
    ) -> Result<Self, ConlluError> {
        if rows.is_empty() {
            return Err(ConlluError::parse(
                lines.first().copied().unwrap_or(0),
                "sentence has no token rows",
            ));
        }
        let mut words = Vec::new();
        let mut last_null: Option<NodeId> = None;
        let mut pending_range: Option<u32> = None;
        for (idx, row) in rows.iter_mut().enumerate() {
            let line = lines[idx];
            let current = words.len() as u32;
            match row.id {
                RowId::Range(s, _) => {
                    if s != current + 1 {
                        return Err(ConlluError::parse(
                            line,
                            format!("range {} does not start at the next word {}", row.id, current + 1),
                        ));
                    }
                    if row.head.is_some() || row.deprel != EMPTY || !row.deps.is_empty() {
                        return Err(ConlluError::parse(
                            line,
                            "multiword token rows must have `_` in HEAD, DEPREL and DEPS",
                        ));
                    }
                    pending_range = Some(s);
                }
                RowId::Node(NodeId::Word(i)) => {
                    if i != current + 1 {
                        return Err(ConlluError::parse(
                            line,
                            format!("word id {} follows word {}", i, current),
                        ));
                    }
                    words.push(idx);
                    last_null = None;
                    pending_range = None;
                }
                RowId::Node(NodeId::Null(a, s)) => {
                    let expected = match last_null {
                        Some(NodeId::Null(_, prev)) => prev + 1,
                        _ => 1,
                    };
                    if a != current || s != expected || pending_range.is_some() {
                        return Err(ConlluError::parse(
                            line,
                            format!("empty node {} out of sequence", row.id),
                        ));
                    }
                    if row.head.is_some() || row.deprel != EMPTY {
                        return Err(ConlluError::parse(
                            line,
                            "empty nodes must have `_` in HEAD and DEPREL",
                        ));
                    }
                    last_null = Some(NodeId::Null(a, s));
                }
                RowId::Node(NodeId::Root) => {
                    return Err(ConlluError::parse(line, "row id 0 is reserved for the root"))
                }
            }
            row.deps.sort();
        }
        if pending_range.is_some() {
            return Err(ConlluError::parse(
                *lines.last().unwrap(),
                "multiword token range is not followed by its words",
            ));
        }

        if words.is_empty() {
            return Err(ConlluError::parse(lines[0], "sentence has no words"));
        }

        let sentence = Sentence {
            comments,
            rows,
            words,
        };
        let nodes = sentence.node_set();
        for (idx, row) in sentence.rows.iter().enumerate() {
            if let Some(h) = row.head {
                if !nodes.contains(&h) {
                    return Err(ConlluError::parse(
                        lines[idx],
                        format!("HEAD {} does not exist", h),
                    ));
                }
            }
            if let Some(RowId::Range(_, e)) = Some(row.id) {
                if e as usize > sentence.words.len() {
                    return Err(ConlluError::parse(
                        lines[idx],
                        format!("range {} extends past the last word", row.id),
                    ));
                }
            }
            for dep in &row.deps {
                if !nodes.contains(&dep.head) {
                    return Err(ConlluError::parse(
                        lines[idx],
                        format!("DEPS references nonexistent node {}", dep.head),
                    ));
                }
            }
        }
        Ok(sentence)
    }

    pub fn comments(&self) -> &[String] {
        &self.comments
    }

    pub fn rows(&self) -> &[TokenRow] {
        &self.rows
    }

    /// The value of the `# sent_id = ...` comment, if present.
    pub fn sent_id(&self) -> Option<&str> {
        self.comments.iter().find_map(|c| {
            let rest = c.strip_prefix('#')?.trim_start();
            let value = rest.strip_prefix("sent_id")?.trim_start().strip_prefix('=')?;
            Some(value.trim())
        })
    }

    pub fn word_count(&self) -> u32 {
        self.words.len() as u32
    }

    /// Row of word `i` (1-based).
    pub fn word(&self, i: u32) -> Option<&TokenRow> {
        let idx = (i as usize).checked_sub(1)?;
        self.words.get(idx).map(|&r| &self.rows[r])
    }

    pub fn row(&self, node: NodeId) -> Option<&TokenRow> {
        match node {
            NodeId::Root => None,
            NodeId::Word(i) => self.word(i),
            NodeId::Null(..) => self.rows.iter().find(|r| r.node() == Some(node)),
        }
    }

    /// Root, words and empty nodes.
    pub fn node_set(&self) -> BTreeSet<NodeId> {
        std::iter::once(NodeId::Root)
            .chain(self.rows.iter().filter_map(TokenRow::node))
            .collect()
    }

    /// The enhanced graph encoded in the DEPS column.
    pub fn extract_graph(&self) -> Result<EnhancedGraph, GraphError> {
        let mut graph = EnhancedGraph::default();
        for node in self.node_set() {
            graph.add_node(node);
        }
        for row in &self.rows {
            let Some(dependent) = row.node() else { continue };
            for dep in &row.deps {
                graph.add_arc(Arc::new(dep.head, dependent, dep.label.clone()))?;
            }
        }
        Ok(graph)
    }

    /// Replace the DEPS column (and the empty-node rows) with the content of
    /// `graph`.
    ///
    /// Null nodes of the graph are renumbered consecutively per anchor in id
    /// order, which leaves already consecutive ids untouched. Empty-node rows
    /// whose id survives keep their other columns; new ones are blank.
    pub fn inject_graph(&self, graph: &EnhancedGraph) -> Result<Sentence, ConlluError> {
        let len = self.words.len();
        for node in graph.nodes() {
            let word = match *node {
                NodeId::Word(i) => i,
                NodeId::Null(a, _) => a,
                NodeId::Root => continue,
            };
            if word as usize > len {
                return Err(ConlluError::WordOutOfRange { word, len });
            }
        }

        let mut renamed: BTreeMap<NodeId, NodeId> = BTreeMap::new();
        let mut per_anchor: BTreeMap<u32, u32> = BTreeMap::new();
        for null in graph.null_nodes() {
            let sub = per_anchor.entry(null.anchor()).or_insert(0);
            *sub += 1;
            renamed.insert(null, NodeId::Null(null.anchor(), *sub));
        }
        let rename = |n: NodeId| renamed.get(&n).copied().unwrap_or(n);

        let mut deps: BTreeMap<NodeId, Vec<EnhancedArcRef>> = BTreeMap::new();
        for arc in graph.arcs() {
            deps.entry(rename(arc.dependent))
                .or_default()
                .push(EnhancedArcRef::new(rename(arc.head), arc.label.clone()));
        }

        let mut nulls_by_anchor: BTreeMap<u32, Vec<TokenRow>> = BTreeMap::new();
        for (&old, &new) in &renamed {
            let mut row = self
                .row(old)
                .cloned()
                .unwrap_or_else(|| TokenRow::blank(RowId::Node(new)));
            row.id = RowId::Node(new);
            row.head = None;
            row.deprel = EMPTY.into();
            nulls_by_anchor.entry(new.anchor()).or_default().push(row);
        }

        let mut rows = Vec::with_capacity(self.rows.len() + renamed.len());
        rows.extend(nulls_by_anchor.remove(&0).unwrap_or_default());
        for row in &self.rows {
            match row.id {
                RowId::Node(NodeId::Null(..)) => continue,
                RowId::Node(NodeId::Word(i)) => {
                    rows.push(row.clone());
                    rows.extend(nulls_by_anchor.remove(&i).unwrap_or_default());
                }
                _ => rows.push(row.clone()),
            }
        }
        for row in &mut rows {
            if let Some(node) = row.node() {
                let mut d = deps.remove(&node).unwrap_or_default();
                d.sort();
                row.deps = d;
            }
        }
        Sentence::new(self.comments.clone(), rows)
    }

    pub fn to_conllu(&self) -> String {
        let mut out = String::new();
        self.write_to(&mut out);
        out
    }

    fn write_to(&self, out: &mut String) {
        for comment in &self.comments {
            out.push_str(comment);
            out.push('\n');
        }
        for row in &self.rows {
            row.write_to(out);
        }
        out.push('\n');
    }
}

/// Parse a whole CoNLL-U document.
pub fn parse_conllu(input: &str) -> Result<Vec<Sentence>, ConlluError> {
    let mut doc = Vec::new();
    let mut comments = Vec::new();
    let mut rows = Vec::new();
    let mut lines = Vec::new();
    let mut start = 0;

    let mut flush = |comments: &mut Vec<String>,
                     rows: &mut Vec<TokenRow>,
                     lines: &mut Vec<usize>,
                     start: usize|
     -> Result<(), ConlluError> {
        if comments.is_empty() && rows.is_empty() {
            return Ok(());
        }
        if rows.is_empty() {
            lines.push(start);
        }
        let sentence =
            Sentence::validated(std::mem::take(comments), std::mem::take(rows), lines)?;
        lines.clear();
        doc.push(sentence);
        Ok(())
    };

    for (idx, line) in input.split('\n').enumerate() {
        let lineno = idx + 1;
        if line.is_empty() {
            flush(&mut comments, &mut rows, &mut lines, start)?;
            continue;
        }
        if comments.is_empty() && rows.is_empty() {
            start = lineno;
        }
        if line.starts_with('#') {
            if !rows.is_empty() {
                return Err(ConlluError::parse(lineno, "comment line inside token rows"));
            }
            comments.push(line.to_owned());
        } else {
            rows.push(TokenRow::parse(line, lineno)?);
            lines.push(lineno);
        }
    }
    flush(&mut comments, &mut rows, &mut lines, start)?;
    Ok(doc)
}

pub fn read_conllu<R: BufRead>(mut reader: R) -> Result<Vec<Sentence>, ConlluError> {
    let mut input = String::new();
    reader.read_to_string(&mut input)?;
    parse_conllu(&input)
}

pub fn serialize_conllu(doc: &[Sentence]) -> String {
    let mut out = String::new();
    for sentence in doc {
        sentence.write_to(&mut out);
    }
    out
}

pub fn write_conllu<W: Write>(mut writer: W, doc: &[Sentence]) -> io::Result<()> {
    writer.write_all(serialize_conllu(doc).as_bytes())
}
