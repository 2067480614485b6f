//! File and standard stream helpers.

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use edparse::{parse_conllu, Sentence};

fn is_stdio(path: Option<&Path>) -> bool {
    path.is_none_or(|p| p.as_os_str() == "-")
}

pub fn read_text(path: Option<&Path>) -> Result<String> {
    let mut text = String::new();
    if is_stdio(path) {
        io::stdin().read_to_string(&mut text).context("reading standard input")?;
    } else {
        let path = path.expect("checked above");
        BufReader::new(File::open(path).with_context(|| format!("opening {}", path.display()))?)
            .read_to_string(&mut text)
            .with_context(|| format!("reading {}", path.display()))?;
    }
    Ok(text)
}

pub fn read_treebank(path: Option<&Path>) -> Result<Vec<Sentence>> {
    let text = read_text(path)?;
    let name = path.map_or_else(|| "<stdin>".to_owned(), |p| p.display().to_string());
    parse_conllu(&text).with_context(|| format!("parsing {}", name))
}

/// Concatenate treebanks in order; standard input when `paths` is empty.
pub fn read_treebanks(paths: &[PathBuf]) -> Result<Vec<Sentence>> {
    if paths.is_empty() {
        return read_treebank(None);
    }
    let mut doc = Vec::new();
    for path in paths {
        doc.extend(read_treebank(Some(path))?);
    }
    Ok(doc)
}

pub fn writer(path: Option<&Path>) -> Result<Box<dyn Write>> {
    if is_stdio(path) {
        Ok(Box::new(BufWriter::new(io::stdout().lock())))
    } else {
        let path = path.expect("checked above");
        let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
        Ok(Box::new(BufWriter::new(file)))
    }
}

/// `sent_id` of a sentence, or its 1-based position.
pub fn sentence_name(sentence: &Sentence, index: usize) -> String {
    sentence
        .sent_id()
        .map_or_else(|| (index + 1).to_string(), str::to_owned)
}
