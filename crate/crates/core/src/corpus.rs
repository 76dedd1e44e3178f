//! Raw text ingestion: tokenization, sentence splitting and candidate
//! instance extraction.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use log::warn;

use crate::embeddings::EmbeddingStore;
use crate::error::{Error, Result};
use crate::ontology::Ontology;

const ABBREVIATIONS: &[&str] = &["v", "no", "inc", "co", "mr", "mrs", "dr", "st"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CorpusConfig {
    pub min_count: usize,
    pub lowercase: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            min_count: 5,
            lowercase: true,
        }
    }
}

/// The unlabeled instance pool extracted from a corpus.
#[derive(Clone, Debug, PartialEq)]
pub struct InstanceCorpus {
    pub documents: Vec<String>,
    pub frequencies: BTreeMap<String, usize>,
    /// Ordered by descending frequency, then lexicographically.
    pub candidates: Vec<String>,
}

fn is_joiner(c: char) -> bool {
    matches!(c, '-' | '\'' | '\u{2019}')
}

/// Lowercased tokens: maximal runs of letters and digits, where a hyphen or
/// apostrophe is kept only between two alphanumerics.
pub fn tokenize(text: &str) -> Vec<String> {
    tokenize_with(text, true)
}

pub fn tokenize_with(text: &str, lowercase: bool) -> Vec<String> {
    let chars: Vec<char> = text.chars().collect();
    let mut tokens = Vec::new();
    let mut current = String::new();
    for (i, &c) in chars.iter().enumerate() {
        let joins = is_joiner(c)
            && !current.is_empty()
            && chars.get(i + 1).is_some_and(|n| n.is_alphanumeric());
        if c.is_alphanumeric() || joins {
            current.push(c);
        } else if !current.is_empty() {
            tokens.push(std::mem::take(&mut current));
        }
    }
    if !current.is_empty() {
        tokens.push(current);
    }
    if lowercase {
        for t in &mut tokens {
            *t = t.to_lowercase();
        }
    }
    tokens
}

/// Splits at `.`, `!` or `?` followed by whitespace and an uppercase
/// letter. A period after a single letter or a known abbreviation does not
/// end a sentence.
pub fn split_sentences(text: &str) -> Vec<String> {
    let chars: Vec<(usize, char)> = text.char_indices().collect();
    let mut sentences = Vec::new();
    let mut start = 0;
    for (k, &(offset, c)) in chars.iter().enumerate() {
        if !matches!(c, '.' | '!' | '?') {
            continue;
        }
        let mut next = k + 1;
        while next < chars.len() && chars[next].1.is_whitespace() {
            next += 1;
        }
        if next == k + 1 || next >= chars.len() || !chars[next].1.is_uppercase() {
            continue;
        }
        if c == '.' && is_abbreviation(&text[start..offset]) {
            continue;
        }
        let end = offset + c.len_utf8();
        push_trimmed(&mut sentences, &text[start..end]);
        start = chars[next].0;
    }
    push_trimmed(&mut sentences, &text[start..]);
    sentences
}

fn is_abbreviation(before: &str) -> bool {
    let word: String = before
        .chars()
        .rev()
        .take_while(|c| c.is_alphanumeric())
        .collect::<Vec<_>>()
        .into_iter()
        .rev()
        .collect();
    let lower = word.to_lowercase();
    word.chars().count() == 1 || ABBREVIATIONS.contains(&lower.as_str())
}

fn push_trimmed(out: &mut Vec<String>, s: &str) {
    let s = s.trim();
    if !s.is_empty() {
        out.push(s.to_string());
    }
}

/// Reads every `.txt` file in `dir`, sorted by file name, as
/// `(document id, text)` pairs.
pub fn read_corpus_dir(dir: impl AsRef<Path>) -> Result<Vec<(String, String)>> {
    let dir = dir.as_ref();
    let mut paths = Vec::new();
    for entry in fs::read_dir(dir).map_err(|e| Error::io(dir, e))? {
        let path = entry.map_err(|e| Error::io(dir, e))?.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "txt") {
            paths.push(path);
        }
    }
    paths.sort();
    paths
        .into_iter()
        .map(|path| {
            let text = fs::read_to_string(&path).map_err(|e| Error::io(&path, e))?;
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((id, text))
        })
        .collect()
}

/// Counts tokens over all documents and keeps those that occur at least
/// `min_count` times, are in the embedding vocabulary and are not a seed
/// of any class.
pub fn extract_candidates<'a, I>(
    documents: I,
    store: &EmbeddingStore,
    ontology: &Ontology,
    config: CorpusConfig,
) -> Result<InstanceCorpus>
where
    I: IntoIterator<Item = (&'a str, &'a str)>,
{
    if config.min_count == 0 {
        return Err(Error::InvalidArgument(
            "min_count must be at least 1".into(),
        ));
    }
    let mut ids = Vec::new();
    let mut counts: HashMap<String, usize> = HashMap::new();
    for (id, text) in documents {
        ids.push(id.to_string());
        for token in tokenize_with(text, config.lowercase) {
            *counts.entry(token).or_default() += 1;
        }
    }
    if counts.is_empty() {
        warn!("corpus is empty; no candidates extracted");
    }
    let seeds = ontology.all_seeds();
    let mut candidates: Vec<(&String, usize)> = counts
        .iter()
        .filter(|(token, &n)| {
            n >= config.min_count && store.contains(token) && !seeds.contains(*token)
        })
        .map(|(t, &n)| (t, n))
        .collect();
    candidates.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(b.0)));
    let candidates = candidates.into_iter().map(|(t, _)| t.clone()).collect();
    Ok(InstanceCorpus {
        documents: ids,
        frequencies: counts.into_iter().collect(),
        candidates,
    })
}
