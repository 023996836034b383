//! Knowledge-base triples with a relation blocklist, and phrase matching
//! against the triple vocabulary.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::text::tokenize;

/// Longest token window tried when matching phrases against the vocabulary.
pub const MAX_PHRASE_TOKENS: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub subject: String,
    pub relation: String,
    pub object: String,
}

#[derive(Debug, Clone, Default)]
pub struct TripleStore {
    triples: BTreeSet<Triple>,
    blocklist: HashSet<String>,
    /// Symmetric adjacency: a relation and its reverse both connect.
    neighbors: HashMap<String, HashSet<String>>,
    max_phrase_len: usize,
}

/// Lowercases and re-joins a phrase with single spaces, using the corpus
/// tokenizer so phrases line up with document tokens.
pub fn normalize_phrase(phrase: &str) -> String {
    tokenize(phrase).join(" ")
}

impl TripleStore {
    /// Builds a store; triples with a blocklisted relation are dropped and
    /// duplicates collapse.
    pub fn new(triples: impl IntoIterator<Item = Triple>, blocklist: HashSet<String>) -> Self {
        let mut store = TripleStore {
            blocklist,
            ..Default::default()
        };
        for t in triples {
            store.insert(t);
        }
        store
    }

    fn insert(&mut self, t: Triple) {
        if self.blocklist.contains(&t.relation) || t.subject.is_empty() || t.object.is_empty() {
            return;
        }
        for p in [&t.subject, &t.object] {
            self.max_phrase_len = self.max_phrase_len.max(p.split(' ').count());
        }
        self.neighbors
            .entry(t.subject.clone())
            .or_default()
            .insert(t.object.clone());
        self.neighbors
            .entry(t.object.clone())
            .or_default()
            .insert(t.subject.clone());
        self.triples.insert(t);
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn blocklist(&self) -> &HashSet<String> {
        &self.blocklist
    }

    pub fn in_vocab(&self, phrase: &str) -> bool {
        self.neighbors.contains_key(phrase)
    }

    pub fn vocab(&self) -> impl Iterator<Item = &str> {
        self.neighbors.keys().map(String::as_str)
    }

    pub fn max_phrase_len(&self) -> usize {
        self.max_phrase_len
    }

    /// True iff some relation links the two phrases in either direction.
    pub fn connected(&self, p1: &str, p2: &str) -> bool {
        self.neighbors.get(p1).is_some_and(|n| n.contains(p2))
    }

    pub fn neighbors(&self, phrase: &str) -> Option<&HashSet<String>> {
        self.neighbors.get(phrase)
    }
}

pub fn parse_blocklist(content: &str) -> HashSet<String> {
    content
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .filter(|l| !l.is_empty())
        .map(str::to_string)
        .collect()
}

/// Parses TSV `subject\trelation\tobject` lines. Blank lines are skipped.
pub fn parse_triples(content: &str, path: &Path) -> Result<Vec<Triple>> {
    let mut out = Vec::new();
    for (idx, line) in content.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split('\t').collect();
        if fields.len() != 3 {
            return Err(Error::record(
                path,
                idx + 1,
                format!("expected 3 tab-separated fields, found {}", fields.len()),
            ));
        }
        let subject = normalize_phrase(fields[0]);
        let relation = fields[1].trim().to_string();
        let object = normalize_phrase(fields[2]);
        if subject.is_empty() || relation.is_empty() || object.is_empty() {
            return Err(Error::record(path, idx + 1, "empty triple field"));
        }
        out.push(Triple {
            subject,
            relation,
            object,
        });
    }
    Ok(out)
}

pub fn load_triples(triples_path: impl AsRef<Path>, blocklist_path: Option<&Path>) -> Result<TripleStore> {
    let triples_path = triples_path.as_ref();
    let content = fs::read_to_string(triples_path).map_err(|e| Error::io(triples_path, e))?;
    let blocklist = match blocklist_path {
        Some(p) => parse_blocklist(&fs::read_to_string(p).map_err(|e| Error::io(p, e))?),
        None => HashSet::new(),
    };
    Ok(TripleStore::new(parse_triples(&content, triples_path)?, blocklist))
}

/// A matched phrase occurrence: inclusive token range plus its surface form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhraseMatch {
    pub start: usize,
    pub end: usize,
    pub phrase: String,
}

/// Finds KB phrases in `tokens`. Pre-annotated spans, when given, are used
/// as is (keeping only in-vocabulary ones); otherwise a greedy left-to-right
/// longest match over windows of up to [`MAX_PHRASE_TOKENS`] tokens. The
/// result is sorted and non-overlapping.
pub fn match_phrases(
    tokens: &[String],
    store: &TripleStore,
    pre_annotated: Option<&[(usize, usize)]>,
) -> Vec<PhraseMatch> {
    if let Some(spans) = pre_annotated {
        let mut spans: Vec<(usize, usize)> = spans
            .iter()
            .copied()
            .filter(|&(s, e)| s <= e && e < tokens.len())
            .collect();
        spans.sort_unstable();
        let mut out: Vec<PhraseMatch> = Vec::new();
        for (start, end) in spans {
            if out.last().is_some_and(|m| start <= m.end) {
                continue;
            }
            let phrase = tokens[start..=end].join(" ");
            if store.in_vocab(&phrase) {
                out.push(PhraseMatch { start, end, phrase });
            }
        }
        return out;
    }

    let window = MAX_PHRASE_TOKENS.min(store.max_phrase_len());
    let mut out = Vec::new();
    let mut i = 0;
    while i < tokens.len() {
        let longest = window.min(tokens.len() - i);
        let hit = (1..=longest).rev().find_map(|len| {
            let phrase = tokens[i..i + len].join(" ");
            store.in_vocab(&phrase).then_some((len, phrase))
        });
        match hit {
            Some((len, phrase)) => {
                out.push(PhraseMatch {
                    start: i,
                    end: i + len - 1,
                    phrase,
                });
                i += len;
            }
            None => i += 1,
        }
    }
    out
}
