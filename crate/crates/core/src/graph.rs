//! Question-document and document-document link lists.
//!
//! For every candidate document `i` two lists run parallel to its tokens:
//! `gq[i][k]` is 1 when token `k` sits in a phrase linked by some KB relation
//! to a question phrase, and `gd[i][k]` names the other document holding the
//! most tokens linked to token `k` (or `None`). Nodes are words: a matched
//! phrase marks each of its token positions.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusStats, QuestionInstance};
use crate::kb::{match_phrases, PhraseMatch, TripleStore};

/// Question-edge pruning threshold for large candidate pools.
pub const DEFAULT_T1: usize = 10;
/// Question-edge pruning threshold for 10-candidate pools.
pub const DEFAULT_T1_SMALL_POOL: usize = 5;
/// Per-document cap on linked tokens.
pub const DEFAULT_T2: usize = 10;
/// Per-document cap for long-document corpora.
pub const DEFAULT_T2_LONG_DOCS: usize = 30;

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct LinkGraphs {
    pub gq: Vec<Vec<u8>>,
    pub gd: Vec<Vec<Option<usize>>>,
}

impl LinkGraphs {
    /// Lists with no links at all, sized for `instance`.
    pub fn empty(instance: &QuestionInstance) -> Self {
        LinkGraphs {
            gq: instance.documents.iter().map(|d| vec![0; d.tokens.len()]).collect(),
            gd: instance.documents.iter().map(|d| vec![None; d.tokens.len()]).collect(),
        }
    }

    pub fn build(
        instance: &QuestionInstance,
        store: &TripleStore,
        stats: &CorpusStats,
        t1: usize,
        t2: usize,
    ) -> Self {
        let phrases = DocPhrases::new(instance, store);
        LinkGraphs {
            gq: gq_from_phrases(instance, store, &phrases, t1),
            gd: gd_from_phrases(instance, store, stats, &phrases, t2),
        }
    }

    pub fn to_record(&self, question_id: &str) -> GraphRecord {
        GraphRecord {
            question_id: question_id.to_string(),
            gq: self.gq.clone(),
            gd: self
                .gd
                .iter()
                .map(|row| row.iter().map(|v| v.map_or(-1, |j| j as i64)).collect())
                .collect(),
        }
    }
}

/// One line of the graph export; `-1` in `gd` encodes "no link".
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphRecord {
    pub question_id: String,
    pub gq: Vec<Vec<u8>>,
    pub gd: Vec<Vec<i64>>,
}

impl GraphRecord {
    pub fn to_graphs(&self) -> LinkGraphs {
        LinkGraphs {
            gq: self.gq.clone(),
            gd: self
                .gd
                .iter()
                .map(|row| row.iter().map(|&v| (v >= 0).then_some(v as usize)).collect())
                .collect(),
        }
    }
}

struct DocPhrases {
    question: Vec<PhraseMatch>,
    docs: Vec<Vec<PhraseMatch>>,
}

impl DocPhrases {
    fn new(instance: &QuestionInstance, store: &TripleStore) -> Self {
        DocPhrases {
            question: match_phrases(&instance.q_tokens, store, None),
            docs: instance
                .documents
                .iter()
                .map(|d| match_phrases(&d.tokens, store, d.phrase_spans.as_deref()))
                .collect(),
        }
    }
}

pub fn build_gq(instance: &QuestionInstance, store: &TripleStore, t1: usize) -> Vec<Vec<u8>> {
    gq_from_phrases(instance, store, &DocPhrases::new(instance, store), t1)
}

pub fn build_gd(
    instance: &QuestionInstance,
    store: &TripleStore,
    stats: &CorpusStats,
    t2: usize,
) -> Vec<Vec<Option<usize>>> {
    gd_from_phrases(instance, store, stats, &DocPhrases::new(instance, store), t2)
}

fn gq_from_phrases(
    instance: &QuestionInstance,
    store: &TripleStore,
    phrases: &DocPhrases,
    t1: usize,
) -> Vec<Vec<u8>> {
    let question: HashSet<&str> = phrases.question.iter().map(|m| m.phrase.as_str()).collect();
    // Question phrases linked to more than t1 documents lose all their edges.
    let kept: Vec<&str> = question
        .into_iter()
        .filter(|qp| {
            let linked_docs = phrases
                .docs
                .iter()
                .filter(|doc| doc.iter().any(|m| store.connected(&m.phrase, qp)))
                .count();
            linked_docs <= t1
        })
        .collect();

    instance
        .documents
        .iter()
        .zip(&phrases.docs)
        .map(|(doc, matches)| {
            let mut row = vec![0u8; doc.tokens.len()];
            for m in matches {
                if kept.iter().any(|qp| store.connected(&m.phrase, qp)) {
                    row[m.start..=m.end].fill(1);
                }
            }
            row
        })
        .collect()
}

fn gd_from_phrases(
    instance: &QuestionInstance,
    store: &TripleStore,
    stats: &CorpusStats,
    phrases: &DocPhrases,
    t2: usize,
) -> Vec<Vec<Option<usize>>> {
    // Token positions covered by each phrase, per document. Matches never
    // overlap, so summing span lengths counts distinct positions.
    let coverage: Vec<HashMap<&str, usize>> = phrases
        .docs
        .iter()
        .map(|matches| {
            let mut cov: HashMap<&str, usize> = HashMap::new();
            for m in matches {
                *cov.entry(m.phrase.as_str()).or_default() += m.end - m.start + 1;
            }
            cov
        })
        .collect();

    let n = instance.documents.len();
    let mut gd = Vec::with_capacity(n);
    for (i, doc) in instance.documents.iter().enumerate() {
        let mut row: Vec<Option<usize>> = vec![None; doc.tokens.len()];
        let mut best_for: BTreeMap<&str, Option<usize>> = BTreeMap::new();
        for m in &phrases.docs[i] {
            let target = *best_for.entry(m.phrase.as_str()).or_insert_with(|| {
                let mut best: Option<(usize, usize)> = None;
                for (j, cov) in coverage.iter().enumerate() {
                    if j == i {
                        continue;
                    }
                    let size: usize = cov
                        .iter()
                        .filter(|(p, _)| store.connected(&m.phrase, p))
                        .map(|(_, c)| c)
                        .sum();
                    if size > 0 && best.map_or(true, |(_, s)| size > s) {
                        best = Some((j, size));
                    }
                }
                best.map(|(j, _)| j)
            });
            if target.is_some() {
                row[m.start..=m.end].fill(target);
            }
        }
        prune_by_idf(&mut row, &doc.tokens, stats, t2);
        gd.push(row);
    }
    gd
}

/// Keeps links at no more than `t2` positions, preferring high-IDF tokens
/// and then earlier positions.
fn prune_by_idf(row: &mut [Option<usize>], tokens: &[String], stats: &CorpusStats, t2: usize) {
    let mut linked: Vec<usize> = (0..row.len()).filter(|&k| row[k].is_some()).collect();
    if linked.len() <= t2 {
        return;
    }
    linked.sort_by(|&a, &b| {
        stats
            .idf(&tokens[b])
            .total_cmp(&stats.idf(&tokens[a]))
            .then(a.cmp(&b))
    });
    for &k in &linked[t2..] {
        row[k] = None;
    }
}
