//! Exhaustive reference implementations, written against raw triple lists
//! and token positions rather than the engine's indexes.

use kgqa::corpus::{CorpusStats, QuestionInstance};
use kgqa::kb::{match_phrases, PhraseMatch, Triple, TripleStore};

fn linked(triples: &[Triple], a: &str, b: &str) -> bool {
    triples
        .iter()
        .any(|t| (t.subject == a && t.object == b) || (t.subject == b && t.object == a))
}

fn phrase_at(matches: &[PhraseMatch], k: usize) -> Option<&str> {
    matches
        .iter()
        .find(|m| m.start <= k && k <= m.end)
        .map(|m| m.phrase.as_str())
}

/// Counts, for every (document i, token k, document j), the token positions
/// of D_j linked to token k, then takes the argmax j (lowest j on ties) and
/// applies the IDF-ranked cap.
pub fn gd_oracle(
    instance: &QuestionInstance,
    triples: &[Triple],
    store: &TripleStore,
    stats: &CorpusStats,
    t2: usize,
) -> Vec<Vec<Option<usize>>> {
    let matches: Vec<Vec<PhraseMatch>> = instance
        .documents
        .iter()
        .map(|d| match_phrases(&d.tokens, store, d.phrase_spans.as_deref()))
        .collect();
    let n = instance.documents.len();
    let mut out = Vec::new();
    for i in 0..n {
        let len = instance.documents[i].tokens.len();
        let mut row = vec![None; len];
        for k in 0..len {
            let Some(p) = phrase_at(&matches[i], k) else { continue };
            let mut counts = vec![0usize; n];
            for j in 0..n {
                if j == i {
                    continue;
                }
                for l in 0..instance.documents[j].tokens.len() {
                    if let Some(pl) = phrase_at(&matches[j], l) {
                        if linked(triples, p, pl) {
                            counts[j] += 1;
                        }
                    }
                }
            }
            let max = *counts.iter().max().unwrap();
            if max > 0 {
                row[k] = counts.iter().position(|&c| c == max);
            }
        }
        let mut kept: Vec<usize> = (0..len).filter(|&k| row[k].is_some()).collect();
        let tokens = &instance.documents[i].tokens;
        kept.sort_by(|&a, &b| {
            stats
                .idf(&tokens[b])
                .partial_cmp(&stats.idf(&tokens[a]))
                .unwrap()
                .then(a.cmp(&b))
        });
        for &k in kept.iter().skip(t2) {
            row[k] = None;
        }
        out.push(row);
    }
    out
}

/// Every valid `(l, m)` pair scanned in order; keeps the first maximum.
pub fn span_oracle(
    p_start: &[f64],
    p_end: &[f64],
    max_len: usize,
    allow_single: bool,
) -> Option<(usize, usize, f64)> {
    let n = p_start.len();
    let mut pairs = Vec::new();
    for l in 0..n {
        for m in 0..n {
            let ok = if allow_single { l <= m } else { l < m };
            if ok && m - l < max_len {
                pairs.push((l, m, p_start[l] * p_end[m]));
            }
        }
    }
    let best = pairs.iter().map(|p| p.2).fold(f64::NEG_INFINITY, f64::max);
    pairs.into_iter().find(|p| p.2 == best)
}

/// Every document whose tokens contain a gold answer, found by scanning all
/// windows and comparing normalized text.
pub fn all_golden_docs(instance: &QuestionInstance) -> Vec<usize> {
    let golds: Vec<String> = instance
        .gold_answers
        .iter()
        .map(|g| kgqa::text::normalize_answer(g))
        .filter(|g| !g.is_empty())
        .collect();
    (0..instance.documents.len())
        .filter(|&i| {
            let t = &instance.documents[i].tokens;
            (0..t.len()).any(|s| {
                (s..t.len()).any(|e| {
                    // Windows must start on the first gold token, not an article.
                    let text = kgqa::text::normalize_answer(&t[s..=e].join(" "));
                    !kgqa::text::is_article(&t[s]) && golds.contains(&text)
                })
            })
        })
        .collect()
}
