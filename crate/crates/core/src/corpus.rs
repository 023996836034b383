//! Question instances, corpus ingestion, golden-document labeling and IDF
//! statistics.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::text::{is_article, normalize_token, normalized_tokens, tokenize};

/// Default cap on question plus candidate-document tokens per instance.
pub const DEFAULT_MAX_TOKENS: usize = 8000;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub doc_id: String,
    pub tokens: Vec<String>,
    /// Inclusive `(start, end)` token ranges of pre-annotated noun phrases.
    pub phrase_spans: Option<Vec<(usize, usize)>>,
}

/// A golden answer location: `(doc_index, start, end)`, inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenSpan {
    pub doc: usize,
    pub start: usize,
    pub end: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionInstance {
    pub question_id: String,
    pub q_tokens: Vec<String>,
    pub documents: Vec<Document>,
    pub gold_answers: Vec<String>,
    pub golden_doc_index: Option<usize>,
    pub golden_span: Option<GoldenSpan>,
}

impl QuestionInstance {
    pub fn total_tokens(&self) -> usize {
        self.q_tokens.len() + self.documents.iter().map(|d| d.tokens.len()).sum::<usize>()
    }

    pub fn span_text(&self, doc: usize, start: usize, end: usize) -> String {
        self.documents[doc].tokens[start..=end].join(" ")
    }
}

#[derive(Debug, Deserialize)]
struct RawDocument {
    doc_id: String,
    text: String,
    #[serde(default)]
    noun_phrases: Option<Vec<(usize, usize)>>,
}

#[derive(Debug, Deserialize)]
struct RawRecord {
    question_id: String,
    question: String,
    documents: Vec<RawDocument>,
    answers: Vec<String>,
    #[serde(default)]
    golden_doc_index: Option<usize>,
}

#[derive(Debug, Clone, Default)]
pub struct IngestReport {
    pub instances: Vec<QuestionInstance>,
    /// Records dropped for exceeding the token cap.
    pub dropped: usize,
}

/// Reads a line-delimited JSON corpus. Blank lines are skipped; the first
/// malformed record aborts with its line number.
pub fn ingest(path: impl AsRef<Path>, max_tokens: usize) -> Result<IngestReport> {
    let path = path.as_ref();
    if max_tokens == 0 {
        return Err(Error::InvalidArgument("max_tokens must be positive".into()));
    }
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut report = IngestReport::default();
    for (idx, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let lineno = idx + 1;
        let instance = parse_record(line).map_err(|msg| Error::record(path, lineno, msg))?;
        if instance.total_tokens() > max_tokens {
            report.dropped += 1;
        } else {
            report.instances.push(instance);
        }
    }
    Ok(report)
}

fn parse_record(line: &str) -> std::result::Result<QuestionInstance, String> {
    let raw: RawRecord = serde_json::from_str(line).map_err(|e| e.to_string())?;
    if raw.documents.is_empty() {
        return Err("record has no candidate documents".into());
    }
    let mut seen = HashSet::new();
    let mut documents = Vec::with_capacity(raw.documents.len());
    for doc in raw.documents {
        if !seen.insert(doc.doc_id.clone()) {
            return Err(format!("duplicate doc_id {:?}", doc.doc_id));
        }
        let tokens = tokenize(&doc.text);
        if tokens.is_empty() {
            return Err(format!("document {:?} has no tokens", doc.doc_id));
        }
        if let Some(spans) = &doc.noun_phrases {
            if let Some(&(s, e)) = spans.iter().find(|&&(s, e)| s > e || e >= tokens.len()) {
                return Err(format!(
                    "document {:?}: noun phrase ({s}, {e}) outside {} tokens",
                    doc.doc_id,
                    tokens.len()
                ));
            }
        }
        documents.push(Document {
            doc_id: doc.doc_id,
            tokens,
            phrase_spans: doc.noun_phrases,
        });
    }
    if let Some(g) = raw.golden_doc_index {
        if g >= documents.len() {
            return Err(format!(
                "golden_doc_index {g} out of range for {} documents",
                documents.len()
            ));
        }
    }
    let mut instance = QuestionInstance {
        question_id: raw.question_id,
        q_tokens: tokenize(&raw.question),
        documents,
        gold_answers: raw.answers,
        golden_doc_index: raw.golden_doc_index,
        golden_span: None,
    };
    if let Some(g) = instance.golden_doc_index {
        instance.golden_span = find_answer_span(&instance.documents[g].tokens, &instance.gold_answers)
            .map(|(start, end)| GoldenSpan { doc: g, start, end });
    }
    Ok(instance)
}

/// Earliest span in `tokens` whose normalized text equals one of the
/// normalized answers. Article tokens inside a span are skipped while
/// matching, so the returned span text is an exact match under EM.
pub fn find_answer_span(tokens: &[String], answers: &[String]) -> Option<(usize, usize)> {
    let norm: Vec<String> = tokens.iter().map(|t| normalize_token(t)).collect();
    let golds: Vec<Vec<String>> = answers
        .iter()
        .map(|a| normalized_tokens(a))
        .filter(|g| !g.is_empty())
        .collect();
    let mut best: Option<(usize, usize)> = None;
    for gold in &golds {
        if let Some(span) = first_match(&norm, gold) {
            if best.map_or(true, |b| span < b) {
                best = Some(span);
            }
        }
    }
    best
}

fn first_match(norm: &[String], gold: &[String]) -> Option<(usize, usize)> {
    'start: for start in 0..norm.len() {
        if norm[start] != gold[0] {
            continue;
        }
        let mut pos = start;
        for want in &gold[1..] {
            pos += 1;
            while pos < norm.len() && (is_article(&norm[pos]) || norm[pos].is_empty()) {
                pos += 1;
            }
            if pos >= norm.len() || &norm[pos] != want {
                continue 'start;
            }
        }
        return Some((start, pos));
    }
    None
}

/// Marks the first document (in candidate order) that contains a gold
/// answer, along with the matching span. Both are cleared when nothing
/// matches.
pub fn label_golden(mut instance: QuestionInstance) -> QuestionInstance {
    instance.golden_doc_index = None;
    instance.golden_span = None;
    for (i, doc) in instance.documents.iter().enumerate() {
        if let Some((start, end)) = find_answer_span(&doc.tokens, &instance.gold_answers) {
            instance.golden_doc_index = Some(i);
            instance.golden_span = Some(GoldenSpan { doc: i, start, end });
            break;
        }
    }
    instance
}

/// Labels instances that arrived without a golden document; keeps a
/// file-provided index as is.
pub fn ensure_labels(instances: Vec<QuestionInstance>) -> Vec<QuestionInstance> {
    instances
        .into_iter()
        .map(|inst| {
            if inst.golden_doc_index.is_some() || inst.gold_answers.is_empty() {
                inst
            } else {
                label_golden(inst)
            }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorpusStats {
    pub idf: HashMap<String, f64>,
    pub doc_count: usize,
}

impl CorpusStats {
    /// IDF of `token`; unseen tokens get the smoothing floor 1.0.
    pub fn idf(&self, token: &str) -> f64 {
        self.idf.get(token).copied().unwrap_or(1.0)
    }
}

/// Smoothed IDF over every candidate document of every instance:
/// `ln((1 + N) / (1 + df)) + 1`.
pub fn compute_idf(instances: &[QuestionInstance]) -> CorpusStats {
    let mut df: HashMap<&str, usize> = HashMap::new();
    let mut doc_count = 0usize;
    for doc in instances.iter().flat_map(|i| &i.documents) {
        doc_count += 1;
        let unique: HashSet<&str> = doc.tokens.iter().map(String::as_str).collect();
        for t in unique {
            *df.entry(t).or_default() += 1;
        }
    }
    let n = doc_count as f64;
    let idf = df
        .into_iter()
        .map(|(t, c)| (t.to_string(), ((1.0 + n) / (1.0 + c as f64)).ln() + 1.0))
        .collect();
    CorpusStats { idf, doc_count }
}
