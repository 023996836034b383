//! The answer-scoring boundary.
//!
//! A scorer supplies, for every (question, document) pair, start/end
//! distributions over the document tokens, two per-token weight vectors
//! (`alpha` from a shallow encoder layer for retrieval, `beta` from a deep
//! layer for reranking), the chosen span, and two rerank confidences: one
//! over the whole span and one restricted to question-linked span tokens.
//!
//! Two implementations ship here. [`LexicalScorer`] is a deterministic
//! stand-in driven by question overlap and IDF. [`FileScorer`] reads the
//! line-delimited protocol written by an external neural reader.

use std::collections::{HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusStats, QuestionInstance};
use crate::error::{Error, Result};
use crate::graph::LinkGraphs;

/// Tolerance on the unit-sum of probability and weight vectors.
pub const SUM_TOLERANCE: f64 = 1e-6;
pub const DEFAULT_MAX_SPAN_LEN: usize = 10;
/// Affinity multiplier for document tokens absent from the question.
const OFF_QUESTION_DAMPING: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct ScorerOutput {
    pub p_start: Vec<f64>,
    pub p_end: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    /// Inclusive `(l, m)` answer span.
    pub span: (usize, usize),
    pub s2: f64,
    pub s3: f64,
    pub s3_qmasked: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScorerKind {
    Lexical,
    File,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScorerConfig {
    pub kind: ScorerKind,
    pub file_path: Option<PathBuf>,
    pub max_span_len: usize,
    /// `false` restricts spans to `l < m`.
    pub allow_single_token: bool,
}

impl Default for ScorerConfig {
    fn default() -> Self {
        ScorerConfig {
            kind: ScorerKind::Lexical,
            file_path: None,
            max_span_len: DEFAULT_MAX_SPAN_LEN,
            allow_single_token: true,
        }
    }
}

impl ScorerConfig {
    pub fn validate(&self) -> Result<()> {
        match (self.kind, &self.file_path) {
            (ScorerKind::File, None) => {
                return Err(Error::InvalidArgument("file scorer requires a scorer path".into()))
            }
            (ScorerKind::Lexical, Some(_)) => {
                return Err(Error::InvalidArgument(
                    "scorer path given but scorer kind is lexical".into(),
                ))
            }
            _ => {}
        }
        if self.max_span_len == 0 {
            return Err(Error::InvalidArgument("max_span_len must be at least 1".into()));
        }
        Ok(())
    }
}

/// Picks the span maximizing `p_start[l] · p_end[m]` among `l <= m` (or
/// `l < m`) with at most `max_span_len` tokens. Ties go to the smaller `l`,
/// then the smaller `m`.
pub fn select_span(
    p_start: &[f64],
    p_end: &[f64],
    max_span_len: usize,
    allow_single_token: bool,
) -> Result<(usize, usize, f64)> {
    let n = p_start.len();
    if n == 0 || p_end.len() != n {
        return Err(Error::InvalidArgument(format!(
            "span distributions must be non-empty and equal length ({} vs {})",
            p_start.len(),
            p_end.len()
        )));
    }
    if max_span_len == 0 {
        return Err(Error::InvalidArgument("max_span_len must be at least 1".into()));
    }
    let min_gap = usize::from(!allow_single_token);
    let mut best: Option<(usize, usize, f64)> = None;
    for l in 0..n {
        let last = (l + max_span_len - 1).min(n - 1);
        for m in (l + min_gap)..=last {
            let p = p_start[l] * p_end[m];
            if best.map_or(true, |(_, _, b)| p > b) {
                best = Some((l, m, p));
            }
        }
    }
    best.ok_or(Error::NoValidSpan)
}

fn softmax(xs: &[f64]) -> Vec<f64> {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = xs.iter().map(|x| (x - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Deterministic stand-in for a neural reader.
///
/// Token affinity is `idf(t)` when the token occurs in the question and
/// `0.1 · idf(t)` otherwise. Span distributions are the softmax of the
/// affinities; `alpha` and `beta` are the affinities normalized to sum 1.
/// The rerank confidence sums `beta[k] · a[k] / max(a)` over the span, and
/// the masked variant keeps only span tokens with `gq[k] = 1`.
pub fn lexical_score(
    question: &[String],
    doc: &[String],
    gq: &[u8],
    stats: &CorpusStats,
    cfg: &ScorerConfig,
) -> Result<ScorerOutput> {
    crate::retrieval::check_len(0, "gq", gq.len(), doc.len())?;
    let in_question: HashSet<&str> = question.iter().map(String::as_str).collect();
    let affinity: Vec<f64> = doc
        .iter()
        .map(|t| {
            let idf = stats.idf(t);
            if in_question.contains(t.as_str()) {
                idf
            } else {
                OFF_QUESTION_DAMPING * idf
            }
        })
        .collect();

    let n = doc.len();
    let total: f64 = affinity.iter().sum();
    let max = affinity.iter().copied().fold(0.0, f64::max);
    let (p, weights) = if total > 0.0 {
        (softmax(&affinity), affinity.iter().map(|a| a / total).collect())
    } else {
        let u = vec![1.0 / n as f64; n];
        (u.clone(), u)
    };
    let (l, m, s2) = select_span(&p, &p, cfg.max_span_len, cfg.allow_single_token)?;

    let term = |k: usize| {
        if max > 0.0 {
            weights[k] * affinity[k] / max
        } else {
            weights[k]
        }
    };
    let s3: f64 = (l..=m).map(term).sum::<f64>().clamp(0.0, 1.0);
    let s3_qmasked: f64 = (l..=m)
        .filter(|&k| gq[k] != 0)
        .map(term)
        .sum::<f64>()
        .clamp(0.0, 1.0);

    Ok(ScorerOutput {
        p_start: p.clone(),
        p_end: p,
        alpha: weights.clone(),
        beta: weights,
        span: (l, m),
        s2,
        s3,
        s3_qmasked,
    })
}

/// Produces one [`ScorerOutput`] per candidate document of an instance.
pub trait AnswerScorer: Sync {
    fn score(
        &self,
        instance: &QuestionInstance,
        graphs: &LinkGraphs,
        stats: &CorpusStats,
    ) -> Result<Vec<ScorerOutput>>;
}

#[derive(Debug, Clone, Default)]
pub struct LexicalScorer {
    pub config: ScorerConfig,
}

impl AnswerScorer for LexicalScorer {
    fn score(
        &self,
        instance: &QuestionInstance,
        graphs: &LinkGraphs,
        stats: &CorpusStats,
    ) -> Result<Vec<ScorerOutput>> {
        instance
            .documents
            .iter()
            .zip(&graphs.gq)
            .map(|(doc, gq)| lexical_score(&instance.q_tokens, &doc.tokens, gq, stats, &self.config))
            .collect()
    }
}

/// One line of the scorer protocol file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScorerRecord {
    pub question_id: String,
    pub doc_id: String,
    pub p_start: Vec<f64>,
    pub p_end: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub span: (usize, usize),
    pub s3: f64,
    pub s3_qmasked: f64,
}

impl ScorerRecord {
    pub fn from_output(question_id: &str, doc_id: &str, out: &ScorerOutput) -> Self {
        ScorerRecord {
            question_id: question_id.to_string(),
            doc_id: doc_id.to_string(),
            p_start: out.p_start.clone(),
            p_end: out.p_end.clone(),
            alpha: out.alpha.clone(),
            beta: out.beta.clone(),
            span: out.span,
            s3: out.s3,
            s3_qmasked: out.s3_qmasked,
        }
    }

    /// Checks the record against the document length and the span rule and
    /// converts it into a [`ScorerOutput`].
    pub fn into_output(self, n_tokens: usize, cfg: &ScorerConfig) -> Result<ScorerOutput> {
        let fail = |message: String| Error::InvalidScorerRecord {
            question_id: self.question_id.clone(),
            doc_id: self.doc_id.clone(),
            message,
        };
        for (name, v) in [
            ("p_start", &self.p_start),
            ("p_end", &self.p_end),
            ("alpha", &self.alpha),
            ("beta", &self.beta),
        ] {
            if v.len() != n_tokens {
                return Err(fail(format!("{name} has {} entries, document has {n_tokens} tokens", v.len())));
            }
            if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(fail(format!("{name} has a negative or non-finite entry")));
            }
            let sum: f64 = v.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(fail(format!("{name} sums to {sum}, expected 1 within {SUM_TOLERANCE}")));
            }
        }
        if !self.s3.is_finite() || !self.s3_qmasked.is_finite() {
            return Err(fail("non-finite rerank score".into()));
        }
        let (l, m) = self.span;
        if l > m || m >= n_tokens {
            return Err(fail(format!("span ({l}, {m}) outside {n_tokens} tokens")));
        }
        let (rl, rm, s2) = select_span(&self.p_start, &self.p_end, cfg.max_span_len, cfg.allow_single_token)
            .map_err(|e| fail(e.to_string()))?;
        if (rl, rm) != (l, m) {
            return Err(fail(format!(
                "span ({l}, {m}) differs from recomputed argmax ({rl}, {rm})"
            )));
        }
        Ok(ScorerOutput {
            p_start: self.p_start,
            p_end: self.p_end,
            alpha: self.alpha,
            beta: self.beta,
            span: (l, m),
            s2,
            s3: self.s3,
            s3_qmasked: self.s3_qmasked,
        })
    }
}

/// Reads and validates a scorer protocol file; every (question, document)
/// pair of `instances` must be covered. Records for unknown pairs are
/// ignored.
pub fn load_scorer_file(
    path: impl AsRef<Path>,
    instances: &[QuestionInstance],
    cfg: &ScorerConfig,
) -> Result<HashMap<(String, String), ScorerOutput>> {
    let path = path.as_ref();
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let lengths: HashMap<(&str, &str), usize> = instances
        .iter()
        .flat_map(|inst| {
            inst.documents
                .iter()
                .map(move |d| ((inst.question_id.as_str(), d.doc_id.as_str()), d.tokens.len()))
        })
        .collect();

    let mut outputs = HashMap::new();
    for (idx, line) in content.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let record: ScorerRecord =
            serde_json::from_str(line).map_err(|e| Error::record(path, idx + 1, e.to_string()))?;
        let Some(&n) = lengths.get(&(record.question_id.as_str(), record.doc_id.as_str())) else {
            continue;
        };
        let key = (record.question_id.clone(), record.doc_id.clone());
        outputs.insert(key, record.into_output(n, cfg)?);
    }

    let mut missing: Vec<(String, String)> = lengths
        .keys()
        .filter(|(q, d)| !outputs.contains_key(&(q.to_string(), d.to_string())))
        .map(|(q, d)| (q.to_string(), d.to_string()))
        .collect();
    if !missing.is_empty() {
        missing.sort();
        return Err(Error::MissingScorerOutputs {
            path: path.to_path_buf(),
            missing,
        });
    }
    Ok(outputs)
}

/// Serves precomputed outputs loaded from a protocol file.
#[derive(Debug, Clone, Default)]
pub struct FileScorer {
    outputs: HashMap<(String, String), ScorerOutput>,
}

impl FileScorer {
    pub fn load(path: impl AsRef<Path>, instances: &[QuestionInstance], cfg: &ScorerConfig) -> Result<Self> {
        Ok(FileScorer {
            outputs: load_scorer_file(path, instances, cfg)?,
        })
    }

    pub fn from_outputs(outputs: HashMap<(String, String), ScorerOutput>) -> Self {
        FileScorer { outputs }
    }
}

impl AnswerScorer for FileScorer {
    fn score(
        &self,
        instance: &QuestionInstance,
        _graphs: &LinkGraphs,
        _stats: &CorpusStats,
    ) -> Result<Vec<ScorerOutput>> {
        instance
            .documents
            .iter()
            .map(|d| {
                self.outputs
                    .get(&(instance.question_id.clone(), d.doc_id.clone()))
                    .cloned()
                    .ok_or_else(|| Error::MissingScorerOutputs {
                        path: PathBuf::new(),
                        missing: vec![(instance.question_id.clone(), d.doc_id.clone())],
                    })
            })
            .collect()
    }
}
