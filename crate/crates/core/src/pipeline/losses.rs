//! Supervision losses, reported as diagnostics.
//!
//! Squared-error terms are summed over candidate documents. Each
//! per-question term is then divided by its number of summands (documents
//! for the retrieval and rerank terms, one golden span for the reader term)
//! so the three land on a comparable scale before they are added.

use serde::{Deserialize, Serialize};

use super::metrics::em_f1;
use super::ScoreBundle;
use crate::corpus::QuestionInstance;
use crate::error::{Error, Result};
use crate::scorer::ScorerOutput;

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

/// `Σ_i (sigmoid(s1_hat[i]) − label[i])²` with labels in {0, 1}.
pub fn retrieval_loss(s1_hat: &[f64], labels: &[f64]) -> f64 {
    s1_hat
        .iter()
        .zip(labels)
        .map(|(s, y)| (sigmoid(*s) - y).powi(2))
        .sum()
}

/// Cross-entropy of the golden span under the start/end distributions.
pub fn reader_loss(p_start: &[f64], p_end: &[f64], start: usize, end: usize) -> f64 {
    0.0 - p_start[start].ln() - p_end[end].ln()
}

fn log_softmax(xs: &[f64]) -> Vec<f64> {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lse = max + xs.iter().map(|x| (x - max).exp()).sum::<f64>().ln();
    xs.iter().map(|x| x - lse).collect()
}

/// Returns `(soft, hard)`: the squared error of `sigmoid(s3_hat)` against
/// candidate F1, and the cross-entropy of `softmax(s3_hat)` against the hard
/// label distribution. Zero-probability labels contribute nothing.
pub fn rerank_loss(s3_hat: &[f64], f1: &[f64], hard: &[f64]) -> (f64, f64) {
    let soft: f64 = s3_hat
        .iter()
        .zip(f1)
        .map(|(s, y)| (sigmoid(*s) - y).powi(2))
        .sum();
    let hard_term: f64 = log_softmax(s3_hat)
        .iter()
        .zip(hard)
        .filter(|(_, h)| **h > 0.0)
        .map(|(lp, h)| h * (0.0 - lp))
        .sum();
    (soft, hard_term)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LossReport {
    pub l1: f64,
    /// Undefined when the instance has no golden span.
    pub l2: Option<f64>,
    pub l3: f64,
    pub total: f64,
}

/// Per-question losses. The instance must carry a golden document.
pub fn losses(bundle: &ScoreBundle, instance: &QuestionInstance, outputs: &[ScorerOutput]) -> Result<LossReport> {
    let golden = instance
        .golden_doc_index
        .ok_or_else(|| Error::InvalidArgument(format!("{}: no golden document", instance.question_id)))?;
    let n = outputs.len() as f64;

    let labels: Vec<f64> = (0..outputs.len())
        .map(|i| if i == golden { 1.0 } else { 0.0 })
        .collect();
    let l1 = retrieval_loss(&bundle.retrieval.s1_hat, &labels) / n;

    let l2 = instance.golden_span.map(|g| {
        let o = &outputs[g.doc];
        reader_loss(&o.p_start, &o.p_end, g.start, g.end)
    });

    let (f1, em): (Vec<f64>, Vec<f64>) = outputs
        .iter()
        .enumerate()
        .map(|(i, o)| {
            let (em, f1) = em_f1(&instance.span_text(i, o.span.0, o.span.1), &instance.gold_answers);
            (f1, em)
        })
        .unzip();
    let matches: f64 = em.iter().sum();
    let hard: Vec<f64> = if matches > 0.0 {
        em.iter().map(|e| e / matches).collect()
    } else {
        vec![0.0; em.len()]
    };
    let (soft, hard_term) = rerank_loss(&bundle.rerank.s3_hat, &f1, &hard);
    let l3 = (soft + hard_term) / n;

    Ok(LossReport {
        l1,
        l2,
        l3,
        total: l1 + l2.unwrap_or(0.0) + l3,
    })
}

/// Means over questions; `l2` averages only questions where it is defined.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct LossSummary {
    pub l1: f64,
    pub l2: f64,
    pub l3: f64,
    pub total: f64,
    pub questions: usize,
    pub l2_questions: usize,
}

impl LossSummary {
    pub fn from_reports<'a>(reports: impl IntoIterator<Item = &'a LossReport>) -> Self {
        let mut s = LossSummary::default();
        let mut l2_sum = 0.0;
        for r in reports {
            s.questions += 1;
            s.l1 += r.l1;
            s.l3 += r.l3;
            if let Some(l2) = r.l2 {
                s.l2_questions += 1;
                l2_sum += l2;
            }
        }
        if s.questions > 0 {
            s.l1 /= s.questions as f64;
            s.l3 /= s.questions as f64;
        }
        if s.l2_questions > 0 {
            s.l2 = l2_sum / s.l2_questions as f64;
        }
        s.total = s.l1 + s.l2 + s.l3;
        s
    }
}
