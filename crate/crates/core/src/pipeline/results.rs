//! Per-question result records and run summaries.

use serde::{Deserialize, Serialize};

use super::losses::LossSummary;
use super::metrics::{em_f1, p_at_k_labels};
use super::{Evaluated, Weights};
use crate::corpus::QuestionInstance;
use crate::error::Result;
use crate::retrieval::rank_by;

/// One line of the results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuestionResult {
    pub question_id: String,
    pub predicted_answer: String,
    pub predicted_doc: usize,
    pub gold_answers: Vec<String>,
    pub golden_doc_index: Option<usize>,
    pub s1: Vec<f64>,
    pub s1_hat: Vec<f64>,
    pub s2: Vec<f64>,
    pub s3: Vec<f64>,
    pub s3_hat: Vec<f64>,
    pub s_final: Vec<f64>,
    pub em: f64,
    pub f1: f64,
}

impl QuestionResult {
    pub fn new(instance: &QuestionInstance, evaluated: &Evaluated) -> Self {
        let b = &evaluated.bundle;
        let (em, f1) = em_f1(&b.predicted.text, &instance.gold_answers);
        QuestionResult {
            question_id: instance.question_id.clone(),
            predicted_answer: b.predicted.text.clone(),
            predicted_doc: b.predicted.doc,
            gold_answers: instance.gold_answers.clone(),
            golden_doc_index: instance.golden_doc_index,
            s1: b.retrieval.s1.clone(),
            s1_hat: b.retrieval.s1_hat.clone(),
            s2: b.s2.clone(),
            s3: b.rerank.s3.clone(),
            s3_hat: b.rerank.s3_hat.clone(),
            s_final: b.s_final.clone(),
            em,
            f1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PrecisionAtK {
    pub at_1: f64,
    pub at_3: f64,
    pub at_5: f64,
    pub at_10: f64,
}

impl PrecisionAtK {
    pub fn compute(golden: &[Option<usize>], rankings: &[Vec<usize>]) -> Result<Self> {
        Ok(PrecisionAtK {
            at_1: p_at_k_labels(golden, rankings, 1)?,
            at_3: p_at_k_labels(golden, rankings, 3)?,
            at_5: p_at_k_labels(golden, rankings, 5)?,
            at_10: p_at_k_labels(golden, rankings, 10)?,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct RunSummary {
    pub questions: usize,
    pub labeled_questions: usize,
    pub mean_em: f64,
    pub mean_f1: f64,
    /// Ranked by the knowledge-aided retrieval score.
    pub p_at_k: PrecisionAtK,
    /// Ranked by plain TF-IDF cosine.
    pub baseline_p_at_k: PrecisionAtK,
    /// Σ |s1_hat − s1| over all documents.
    pub retrieval_knowledge_delta: f64,
    /// Σ |s3_hat − s3| over all documents.
    pub rerank_knowledge_delta: f64,
    /// Questions whose knowledge-aided ranking differs from the baseline.
    pub reranked_questions: usize,
    pub weights: Option<Weights>,
    pub wq: Option<f64>,
    pub wd: Option<f64>,
    pub losses: Option<LossSummary>,
}

/// Recomputes EM/F1, P@k and knowledge deltas from result records alone.
pub fn evaluate_results(results: &[QuestionResult]) -> Result<RunSummary> {
    let golden: Vec<Option<usize>> = results.iter().map(|r| r.golden_doc_index).collect();
    let ranked: Vec<Vec<usize>> = results.iter().map(|r| rank_by(&r.s1_hat)).collect();
    let baseline: Vec<Vec<usize>> = results.iter().map(|r| rank_by(&r.s1)).collect();

    let mut summary = RunSummary {
        questions: results.len(),
        labeled_questions: golden.iter().flatten().count(),
        p_at_k: PrecisionAtK::compute(&golden, &ranked)?,
        baseline_p_at_k: PrecisionAtK::compute(&golden, &baseline)?,
        reranked_questions: ranked.iter().zip(&baseline).filter(|(a, b)| a != b).count(),
        ..Default::default()
    };
    for r in results {
        let (em, f1) = em_f1(&r.predicted_answer, &r.gold_answers);
        summary.mean_em += em;
        summary.mean_f1 += f1;
        summary.retrieval_knowledge_delta += r.s1_hat.iter().zip(&r.s1).map(|(a, b)| (a - b).abs()).sum::<f64>();
        summary.rerank_knowledge_delta += r.s3_hat.iter().zip(&r.s3).map(|(a, b)| (a - b).abs()).sum::<f64>();
    }
    if !results.is_empty() {
        summary.mean_em /= results.len() as f64;
        summary.mean_f1 /= results.len() as f64;
    }
    Ok(summary)
}
