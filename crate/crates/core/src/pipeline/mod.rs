//! Retrieve, read and rerank: final score fusion, losses, metrics and the
//! diagnostic experiments.

mod experiments;
mod losses;
mod metrics;
mod results;

pub use experiments::{
    all_answer_bound, grid_search, grid_triples, golden_doc_eval, inject_golden, mean_f1, search_weights,
    GoldenDocReport,
    DEFAULT_GRID,
};
pub use losses::{
    losses, reader_loss, rerank_loss, retrieval_loss, sigmoid, LossReport, LossSummary,
};
pub use metrics::{em_f1, p_at_k, p_at_k_labels};
pub use results::{evaluate_results, PrecisionAtK, QuestionResult, RunSummary};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{CorpusStats, QuestionInstance};
use crate::error::Result;
use crate::graph::LinkGraphs;
use crate::kb::TripleStore;
use crate::rerank::{fuse_rerank, RerankScores};
use crate::retrieval::{fuse_retrieval, rank_by, tfidf_cosine, RetrievalScores};
use crate::scorer::{AnswerScorer, ScorerOutput};

/// Component weights `(w1, w2, w3)` of the final score.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize, Deserialize)]
pub struct Weights {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

impl Weights {
    pub const fn new(w1: f64, w2: f64, w3: f64) -> Self {
        Weights { w1, w2, w3 }
    }
}

impl Default for Weights {
    fn default() -> Self {
        Weights::new(1.0, 1.0, 1.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionConfig {
    pub wq: f64,
    pub wd: f64,
    pub weights: Weights,
}

impl Default for FusionConfig {
    fn default() -> Self {
        FusionConfig {
            wq: crate::retrieval::DEFAULT_WQ,
            wd: crate::retrieval::DEFAULT_WD,
            weights: Weights::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub doc: usize,
    pub span: (usize, usize),
    pub text: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScoreBundle {
    pub retrieval: RetrievalScores,
    pub rerank: RerankScores,
    pub s2: Vec<f64>,
    pub s_final: Vec<f64>,
    pub predicted: Prediction,
    pub weights: Weights,
}

/// `w1 · s1_hat + w2 · s2 + w3 · s3_hat`, per document.
pub fn final_scores(s1_hat: &[f64], s2: &[f64], s3_hat: &[f64], w: Weights) -> Vec<f64> {
    s1_hat
        .iter()
        .zip(s2)
        .zip(s3_hat)
        .map(|((a, b), c)| w.w1 * a + w.w2 * b + w.w3 * c)
        .collect()
}

/// Index of the highest score among `candidates`, ties to the lower index.
pub(crate) fn argmax_among(scores: &[f64], candidates: impl IntoIterator<Item = usize>) -> Option<usize> {
    let mut best: Option<usize> = None;
    for i in candidates {
        if best.map_or(true, |b| scores[i] > scores[b] || (scores[i] == scores[b] && i < b)) {
            best = Some(i);
        }
    }
    best
}

fn predict(instance: &QuestionInstance, outputs: &[ScorerOutput], s_final: &[f64]) -> Prediction {
    let doc = argmax_among(s_final, 0..s_final.len()).expect("instances have at least one document");
    let span = outputs[doc].span;
    Prediction {
        doc,
        span,
        text: instance.span_text(doc, span.0, span.1),
    }
}

/// Base TF-IDF cosine of the question against every candidate document.
pub fn baseline_scores(instance: &QuestionInstance, stats: &CorpusStats) -> Vec<f64> {
    instance
        .documents
        .iter()
        .map(|d| tfidf_cosine(&instance.q_tokens, &d.tokens, stats))
        .collect()
}

/// Fuses retrieval, reader and rerank scores for one instance and picks the
/// answer from the top-scoring document.
pub fn answer(
    instance: &QuestionInstance,
    graphs: &LinkGraphs,
    outputs: &[ScorerOutput],
    stats: &CorpusStats,
    config: &FusionConfig,
) -> Result<ScoreBundle> {
    let s1 = baseline_scores(instance, stats);
    let alpha: Vec<Vec<f64>> = outputs.iter().map(|o| o.alpha.clone()).collect();
    let retrieval = fuse_retrieval(&s1, graphs, &alpha, config.wq, config.wd)?;
    let rerank = fuse_rerank(outputs, graphs, config.wq, config.wd)?;
    let s2: Vec<f64> = outputs.iter().map(|o| o.s2).collect();
    Ok(ScoreBundle::assemble(instance, outputs, retrieval, rerank, s2, config.weights))
}

impl ScoreBundle {
    fn assemble(
        instance: &QuestionInstance,
        outputs: &[ScorerOutput],
        retrieval: RetrievalScores,
        rerank: RerankScores,
        s2: Vec<f64>,
        weights: Weights,
    ) -> Self {
        let s_final = final_scores(&retrieval.s1_hat, &s2, &rerank.s3_hat, weights);
        let predicted = predict(instance, outputs, &s_final);
        ScoreBundle {
            retrieval,
            rerank,
            s2,
            s_final,
            predicted,
            weights,
        }
    }

    /// Same component scores under different final weights.
    pub fn reweighted(&self, instance: &QuestionInstance, outputs: &[ScorerOutput], weights: Weights) -> Self {
        ScoreBundle::assemble(
            instance,
            outputs,
            self.retrieval.clone(),
            self.rerank.clone(),
            self.s2.clone(),
            weights,
        )
    }

    /// Knowledge-aided retrieval ranking.
    pub fn ranking(&self) -> Vec<usize> {
        rank_by(&self.retrieval.s1_hat)
    }

    pub fn baseline_ranking(&self) -> Vec<usize> {
        rank_by(&self.retrieval.s1)
    }
}

/// Everything computed for one question.
#[derive(Debug, Clone)]
pub struct Evaluated {
    pub graphs: LinkGraphs,
    pub outputs: Vec<ScorerOutput>,
    pub bundle: ScoreBundle,
}

/// Wires a triple store, corpus statistics and a scorer into per-question
/// evaluation.
pub struct Engine<'a> {
    pub store: &'a TripleStore,
    pub stats: &'a CorpusStats,
    pub scorer: &'a dyn AnswerScorer,
    pub t1: usize,
    pub t2: usize,
    pub fusion: FusionConfig,
}

impl Engine<'_> {
    pub fn evaluate(&self, instance: &QuestionInstance) -> Result<Evaluated> {
        let graphs = LinkGraphs::build(instance, self.store, self.stats, self.t1, self.t2);
        let outputs = self.scorer.score(instance, &graphs, self.stats)?;
        let bundle = answer(instance, &graphs, &outputs, self.stats, &self.fusion)?;
        Ok(Evaluated {
            graphs,
            outputs,
            bundle,
        })
    }

    /// Evaluates every instance in parallel; results keep input order.
    pub fn evaluate_all(&self, instances: &[QuestionInstance]) -> Result<Vec<Evaluated>> {
        instances.par_iter().map(|inst| self.evaluate(inst)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::Document;

    fn instance(docs: &[&str]) -> QuestionInstance {
        QuestionInstance {
            question_id: "q".into(),
            q_tokens: vec!["x".into()],
            documents: docs
                .iter()
                .enumerate()
                .map(|(i, d)| Document {
                    doc_id: format!("d{i}"),
                    tokens: d.split_whitespace().map(str::to_string).collect(),
                    phrase_spans: None,
                })
                .collect(),
            gold_answers: vec!["a".into()],
            golden_doc_index: None,
            golden_span: None,
        }
    }

    fn output(n: usize, span: (usize, usize), s2: f64) -> ScorerOutput {
        ScorerOutput {
            p_start: vec![1.0 / n as f64; n],
            p_end: vec![1.0 / n as f64; n],
            alpha: vec![1.0 / n as f64; n],
            beta: vec![1.0 / n as f64; n],
            span,
            s2,
            s3: 0.0,
            s3_qmasked: 0.0,
        }
    }

    #[test]
    fn reader_only_weights_follow_s2() {
        let inst = instance(&["alpha beta", "gamma"]);
        let outputs = vec![output(2, (1, 1), 0.9), output(1, (0, 0), 0.1)];
        let cfg = FusionConfig {
            weights: Weights::new(0.0, 1.0, 0.0),
            ..Default::default()
        };
        let b = answer(&inst, &LinkGraphs::empty(&inst), &outputs, &CorpusStats::default(), &cfg).unwrap();
        assert_eq!(b.predicted.doc, 0);
        assert_eq!(b.predicted.text, "beta");
    }

    #[test]
    fn final_score_hand_sum() {
        let s = final_scores(&[0.71, 0.3], &[0.2, 0.9], &[0.5, 0.1], Weights::new(1.0, 1.0, 1.0));
        assert!((s[0] - 1.41).abs() < 1e-12);
        assert!((s[1] - 1.3).abs() < 1e-12);
        assert_eq!(argmax_among(&s, 0..2), Some(0));
    }

    #[test]
    fn ties_go_to_lower_index() {
        assert_eq!(argmax_among(&[0.5, 0.7, 0.7], 0..3), Some(1));
        assert_eq!(argmax_among(&[0.5, 0.7, 0.7], [2, 1]), Some(1));
    }
}
