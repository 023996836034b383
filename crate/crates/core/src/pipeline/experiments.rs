//! Weight search and the headroom diagnostics: forcing the golden document
//! into the reader's input, and scoring the best of all candidate answers.

use serde::{Deserialize, Serialize};

use super::metrics::{em_f1, p_at_k_labels};
use super::{argmax_among, Evaluated, Weights};
use crate::corpus::QuestionInstance;
use crate::error::{Error, Result};
use crate::scorer::ScorerOutput;

/// Candidate values for each final-score weight.
pub const DEFAULT_GRID: [f64; 3] = [0.2, 0.5, 1.0];

/// All weight triples over `grid`, in lexicographic order.
pub fn grid_triples(grid: &[f64]) -> Vec<Weights> {
    let mut values = grid.to_vec();
    values.sort_by(f64::total_cmp);
    values.dedup();
    let mut out = Vec::with_capacity(values.len().pow(3));
    for &w1 in &values {
        for &w2 in &values {
            for &w3 in &values {
                out.push(Weights::new(w1, w2, w3));
            }
        }
    }
    out
}

/// Mean F1 of the predictions under `weights`.
pub fn mean_f1(instances: &[QuestionInstance], evaluated: &[Evaluated], weights: Weights) -> f64 {
    if instances.is_empty() {
        return 0.0;
    }
    let total: f64 = instances
        .iter()
        .zip(evaluated)
        .map(|(inst, ev)| {
            let b = ev.bundle.reweighted(inst, &ev.outputs, weights);
            em_f1(&b.predicted.text, &inst.gold_answers).1
        })
        .sum();
    total / instances.len() as f64
}

/// The triple over `grid` with the highest mean F1; ties go to the
/// lexicographically smallest triple.
pub fn grid_search(instances: &[QuestionInstance], evaluated: &[Evaluated], grid: &[f64]) -> Result<Weights> {
    if grid.is_empty() {
        return Err(Error::InvalidArgument("weight grid is empty".into()));
    }
    search_weights(instances, evaluated, &grid_triples(grid))
}

/// Best of an explicit list of triples, with the same tie rule.
pub fn search_weights(instances: &[QuestionInstance], evaluated: &[Evaluated], candidates: &[Weights]) -> Result<Weights> {
    if instances.len() != evaluated.len() {
        return Err(Error::InvalidArgument(format!(
            "{} instances but {} evaluations",
            instances.len(),
            evaluated.len()
        )));
    }
    let mut sorted = candidates.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    let mut best: Option<(Weights, f64)> = None;
    for w in sorted {
        let f1 = mean_f1(instances, evaluated, w);
        if best.map_or(true, |(_, b)| f1 > b) {
            best = Some((w, f1));
        }
    }
    best.map(|(w, _)| w)
        .ok_or_else(|| Error::InvalidArgument("no candidate weights".into()))
}

/// Forces the golden document into the top `n` of `ranking`: when absent it
/// swaps places with the `n`-th ranked document. Returns `None` for
/// instances without a golden document.
pub fn inject_golden(instance: &QuestionInstance, ranking: &[usize], n: usize) -> Result<Option<Vec<usize>>> {
    if n == 0 || n > ranking.len() {
        return Err(Error::InvalidArgument(format!(
            "n = {n} must lie in 1..={}",
            ranking.len()
        )));
    }
    let Some(golden) = instance.golden_doc_index else {
        return Ok(None);
    };
    let mut out = ranking.to_vec();
    if out[..n].contains(&golden) {
        return Ok(Some(out));
    }
    let pos = out
        .iter()
        .position(|&d| d == golden)
        .ok_or_else(|| Error::InvalidArgument("golden document missing from ranking".into()))?;
    out.swap(n - 1, pos);
    Ok(Some(out))
}

/// Best EM and best F1 over the candidate answers of every document.
pub fn all_answer_bound(instance: &QuestionInstance, outputs: &[ScorerOutput]) -> (f64, f64) {
    outputs
        .iter()
        .enumerate()
        .map(|(i, o)| em_f1(&instance.span_text(i, o.span.0, o.span.1), &instance.gold_answers))
        .fold((0.0, 0.0), |(em, f1), (e, f)| (f64::max(em, e), f64::max(f1, f)))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenDocReport {
    pub n: usize,
    pub questions: usize,
    pub labeled: usize,
    pub p_at_n: f64,
    pub p_at_n_golden: f64,
    pub em: f64,
    pub f1: f64,
    pub em_golden_doc: f64,
    pub f1_golden_doc: f64,
    pub em_all_answer: f64,
    pub f1_all_answer: f64,
}

/// Compares answering from the top `n` retrieved documents with and without
/// golden-document injection, alongside the all-answer bound. Metrics are
/// means over labeled instances.
pub fn golden_doc_eval(instances: &[QuestionInstance], evaluated: &[Evaluated], n: usize) -> Result<GoldenDocReport> {
    let mut report = GoldenDocReport {
        n,
        questions: instances.len(),
        labeled: 0,
        p_at_n: 0.0,
        p_at_n_golden: 0.0,
        em: 0.0,
        f1: 0.0,
        em_golden_doc: 0.0,
        f1_golden_doc: 0.0,
        em_all_answer: 0.0,
        f1_all_answer: 0.0,
    };
    let mut golden = Vec::new();
    let mut before = Vec::new();
    let mut after = Vec::new();
    for (inst, ev) in instances.iter().zip(evaluated) {
        let ranking = ev.bundle.ranking();
        let n_eff = n.min(ranking.len());
        let Some(injected) = inject_golden(inst, &ranking, n_eff)? else {
            continue;
        };
        report.labeled += 1;
        let pick = |r: &[usize]| {
            let doc = argmax_among(&ev.bundle.s_final, r[..n_eff].iter().copied()).expect("n >= 1");
            let (l, m) = ev.outputs[doc].span;
            em_f1(&inst.span_text(doc, l, m), &inst.gold_answers)
        };
        let (em, f1) = pick(&ranking);
        let (em_g, f1_g) = pick(&injected);
        let (em_a, f1_a) = all_answer_bound(inst, &ev.outputs);
        report.em += em;
        report.f1 += f1;
        report.em_golden_doc += em_g;
        report.f1_golden_doc += f1_g;
        report.em_all_answer += em_a;
        report.f1_all_answer += f1_a;
        golden.push(inst.golden_doc_index);
        before.push(ranking);
        after.push(injected);
    }
    if report.labeled > 0 {
        let d = report.labeled as f64;
        for v in [
            &mut report.em,
            &mut report.f1,
            &mut report.em_golden_doc,
            &mut report.f1_golden_doc,
            &mut report.em_all_answer,
            &mut report.f1_all_answer,
        ] {
            *v /= d;
        }
        let k = n.max(1);
        report.p_at_n = p_at_k_labels(&golden, &before, k)?;
        report.p_at_n_golden = p_at_k_labels(&golden, &after, k)?;
    }
    Ok(report)
}
