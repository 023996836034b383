//! Answer and ranking metrics.

use std::collections::HashMap;

use crate::corpus::QuestionInstance;
use crate::error::{Error, Result};
use crate::text::normalized_tokens;

/// Exact match and token-level F1 of `prediction` against the best gold.
pub fn em_f1(prediction: &str, golds: &[String]) -> (f64, f64) {
    let pred = normalized_tokens(prediction);
    let mut em: f64 = 0.0;
    let mut f1: f64 = 0.0;
    for gold in golds {
        let gold = normalized_tokens(gold);
        if pred == gold {
            em = 1.0;
        }
        f1 = f1.max(token_f1(&pred, &gold));
    }
    (em, f1)
}

fn token_f1(pred: &[String], gold: &[String]) -> f64 {
    if pred.is_empty() || gold.is_empty() {
        return if pred == gold { 1.0 } else { 0.0 };
    }
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for t in gold {
        *counts.entry(t).or_default() += 1;
    }
    let mut common = 0usize;
    for t in pred {
        if let Some(c) = counts.get_mut(t.as_str()) {
            if *c > 0 {
                *c -= 1;
                common += 1;
            }
        }
    }
    if common == 0 {
        return 0.0;
    }
    let precision = common as f64 / pred.len() as f64;
    let recall = common as f64 / gold.len() as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Fraction of labeled questions whose golden document is ranked within the
/// top `k`. Unlabeled entries are skipped; with no labeled entries the
/// result is 0.
pub fn p_at_k_labels(golden: &[Option<usize>], rankings: &[Vec<usize>], k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if golden.len() != rankings.len() {
        return Err(Error::InvalidArgument(format!(
            "{} golden labels for {} rankings",
            golden.len(),
            rankings.len()
        )));
    }
    let mut labeled = 0usize;
    let mut hits = 0usize;
    for (g, ranking) in golden.iter().zip(rankings) {
        if let Some(g) = g {
            labeled += 1;
            if ranking.iter().take(k).any(|d| d == g) {
                hits += 1;
            }
        }
    }
    Ok(if labeled == 0 {
        0.0
    } else {
        hits as f64 / labeled as f64
    })
}

pub fn p_at_k(instances: &[QuestionInstance], rankings: &[Vec<usize>], k: usize) -> Result<f64> {
    let golden: Vec<Option<usize>> = instances.iter().map(|i| i.golden_doc_index).collect();
    p_at_k_labels(&golden, rankings, k)
}
