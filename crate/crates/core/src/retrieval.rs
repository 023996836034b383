//! TF-IDF cosine retrieval and its knowledge-aided fusion.

use std::collections::HashMap;

use crate::corpus::CorpusStats;
use crate::error::{Error, Result};
use crate::graph::LinkGraphs;

/// Default weight of the question-link term.
pub const DEFAULT_WQ: f64 = 0.5;
/// Default weight of the document-link term.
pub const DEFAULT_WD: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RetrievalScores {
    pub s1: Vec<f64>,
    /// Question-link term per document.
    pub sq1: Vec<f64>,
    /// Document-link term per document.
    pub sd1: Vec<f64>,
    pub s1_hat: Vec<f64>,
}

fn tfidf_vector<'a>(tokens: &'a [String], stats: &CorpusStats) -> HashMap<&'a str, f64> {
    let mut tf: HashMap<&str, f64> = HashMap::new();
    for t in tokens {
        *tf.entry(t.as_str()).or_default() += 1.0;
    }
    for (t, w) in tf.iter_mut() {
        *w *= stats.idf(t);
    }
    tf
}

fn sorted_terms<'a>(v: &HashMap<&'a str, f64>) -> Vec<(&'a str, f64)> {
    let mut terms: Vec<(&str, f64)> = v.iter().map(|(k, w)| (*k, *w)).collect();
    terms.sort_unstable_by(|a, b| a.0.cmp(b.0));
    terms
}

/// Cosine of raw-tf × idf vectors; 0 when either side is empty.
pub fn tfidf_cosine(question: &[String], doc: &[String], stats: &CorpusStats) -> f64 {
    let q = tfidf_vector(question, stats);
    let d = tfidf_vector(doc, stats);
    // Sorted terms keep the floating-point summation order fixed.
    let q_terms = sorted_terms(&q);
    let d_terms = sorted_terms(&d);
    let dot: f64 = q_terms
        .iter()
        .filter_map(|(t, w)| d.get(t).map(|dw| w * dw))
        .sum();
    let qn = q_terms.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    let dn = d_terms.iter().map(|(_, w)| w * w).sum::<f64>().sqrt();
    if qn == 0.0 || dn == 0.0 {
        return 0.0;
    }
    (dot / (qn * dn)).clamp(0.0, 1.0)
}

pub(crate) fn check_len(doc: usize, what: &'static str, found: usize, expected: usize) -> Result<()> {
    if found != expected {
        return Err(Error::LengthMismatch {
            doc,
            what,
            found,
            expected,
        });
    }
    Ok(())
}

/// Adds the question-link and document-link terms to the base scores:
///
/// ```text
/// sq1[i]    = Σ_k gq[i][k] · alpha[i][k] · s1[i]
/// sd1[i]    = Σ_k alpha[i][k] · s1[gd[i][k]]      (unlinked k contribute 0)
/// s1_hat[i] = s1[i] + wq · sq1[i] + wd · sd1[i]
/// ```
pub fn fuse_retrieval(
    s1: &[f64],
    graphs: &LinkGraphs,
    alpha: &[Vec<f64>],
    wq: f64,
    wd: f64,
) -> Result<RetrievalScores> {
    let n = s1.len();
    check_len(0, "gq list count", graphs.gq.len(), n)?;
    check_len(0, "gd list count", graphs.gd.len(), n)?;
    check_len(0, "alpha vector count", alpha.len(), n)?;

    let mut out = RetrievalScores {
        s1: s1.to_vec(),
        ..Default::default()
    };
    for i in 0..n {
        let (a, gq, gd) = (&alpha[i], &graphs.gq[i], &graphs.gd[i]);
        check_len(i, "gq", gq.len(), a.len())?;
        check_len(i, "gd", gd.len(), a.len())?;
        let mut sq = 0.0;
        let mut sd = 0.0;
        for k in 0..a.len() {
            if gq[k] != 0 {
                sq += a[k] * s1[i];
            }
            if let Some(j) = gd[k] {
                if j >= n || j == i {
                    return Err(Error::InvalidArgument(format!(
                        "document {i}: gd[{k}] = {j} is not another document"
                    )));
                }
                sd += a[k] * s1[j];
            }
        }
        out.sq1.push(sq);
        out.sd1.push(sd);
        out.s1_hat.push(s1[i] + wq * sq + wd * sd);
    }
    Ok(out)
}

/// Document indices sorted by descending score, ties to the lower index.
pub fn rank_by(scores: &[f64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    order
}
