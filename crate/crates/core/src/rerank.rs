//! Knowledge-aided answer reranking.

use crate::error::{Error, Result};
use crate::graph::LinkGraphs;
use crate::retrieval::check_len;
use crate::scorer::ScorerOutput;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct RerankScores {
    pub s3: Vec<f64>,
    pub sq3: Vec<f64>,
    pub sd3: Vec<f64>,
    pub s3_hat: Vec<f64>,
}

/// Fuses the base rerank confidences with the question-link term (the
/// scorer's masked confidence) and the document-link term, which sums
/// `beta[k] · s3[gd[k]]` over the answer span only. Linked documents
/// contribute their base `s3`, never their fused score.
pub fn fuse_rerank(outputs: &[ScorerOutput], graphs: &LinkGraphs, wq: f64, wd: f64) -> Result<RerankScores> {
    let n = outputs.len();
    check_len(0, "gd list count", graphs.gd.len(), n)?;
    let s3: Vec<f64> = outputs.iter().map(|o| o.s3).collect();
    let mut out = RerankScores {
        s3: s3.clone(),
        ..Default::default()
    };
    for (i, o) in outputs.iter().enumerate() {
        let gd = &graphs.gd[i];
        check_len(i, "beta", o.beta.len(), gd.len())?;
        let (l, m) = o.span;
        if l > m || m >= gd.len() {
            return Err(Error::SpanOutOfRange {
                doc: i,
                start: l,
                end: m,
                len: gd.len(),
            });
        }
        let mut sd = 0.0;
        for k in l..=m {
            if let Some(j) = gd[k] {
                if j >= n || j == i {
                    return Err(Error::InvalidArgument(format!(
                        "document {i}: gd[{k}] = {j} is not another document"
                    )));
                }
                sd += o.beta[k] * s3[j];
            }
        }
        let sq = o.s3_qmasked;
        out.sq3.push(sq);
        out.sd3.push(sd);
        out.s3_hat.push(s3[i] + wq * sq + wd * sd);
    }
    Ok(out)
}
