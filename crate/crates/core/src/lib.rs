//! Knowledge-graph aided open-domain question answering.
//!
//! Candidate documents for a question are scored by TF-IDF cosine, then
//! re-scored using two link structures mined from knowledge-base triples:
//! links from document words to question words, and links between words of
//! different candidate documents. A pluggable reader supplies answer spans,
//! per-token attention weights and rerank confidences, which are fused with
//! the same link structures before picking the final answer.
//!
//! Module map:
//!
//! - [`corpus`]: ingestion, golden-document labeling, IDF statistics
//! - [`kb`]: triple store and phrase matching
//! - [`graph`]: question-document and document-document link lists
//! - [`retrieval`]: TF-IDF cosine and knowledge-aided retrieval fusion
//! - [`scorer`]: reader boundary, lexical fallback, protocol files
//! - [`rerank`]: knowledge-aided rerank fusion
//! - [`pipeline`]: final fusion, metrics, losses, experiments
//! - [`config`] and [`cli`]: the `kgqa` command line

pub mod cli;
pub mod config;
pub mod corpus;
pub mod error;
pub mod graph;
pub mod io;
pub mod kb;
pub mod pipeline;
pub mod rerank;
pub mod retrieval;
pub mod scorer;
pub mod text;

pub use error::{Error, Result};
