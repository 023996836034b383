//! Line-delimited JSON helpers and the token export.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::corpus::QuestionInstance;
use crate::error::{Error, Result};

pub fn write_jsonl<T: Serialize>(path: &Path, items: impl IntoIterator<Item = T>) -> Result<()> {
    let file = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, &item)?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    content
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| Error::record(path, i + 1, e.to_string())))
        .collect()
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenDocument {
    pub doc_id: String,
    pub tokens: Vec<String>,
}

/// One line of the token export read by external scorers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TokenRecord {
    pub question_id: String,
    pub question_tokens: Vec<String>,
    pub documents: Vec<TokenDocument>,
}

impl From<&QuestionInstance> for TokenRecord {
    fn from(inst: &QuestionInstance) -> Self {
        TokenRecord {
            question_id: inst.question_id.clone(),
            question_tokens: inst.q_tokens.clone(),
            documents: inst
                .documents
                .iter()
                .map(|d| TokenDocument {
                    doc_id: d.doc_id.clone(),
                    tokens: d.tokens.clone(),
                })
                .collect(),
        }
    }
}
