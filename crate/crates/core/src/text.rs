//! Tokenization and answer normalization shared by ingestion, the triple
//! store and the evaluation metrics.
//!
//! Tokens are produced by lowercasing, splitting on Unicode whitespace and
//! stripping leading and trailing punctuation. A character counts as
//! punctuation when it is neither alphanumeric nor whitespace, so `"u.s."`
//! becomes `"u.s"` and `"(paris),"` becomes `"paris"`. Tokens that are empty
//! after stripping are dropped.

fn is_punct(c: char) -> bool {
    !c.is_alphanumeric() && !c.is_whitespace()
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace()
        .filter_map(|raw| {
            let tok = raw.trim_matches(is_punct).to_lowercase();
            (!tok.is_empty()).then_some(tok)
        })
        .collect()
}

const ARTICLES: [&str; 3] = ["a", "an", "the"];

pub fn is_article(token: &str) -> bool {
    ARTICLES.contains(&token)
}

/// Answer normalization used for EM/F1 and golden labeling: lowercase, drop
/// punctuation characters, drop the articles `a`, `an`, `the`, collapse
/// whitespace.
pub fn normalize_answer(s: &str) -> String {
    normalized_tokens(s).join(" ")
}

pub fn normalized_tokens(s: &str) -> Vec<String> {
    let lower = s.to_lowercase();
    let stripped: String = lower.chars().filter(|&c| !is_punct(c)).collect();
    stripped
        .split_whitespace()
        .filter(|t| !is_article(t))
        .map(str::to_string)
        .collect()
}

/// Normalizes a single engine token the same way [`normalize_answer`] would
/// treat it, without dropping articles.
pub(crate) fn normalize_token(token: &str) -> String {
    token.chars().filter(|&c| !is_punct(c)).collect::<String>().to_lowercase()
}
