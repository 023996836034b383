//! Run configuration: a `key = value` file overlaid by command-line flags.
//!
//! ```text
//! # toy run
//! corpus = data/toy/corpus.jsonl
//! triples = data/toy/triples.tsv
//! t1 = 5
//! weights = 1.0, 0.5, 1.0
//! ```
//!
//! Relative paths in a config file resolve against the file's directory.

use std::fs;
use std::path::{Path, PathBuf};

use crate::corpus::DEFAULT_MAX_TOKENS;
use crate::error::{Error, Result};
use crate::graph::{DEFAULT_T1, DEFAULT_T2};
use crate::pipeline::{FusionConfig, Weights, DEFAULT_GRID};
use crate::retrieval::{DEFAULT_WD, DEFAULT_WQ};
use crate::scorer::{ScorerConfig, ScorerKind, DEFAULT_MAX_SPAN_LEN};

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub corpus: Option<PathBuf>,
    pub triples: Option<PathBuf>,
    pub blocklist: Option<PathBuf>,
    pub t1: usize,
    pub t2: usize,
    pub wq: f64,
    pub wd: f64,
    pub weights: Weights,
    pub grid: Vec<f64>,
    pub scorer: ScorerKind,
    pub scorer_path: Option<PathBuf>,
    pub max_tokens: usize,
    pub max_span_len: usize,
    pub allow_single_token: bool,
    pub output: Option<PathBuf>,
    pub seed: u64,
    /// Question-level worker threads; 0 lets the runtime decide.
    pub threads: usize,
    /// Reader input size for the golden-document experiment.
    pub golden_n: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            corpus: None,
            triples: None,
            blocklist: None,
            t1: DEFAULT_T1,
            t2: DEFAULT_T2,
            wq: DEFAULT_WQ,
            wd: DEFAULT_WD,
            weights: Weights::default(),
            grid: DEFAULT_GRID.to_vec(),
            scorer: ScorerKind::Lexical,
            scorer_path: None,
            max_tokens: DEFAULT_MAX_TOKENS,
            max_span_len: DEFAULT_MAX_SPAN_LEN,
            allow_single_token: true,
            output: None,
            seed: 0,
            threads: 0,
            golden_n: 5,
        }
    }
}

fn parse_list(value: &str) -> std::result::Result<Vec<f64>, String> {
    value
        .split(',')
        .map(|v| v.trim().parse::<f64>().map_err(|e| format!("{v:?}: {e}")))
        .collect()
}

pub fn parse_weights(value: &str) -> std::result::Result<Weights, String> {
    match parse_list(value)?.as_slice() {
        [w1, w2, w3] => Ok(Weights::new(*w1, *w2, *w3)),
        other => Err(format!("expected 3 comma-separated weights, found {}", other.len())),
    }
}

pub fn parse_grid(value: &str) -> std::result::Result<Vec<f64>, String> {
    parse_list(value)
}

pub fn parse_scorer_kind(value: &str) -> std::result::Result<ScorerKind, String> {
    match value {
        "lexical" => Ok(ScorerKind::Lexical),
        "file" => Ok(ScorerKind::File),
        other => Err(format!("unknown scorer kind {other:?} (expected lexical or file)")),
    }
}

fn scorer_name(kind: ScorerKind) -> &'static str {
    match kind {
        ScorerKind::Lexical => "lexical",
        ScorerKind::File => "file",
    }
}

fn join_floats(values: &[f64]) -> String {
    values.iter().map(f64::to_string).collect::<Vec<_>>().join(",")
}

impl RunConfig {
    pub fn from_file(path: &Path) -> Result<Self> {
        let content = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new(""));
        let mut cfg = RunConfig::default();
        for (idx, raw) in content.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::record(path, idx + 1, "expected key = value"))?;
            cfg.set(key.trim(), value.trim(), base)
                .map_err(|msg| Error::record(path, idx + 1, msg))?;
        }
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str, base: &Path) -> std::result::Result<(), String> {
        fn num<T: std::str::FromStr>(v: &str) -> std::result::Result<T, String>
        where
            T::Err: std::fmt::Display,
        {
            v.parse::<T>().map_err(|e| format!("{v:?}: {e}"))
        }
        let path = |v: &str| Some(base.join(v));
        match key {
            "corpus" => self.corpus = path(value),
            "triples" => self.triples = path(value),
            "blocklist" => self.blocklist = path(value),
            "scorer_path" => self.scorer_path = path(value),
            "output" => self.output = path(value),
            "t1" => self.t1 = num(value)?,
            "t2" => self.t2 = num(value)?,
            "wq" => self.wq = num(value)?,
            "wd" => self.wd = num(value)?,
            "weights" => self.weights = parse_weights(value)?,
            "grid" => self.grid = parse_grid(value)?,
            "scorer" => self.scorer = parse_scorer_kind(value)?,
            "max_tokens" => self.max_tokens = num(value)?,
            "max_span_len" => self.max_span_len = num(value)?,
            "allow_single_token" => self.allow_single_token = num(value)?,
            "seed" => self.seed = num(value)?,
            "threads" => self.threads = num(value)?,
            "golden_n" => self.golden_n = num(value)?,
            other => return Err(format!("unknown key {other:?}")),
        }
        Ok(())
    }

    /// Checks numeric ranges and that every referenced input file exists.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidArgument(m));
        if self.t1 < 1 || self.t2 < 1 {
            return bad("t1 and t2 must be at least 1".into());
        }
        for (name, v) in [("wq", self.wq), ("wd", self.wd)] {
            if !v.is_finite() || v < 0.0 {
                return bad(format!("{name} must be a non-negative number, got {v}"));
            }
        }
        let w = self.weights;
        if [w.w1, w.w2, w.w3].iter().any(|v| !v.is_finite()) {
            return bad("weights must be finite".into());
        }
        if self.grid.is_empty() || self.grid.iter().any(|v| !v.is_finite()) {
            return bad("grid must be a non-empty list of finite values".into());
        }
        if self.max_tokens == 0 || self.golden_n == 0 {
            return bad("max_tokens and golden_n must be positive".into());
        }
        self.scorer_config().validate()?;
        for p in [&self.corpus, &self.triples, &self.blocklist, &self.scorer_path]
            .into_iter()
            .flatten()
        {
            if !p.exists() {
                return bad(format!("{} does not exist", p.display()));
            }
        }
        Ok(())
    }

    pub fn scorer_config(&self) -> ScorerConfig {
        ScorerConfig {
            kind: self.scorer,
            file_path: self.scorer_path.clone(),
            max_span_len: self.max_span_len,
            allow_single_token: self.allow_single_token,
        }
    }

    pub fn fusion(&self) -> FusionConfig {
        FusionConfig {
            wq: self.wq,
            wd: self.wd,
            weights: self.weights,
        }
    }

    /// The effective configuration in config-file syntax, one key per line
    /// in a fixed order.
    pub fn to_kv_string(&self) -> String {
        let p = |v: &Option<PathBuf>| v.as_ref().map(|p| p.display().to_string()).unwrap_or_default();
        let w = self.weights;
        let lines = [
            format!("corpus = {}", p(&self.corpus)),
            format!("triples = {}", p(&self.triples)),
            format!("blocklist = {}", p(&self.blocklist)),
            format!("t1 = {}", self.t1),
            format!("t2 = {}", self.t2),
            format!("wq = {}", self.wq),
            format!("wd = {}", self.wd),
            format!("weights = {},{},{}", w.w1, w.w2, w.w3),
            format!("grid = {}", join_floats(&self.grid)),
            format!("scorer = {}", scorer_name(self.scorer)),
            format!("scorer_path = {}", p(&self.scorer_path)),
            format!("max_tokens = {}", self.max_tokens),
            format!("max_span_len = {}", self.max_span_len),
            format!("allow_single_token = {}", self.allow_single_token),
            format!("output = {}", p(&self.output)),
            format!("seed = {}", self.seed),
            format!("threads = {}", self.threads),
            format!("golden_n = {}", self.golden_n),
        ];
        let mut out = String::new();
        for line in lines {
            // Empty optional paths are omitted so the echo parses back.
            if !line.ends_with("= ") {
                out.push_str(&line);
                out.push('\n');
            }
        }
        out
    }
}
