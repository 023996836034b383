//! The `kgqa` command line.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::config::{parse_grid, parse_scorer_kind, parse_weights, RunConfig};
use crate::corpus::{compute_idf, ensure_labels, ingest, CorpusStats, QuestionInstance};
use crate::error::{Error, Result};
use crate::graph::LinkGraphs;
use crate::io::{read_jsonl, write_json, write_jsonl, TokenRecord};
use crate::kb::{load_triples, TripleStore};
use crate::pipeline::{
    evaluate_results, golden_doc_eval, grid_search, grid_triples, losses, mean_f1, Engine, Evaluated, LossSummary,
    QuestionResult, RunSummary, Weights,
};
use crate::scorer::{AnswerScorer, FileScorer, LexicalScorer, ScorerKind};

#[derive(Debug, Parser)]
#[command(name = "kgqa", about = "Knowledge-graph aided open-domain question answering")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Validate a corpus file and print a summary.
    Ingest(Overrides),
    /// Write the question-document and document-document link lists.
    BuildGraphs(Overrides),
    /// Write the tokenized corpus for an external scorer.
    ExportTokens(Overrides),
    /// Run the full pipeline and write per-question results and a summary.
    Run(Overrides),
    /// Recompute metrics from a results file.
    Eval {
        #[arg(long)]
        results: PathBuf,
        #[arg(long, short)]
        output: Option<PathBuf>,
    },
    /// Search the final-score weights over the configured grid.
    GridSearch(Overrides),
    /// Compare top-n answering with and without golden-document injection.
    InjectGoldenEval(Overrides),
}

/// Flags that override values from `--config`.
#[derive(Debug, Args, Default)]
struct Overrides {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    #[arg(long)]
    triples: Option<PathBuf>,
    #[arg(long)]
    blocklist: Option<PathBuf>,
    #[arg(long)]
    t1: Option<usize>,
    #[arg(long)]
    t2: Option<usize>,
    #[arg(long, allow_negative_numbers = true)]
    wq: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    wd: Option<f64>,
    /// Final-score weights as `w1,w2,w3`.
    #[arg(long, value_parser = parse_weights)]
    weights: Option<Weights>,
    /// Candidate weight values as a comma-separated list.
    #[arg(long, value_parser = parse_grid)]
    grid: Option<Vec<f64>>,
    /// `lexical` or `file`.
    #[arg(long, value_parser = parse_scorer_kind)]
    scorer: Option<ScorerKind>,
    #[arg(long)]
    scorer_path: Option<PathBuf>,
    #[arg(long)]
    max_tokens: Option<usize>,
    #[arg(long)]
    max_span_len: Option<usize>,
    #[arg(long)]
    allow_single_token: Option<bool>,
    #[arg(long, short)]
    output: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    /// Reader input size for inject-golden-eval.
    #[arg(long = "n")]
    golden_n: Option<usize>,
}

impl Overrides {
    fn resolve(self) -> Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        macro_rules! take {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field { cfg.$field = v.into(); }
            )*};
        }
        take!(t1, t2, wq, wd, weights, grid, scorer, max_tokens, max_span_len, allow_single_token, seed, threads, golden_n);
        macro_rules! take_path {
            ($($field:ident),*) => {$(
                if let Some(v) = self.$field { cfg.$field = Some(v); }
            )*};
        }
        take_path!(corpus, triples, blocklist, scorer_path, output);
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Parses `argv` (including the program name), runs the subcommand and
/// returns the process exit code. Diagnostics go to standard error.
pub fn run_command(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn dispatch(command: Command) -> Result<()> {
    match command {
        Command::Ingest(o) => cmd_ingest(&o.resolve()?),
        Command::BuildGraphs(o) => cmd_build_graphs(&o.resolve()?),
        Command::ExportTokens(o) => cmd_export_tokens(&o.resolve()?),
        Command::Run(o) => cmd_run(&o.resolve()?),
        Command::Eval { results, output } => cmd_eval(&results, output.as_deref()),
        Command::GridSearch(o) => cmd_grid_search(&o.resolve()?),
        Command::InjectGoldenEval(o) => cmd_inject_golden(&o.resolve()?),
    }
}

fn require<'a>(value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path> {
    value
        .as_deref()
        .ok_or_else(|| Error::InvalidArgument(format!("--{flag} is required")))
}

fn output_dir(cfg: &RunConfig) -> Result<&Path> {
    let dir = require(&cfg.output, "output")?;
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    Ok(dir)
}

fn print_json<T: Serialize>(value: &T) -> Result<()> {
    let text = serde_json::to_string_pretty(value)?;
    let mut out = std::io::stdout().lock();
    writeln!(out, "{text}").map_err(|e| Error::io("<stdout>", e))
}

struct Loaded {
    instances: Vec<QuestionInstance>,
    dropped: usize,
    stats: CorpusStats,
}

fn load_corpus(cfg: &RunConfig) -> Result<Loaded> {
    let report = ingest(require(&cfg.corpus, "corpus")?, cfg.max_tokens)?;
    let instances = ensure_labels(report.instances);
    let stats = compute_idf(&instances);
    Ok(Loaded {
        instances,
        dropped: report.dropped,
        stats,
    })
}

fn load_store(cfg: &RunConfig) -> Result<TripleStore> {
    load_triples(require(&cfg.triples, "triples")?, cfg.blocklist.as_deref())
}

fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}

fn evaluate(cfg: &RunConfig, loaded: &Loaded, store: &TripleStore) -> Result<Vec<Evaluated>> {
    let scorer_cfg = cfg.scorer_config();
    let scorer: Box<dyn AnswerScorer> = match cfg.scorer {
        ScorerKind::Lexical => Box::new(LexicalScorer { config: scorer_cfg }),
        ScorerKind::File => Box::new(FileScorer::load(
            require(&cfg.scorer_path, "scorer-path")?,
            &loaded.instances,
            &scorer_cfg,
        )?),
    };
    let engine = Engine {
        store,
        stats: &loaded.stats,
        scorer: scorer.as_ref(),
        t1: cfg.t1,
        t2: cfg.t2,
        fusion: cfg.fusion(),
    };
    with_threads(cfg.threads, || engine.evaluate_all(&loaded.instances))?
}

#[derive(Serialize)]
struct IngestSummary {
    questions: usize,
    dropped: usize,
    labeled: usize,
    documents: usize,
    tokens: usize,
    vocabulary: usize,
}

fn cmd_ingest(cfg: &RunConfig) -> Result<()> {
    let loaded = load_corpus(cfg)?;
    let summary = IngestSummary {
        questions: loaded.instances.len(),
        dropped: loaded.dropped,
        labeled: loaded.instances.iter().filter(|i| i.golden_doc_index.is_some()).count(),
        documents: loaded.stats.doc_count,
        tokens: loaded.instances.iter().map(QuestionInstance::total_tokens).sum(),
        vocabulary: loaded.stats.idf.len(),
    };
    print_json(&summary)
}

fn cmd_build_graphs(cfg: &RunConfig) -> Result<()> {
    let loaded = load_corpus(cfg)?;
    let store = load_store(cfg)?;
    let dir = output_dir(cfg)?;
    let records = with_threads(cfg.threads, || {
        use rayon::prelude::*;
        loaded
            .instances
            .par_iter()
            .map(|inst| {
                LinkGraphs::build(inst, &store, &loaded.stats, cfg.t1, cfg.t2).to_record(&inst.question_id)
            })
            .collect::<Vec<_>>()
    })?;
    write_jsonl(&dir.join("graphs.jsonl"), &records)
}

fn cmd_export_tokens(cfg: &RunConfig) -> Result<()> {
    let loaded = load_corpus(cfg)?;
    let dir = output_dir(cfg)?;
    write_jsonl(&dir.join("tokens.jsonl"), loaded.instances.iter().map(TokenRecord::from))
}

fn write_effective_config(dir: &Path, cfg: &RunConfig) -> Result<()> {
    let path = dir.join("effective_config.txt");
    fs::write(&path, cfg.to_kv_string()).map_err(|e| Error::io(path, e))
}

fn cmd_run(cfg: &RunConfig) -> Result<()> {
    let loaded = load_corpus(cfg)?;
    let store = load_store(cfg)?;
    let dir = output_dir(cfg)?;
    let evaluated = evaluate(cfg, &loaded, &store)?;

    let results: Vec<QuestionResult> = loaded
        .instances
        .iter()
        .zip(&evaluated)
        .map(|(inst, ev)| QuestionResult::new(inst, ev))
        .collect();
    let reports = loaded
        .instances
        .iter()
        .zip(&evaluated)
        .filter(|(inst, _)| inst.golden_doc_index.is_some())
        .map(|(inst, ev)| losses(&ev.bundle, inst, &ev.outputs))
        .collect::<Result<Vec<_>>>()?;

    let mut summary: RunSummary = evaluate_results(&results)?;
    summary.weights = Some(cfg.weights);
    summary.wq = Some(cfg.wq);
    summary.wd = Some(cfg.wd);
    summary.losses = Some(LossSummary::from_reports(&reports));

    write_jsonl(&dir.join("results.jsonl"), &results)?;
    write_json(&dir.join("summary.json"), &summary)?;
    write_effective_config(dir, cfg)?;
    print_json(&summary)
}

fn cmd_eval(results: &Path, output: Option<&Path>) -> Result<()> {
    let records: Vec<QuestionResult> = read_jsonl(results)?;
    let summary = evaluate_results(&records)?;
    if let Some(dir) = output {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_json(&dir.join("eval_summary.json"), &summary)?;
    }
    print_json(&summary)
}

#[derive(Serialize)]
struct GridEntry {
    weights: Weights,
    mean_f1: f64,
}

#[derive(Serialize)]
struct GridReport {
    best: Weights,
    entries: Vec<GridEntry>,
}

fn cmd_grid_search(cfg: &RunConfig) -> Result<()> {
    let loaded = load_corpus(cfg)?;
    let store = load_store(cfg)?;
    let evaluated = evaluate(cfg, &loaded, &store)?;
    let best = grid_search(&loaded.instances, &evaluated, &cfg.grid)?;
    let entries = grid_triples(&cfg.grid)
        .into_iter()
        .map(|w| GridEntry {
            weights: w,
            mean_f1: mean_f1(&loaded.instances, &evaluated, w),
        })
        .collect();
    let report = GridReport { best, entries };
    if let Some(dir) = &cfg.output {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_json(&dir.join("grid_search.json"), &report)?;
        write_effective_config(dir, cfg)?;
    }
    print_json(&report)
}

fn cmd_inject_golden(cfg: &RunConfig) -> Result<()> {
    let loaded = load_corpus(cfg)?;
    let store = load_store(cfg)?;
    let evaluated = evaluate(cfg, &loaded, &store)?;
    let report = golden_doc_eval(&loaded.instances, &evaluated, cfg.golden_n)?;
    if let Some(dir) = &cfg.output {
        fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write_json(&dir.join("golden_doc.json"), &report)?;
        write_effective_config(dir, cfg)?;
    }
    print_json(&report)
}
