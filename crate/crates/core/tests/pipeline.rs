mod common;

use std::path::{Path, PathBuf};

use common::instance;
use kgqa::corpus::{compute_idf, ensure_labels, ingest, GoldenSpan, QuestionInstance};
use kgqa::graph::LinkGraphs;
use kgqa::io::write_jsonl;
use kgqa::kb::load_triples;
use kgqa::pipeline::{
    answer, golden_doc_eval, inject_golden, losses, search_weights, sigmoid, Engine, Evaluated,
    FusionConfig, LossSummary, Weights,
};
use kgqa::scorer::{FileScorer, LexicalScorer, ScorerConfig, ScorerOutput, ScorerRecord};
use kgqa::Error;

fn toy_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data/toy")
}

fn point_output(s2: f64, s3: f64, s3_qmasked: f64) -> ScorerOutput {
    ScorerOutput {
        p_start: vec![1.0],
        p_end: vec![1.0],
        alpha: vec![1.0],
        beta: vec![1.0],
        span: (0, 0),
        s2,
        s3,
        s3_qmasked,
    }
}

/// Two one-token documents: the reader favors the wrong one, the reranker
/// the right one.
fn split_case() -> (Vec<QuestionInstance>, Vec<Evaluated>) {
    let inst = instance("x", &["paris", "london"], &["Paris"]);
    let stats = compute_idf(std::slice::from_ref(&inst));
    let graphs = LinkGraphs::empty(&inst);
    let outputs = vec![point_output(0.1, 0.9, 0.0), point_output(0.9, 0.1, 0.0)];
    let bundle = answer(&inst, &graphs, &outputs, &stats, &FusionConfig::default()).unwrap();
    let ev = Evaluated { graphs, outputs, bundle };
    (vec![inst], vec![ev])
}

#[test]
fn weight_search_single_candidate() {
    let (insts, evs) = split_case();
    let w = Weights::new(0.5, 1.0, 0.2);
    assert_eq!(search_weights(&insts, &evs, &[w]).unwrap(), w);
    assert!(search_weights(&insts, &evs, &[]).is_err());
}

#[test]
fn weight_search_prefers_dominant_triple() {
    let (insts, evs) = split_case();
    let good = Weights::new(1.0, 0.2, 1.0);
    let bad = Weights::new(0.2, 1.0, 0.2);
    assert_eq!(search_weights(&insts, &evs, &[bad, good]).unwrap(), good);
    assert_eq!(search_weights(&insts, &evs, &[good, bad]).unwrap(), good);
}

#[test]
fn weight_search_ties_go_to_smallest_triple() {
    let (insts, evs) = split_case();
    // Both pick "paris": the first through the reranker, the second through
    // an exact tie broken toward document 0.
    let a = Weights::new(1.0, 0.5, 0.5);
    let b = Weights::new(1.0, 0.2, 1.0);
    assert_eq!(search_weights(&insts, &evs, &[a, b]).unwrap(), b);
    let grid = kgqa::pipeline::grid_search(&insts, &evs, &[0.2, 0.5, 1.0]).unwrap();
    assert_eq!(grid, Weights::new(0.2, 0.2, 0.2));
}

#[test]
fn single_candidate_losses_in_closed_form() {
    let mut inst = instance("paris", &["paris"], &["Paris"]);
    inst.golden_doc_index = Some(0);
    inst.golden_span = Some(GoldenSpan { doc: 0, start: 0, end: 0 });
    let stats = compute_idf(std::slice::from_ref(&inst));
    let graphs = LinkGraphs::empty(&inst);
    let outputs = vec![point_output(1.0, 0.4, 0.0)];
    let bundle = answer(&inst, &graphs, &outputs, &stats, &FusionConfig::default()).unwrap();
    let r = losses(&bundle, &inst, &outputs).unwrap();
    assert!((r.l1 - (sigmoid(1.0) - 1.0).powi(2)).abs() < 1e-12);
    assert_eq!(r.l2, Some(0.0));
    assert!((r.l3 - (sigmoid(0.4) - 1.0).powi(2)).abs() < 1e-12);
    assert!((r.total - (r.l1 + r.l3)).abs() < 1e-12);

    let mut unspanned = inst.clone();
    unspanned.golden_span = None;
    let r2 = losses(&bundle, &unspanned, &outputs).unwrap();
    assert_eq!(r2.l2, None);
    assert_eq!(r2.total, r.l1 + r.l3);

    let summary = LossSummary::from_reports([&r, &r2]);
    assert_eq!(summary.questions, 2);
    assert_eq!(summary.l2_questions, 1);
    assert_eq!(summary.l2, 0.0);

    let mut unlabeled = inst;
    unlabeled.golden_doc_index = None;
    assert!(losses(&bundle, &unlabeled, &outputs).is_err());
}

struct Toy {
    instances: Vec<QuestionInstance>,
    stats: kgqa::corpus::CorpusStats,
    store: kgqa::kb::TripleStore,
}

fn toy() -> Toy {
    let instances = ensure_labels(ingest(toy_dir().join("corpus.jsonl"), 8000).unwrap().instances);
    let stats = compute_idf(&instances);
    let store = load_triples(toy_dir().join("triples.tsv"), Some(&toy_dir().join("blocklist.txt"))).unwrap();
    Toy { instances, stats, store }
}

fn evaluate(t: &Toy, scorer: &dyn kgqa::scorer::AnswerScorer) -> kgqa::Result<Vec<Evaluated>> {
    Engine {
        store: &t.store,
        stats: &t.stats,
        scorer,
        t1: 5,
        t2: 30,
        fusion: FusionConfig::default(),
    }
    .evaluate_all(&t.instances)
}

fn records(t: &Toy, evs: &[Evaluated]) -> Vec<ScorerRecord> {
    t.instances
        .iter()
        .zip(evs)
        .flat_map(|(inst, ev)| {
            inst.documents
                .iter()
                .zip(&ev.outputs)
                .map(|(d, o)| ScorerRecord::from_output(&inst.question_id, &d.doc_id, o))
                .collect::<Vec<_>>()
        })
        .collect()
}

#[test]
fn scorer_file_round_trip_reproduces_lexical_results() {
    let t = toy();
    let lexical = evaluate(&t, &LexicalScorer::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scores.jsonl");
    write_jsonl(&path, records(&t, &lexical)).unwrap();

    let file = FileScorer::load(&path, &t.instances, &ScorerConfig::default()).unwrap();
    let replayed = evaluate(&t, &file).unwrap();
    for (a, b) in lexical.iter().zip(&replayed) {
        assert_eq!(a.outputs, b.outputs);
        assert_eq!(a.bundle, b.bundle);
    }
}

#[test]
fn scorer_file_missing_pair_is_named() {
    let t = toy();
    let lexical = evaluate(&t, &LexicalScorer::default()).unwrap();
    let mut recs = records(&t, &lexical);
    let dropped = recs.remove(7);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scores.jsonl");
    write_jsonl(&path, recs).unwrap();
    match FileScorer::load(&path, &t.instances, &ScorerConfig::default()) {
        Err(Error::MissingScorerOutputs { missing, .. }) => {
            assert_eq!(missing, vec![(dropped.question_id, dropped.doc_id)]);
        }
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn scorer_file_rejects_inconsistent_records() {
    let t = toy();
    let lexical = evaluate(&t, &LexicalScorer::default()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("scores.jsonl");

    let mut recs = records(&t, &lexical);
    let (l, m) = recs[0].span;
    recs[0].span = if m + 1 < recs[0].p_start.len() { (l, m + 1) } else { (l + 1, m) };
    write_jsonl(&path, recs).unwrap();
    assert!(matches!(
        FileScorer::load(&path, &t.instances, &ScorerConfig::default()),
        Err(Error::InvalidScorerRecord { .. })
    ));

    let mut recs = records(&t, &lexical);
    recs[3].alpha[0] += 0.01;
    write_jsonl(&path, recs).unwrap();
    assert!(FileScorer::load(&path, &t.instances, &ScorerConfig::default()).is_err());

    let mut recs = records(&t, &lexical);
    recs[5].beta.pop();
    write_jsonl(&path, recs).unwrap();
    assert!(FileScorer::load(&path, &t.instances, &ScorerConfig::default()).is_err());
}

#[test]
fn injection_always_places_golden_in_top_n() {
    let t = toy();
    let evs = evaluate(&t, &LexicalScorer::default()).unwrap();
    for n in 1..=5 {
        let report = golden_doc_eval(&t.instances, &evs, n).unwrap();
        assert_eq!(report.p_at_n_golden, 1.0);
        assert!(report.p_at_n <= 1.0);
        assert!(report.f1_all_answer >= report.f1_golden_doc);
        assert!(report.em_all_answer >= report.em_golden_doc);
    }
    for (inst, ev) in t.instances.iter().zip(&evs) {
        let ranking = ev.bundle.ranking();
        if let Some(r) = inject_golden(inst, &ranking, 2).unwrap() {
            let mut sorted = r.clone();
            sorted.sort();
            assert_eq!(sorted, (0..ranking.len()).collect::<Vec<_>>());
            assert!(r[..2].contains(&inst.golden_doc_index.unwrap()));
        }
    }
}

#[test]
fn parallel_evaluation_is_deterministic() {
    let t = toy();
    let a = evaluate(&t, &LexicalScorer::default()).unwrap();
    let b = evaluate(&t, &LexicalScorer::default()).unwrap();
    for (x, y) in a.iter().zip(&b) {
        assert_eq!(x.bundle, y.bundle);
        assert_eq!(x.graphs, y.graphs);
    }
}
