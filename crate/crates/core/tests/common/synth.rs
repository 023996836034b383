//! Synthetic corpus where every golden document is lexically weak but wired
//! by planted triples to the strongest distractor.
//!
//! Per question: one "hub" distractor sharing every topic word with the
//! question, three weak distractors sharing one topic word each, one
//! unrelated document, and the golden document, which shares no question
//! word but holds bridge words linked to the hub's anchor word and to a
//! question topic word.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub struct SynthCorpus {
    pub corpus_jsonl: String,
    pub triples_tsv: String,
}

fn filler<R: Rng>(rng: &mut R, n: usize) -> Vec<String> {
    (0..n).map(|_| format!("f{}", rng.gen_range(0..3000))).collect()
}

pub fn generate(questions: usize, seed: u64) -> SynthCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut corpus = String::new();
    let mut triples = String::new();
    for q in 0..questions {
        let topics: Vec<String> = (0..4).map(|t| format!("topic{q}x{t}")).collect();
        let anchor = format!("anchor{q}");
        let answer = format!("answer{q}");
        let bridges: Vec<String> = (0..rng.gen_range(2..=3)).map(|b| format!("bridge{q}x{b}")).collect();

        let mut docs: Vec<Vec<String>> = Vec::new();
        let mut hub = topics.clone();
        hub.push(anchor.clone());
        let n = rng.gen_range(1..=2);
        hub.extend(filler(&mut rng, n));
        docs.push(hub);
        for t in topics.iter().take(3) {
            let mut weak = vec![t.clone()];
            let n = rng.gen_range(6..=9);
            weak.extend(filler(&mut rng, n));
            docs.push(weak);
        }
        docs.push(filler(&mut rng, 6));
        let mut golden = bridges.clone();
        golden.push(answer.clone());
        docs.push(golden);

        let mut order: Vec<usize> = (0..docs.len()).collect();
        order.shuffle(&mut rng);
        let question = format!("which {} is it", topics.join(" "));
        let doc_json: Vec<String> = order
            .iter()
            .enumerate()
            .map(|(pos, &d)| {
                format!(
                    r#"{{"doc_id":"s{q}d{pos}","text":"{}"}}"#,
                    docs[d].join(" ")
                )
            })
            .collect();
        writeln!(
            corpus,
            r#"{{"question_id":"s{q}","question":"{question}","documents":[{}],"answers":["{answer}"]}}"#,
            doc_json.join(",")
        )
        .unwrap();

        for b in &bridges {
            writeln!(triples, "{b}\t/r/RelatedTo\t{anchor}").unwrap();
        }
        writeln!(triples, "{}\t/r/RelatedTo\t{}", bridges[0], topics[0]).unwrap();
    }
    SynthCorpus {
        corpus_jsonl: corpus,
        triples_tsv: triples,
    }
}

impl SynthCorpus {
    pub fn write(&self, dir: &Path) -> (std::path::PathBuf, std::path::PathBuf) {
        let corpus = dir.join("synth.jsonl");
        let triples = dir.join("synth.tsv");
        fs::write(&corpus, &self.corpus_jsonl).unwrap();
        fs::write(&triples, &self.triples_tsv).unwrap();
        (corpus, triples)
    }
}
