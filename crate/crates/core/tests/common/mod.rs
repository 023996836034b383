#![allow(dead_code)]

pub mod oracle;
pub mod synth;

use std::collections::HashSet;

use kgqa::corpus::{Document, QuestionInstance};
use kgqa::kb::{Triple, TripleStore};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn toks(s: &str) -> Vec<String> {
    s.split_whitespace().map(str::to_string).collect()
}

pub fn instance(q: &str, docs: &[&str], golds: &[&str]) -> QuestionInstance {
    QuestionInstance {
        question_id: "q".into(),
        q_tokens: toks(q),
        documents: docs
            .iter()
            .enumerate()
            .map(|(i, d)| Document {
                doc_id: format!("d{i}"),
                tokens: toks(d),
                phrase_spans: None,
            })
            .collect(),
        gold_answers: golds.iter().map(|g| g.to_string()).collect(),
        golden_doc_index: None,
        golden_span: None,
    }
}

pub fn triple(s: &str, r: &str, o: &str) -> Triple {
    Triple {
        subject: s.into(),
        relation: r.into(),
        object: o.into(),
    }
}

pub fn store(triples: &[Triple]) -> TripleStore {
    TripleStore::new(triples.iter().cloned(), HashSet::new())
}

const WORDS: [&str; 8] = ["ant", "bee", "cat", "dog", "eel", "fox", "gnu", "hen"];
pub const RELATIONS: [&str; 3] = ["/r/IsA", "/r/RelatedTo", "/r/Antonym"];

/// A random instance with at most 5 documents of at most 20 tokens over a
/// small vocabulary, and at most 15 triples over one- and two-word phrases.
pub fn random_case<R: Rng>(rng: &mut R) -> (QuestionInstance, Vec<Triple>) {
    let word = |rng: &mut R| WORDS.choose(rng).unwrap().to_string();
    let n_docs = rng.gen_range(1..=5);
    let documents = (0..n_docs)
        .map(|i| Document {
            doc_id: format!("d{i}"),
            tokens: (0..rng.gen_range(1..=20)).map(|_| word(rng)).collect(),
            phrase_spans: None,
        })
        .collect();
    let q_tokens = (0..rng.gen_range(1..=6)).map(|_| word(rng)).collect();
    let phrase = |rng: &mut R| {
        if rng.gen_bool(0.25) {
            format!("{} {}", word(rng), word(rng))
        } else {
            word(rng)
        }
    };
    let triples = (0..rng.gen_range(0..=15))
        .map(|_| Triple {
            subject: phrase(rng),
            relation: RELATIONS[rng.gen_range(0..2)].to_string(),
            object: phrase(rng),
        })
        .collect();
    (
        QuestionInstance {
            question_id: "rand".into(),
            q_tokens,
            documents,
            gold_answers: vec![],
            golden_doc_index: None,
            golden_span: None,
        },
        triples,
    )
}
