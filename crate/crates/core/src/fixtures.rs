//! Deterministic synthetic corpus with planted factuality errors, used
//! by the integration tests, the benchmarks, and the CLI fixtures.
//!
//! The corpus mixes fully factual pairs, pairs with extrinsic errors
//! (entities absent from the document), intrinsic errors (entities
//! present but misattributed), a world-knowledge error, and two
//! adversarial pairs: one whose planted quantity makes questions
//! unanswerable against the document, and one with two structurally
//! identical sentences that makes short questions ambiguous.

use std::path::Path;

use crate::annotate::{extract_candidate_spans, CandidateSpan, ReplayAnnotator, RuleAnnotator};
use crate::backends::stub::StubBackend;
use crate::backends::QuestionGenerator;
use crate::corpus::{save_dataset, AnnotatedPair, Dataset, ErrorType, PosTag, Token};
use crate::error::{Error, Result};
use crate::humanqg::{Bucket, HumanQuestionRecord};

struct Wd {
    text: String,
    pos: PosTag,
    error: ErrorType,
}

fn w(text: impl Into<String>, pos: PosTag) -> Wd {
    Wd {
        text: text.into(),
        pos,
        error: ErrorType::None,
    }
}

fn bad(text: impl Into<String>, pos: PosTag, error: ErrorType) -> Wd {
    Wd {
        text: text.into(),
        pos,
        error,
    }
}

fn build_pair(pair_id: &str, document: &str, words: Vec<Wd>) -> AnnotatedPair {
    let mut summary = String::new();
    let mut tokens = Vec::new();
    for word in &words {
        if !summary.is_empty() {
            summary.push(' ');
        }
        let start = summary.len();
        summary.push_str(&word.text);
        tokens.push(Token {
            text: word.text.clone(),
            start,
            end: summary.len(),
            pos: word.pos,
            label: u8::from(word.error == ErrorType::None),
            error_type: word.error,
        });
    }
    AnnotatedPair {
        pair_id: pair_id.to_string(),
        dataset_name: "fixture".to_string(),
        model_name: "fixture-model".to_string(),
        document: document.to_string(),
        summary,
        tokens,
    }
}

const NAMES: [&str; 8] = [
    "Alice", "Bruno", "Clara", "Derek", "Elena", "Felix", "Greta", "Hugo",
];
const CITIES: [&str; 8] = [
    "Paris", "Berlin", "Madrid", "Vienna", "Lisbon", "Dublin", "Prague", "Warsaw",
];
const WRONG_CITIES: [&str; 8] = [
    "Oslo", "Cairo", "Quito", "Hanoi", "Lagos", "Perth", "Turin", "Osaka",
];

/// 24 pairs: 8 fully factual, 8 with an extrinsic city, 4 with an
/// intrinsic city swap, 1 world-knowledge, 1 unanswerable-quantity,
/// 1 ambiguous two-sentence, 1 mixed intrinsic + extrinsic.
pub fn fixture_dataset() -> Dataset {
    let mut pairs = Vec::new();
    for i in 0..8 {
        let year = format!("{}", 2010 + i);
        pairs.push(build_pair(
            &format!("fx-f{i}"),
            &format!(
                "{} visited {} in {} . The mayor welcomed {} warmly .",
                NAMES[i], CITIES[i], year, NAMES[i]
            ),
            vec![
                w(NAMES[i], PosTag::ProperNoun),
                w("visited", PosTag::Verb),
                w(CITIES[i], PosTag::ProperNoun),
                w("in", PosTag::Adposition),
                w(year, PosTag::Number),
                w(".", PosTag::Punctuation),
            ],
        ));
    }
    for i in 0..8 {
        let year = format!("{}", 2010 + i);
        pairs.push(build_pair(
            &format!("fx-e{i}"),
            &format!("{} visited {} in {} .", NAMES[i], CITIES[i], year),
            vec![
                w(NAMES[i], PosTag::ProperNoun),
                w("visited", PosTag::Verb),
                bad(WRONG_CITIES[i], PosTag::ProperNoun, ErrorType::Extrinsic),
                w("in", PosTag::Adposition),
                w(year, PosTag::Number),
                w(".", PosTag::Punctuation),
            ],
        ));
    }
    for i in 0..4 {
        let (a, b) = (NAMES[2 * i], NAMES[2 * i + 1]);
        let (ca, cb) = (CITIES[2 * i], CITIES[2 * i + 1]);
        pairs.push(build_pair(
            &format!("fx-i{i}"),
            &format!("{a} flew to {ca} and {b} flew to {cb} ."),
            vec![
                w(a, PosTag::ProperNoun),
                w("flew", PosTag::Verb),
                w("to", PosTag::Adposition),
                bad(cb, PosTag::ProperNoun, ErrorType::Intrinsic),
                w(".", PosTag::Punctuation),
            ],
        ));
    }
    pairs.push(build_pair(
        "fx-w0",
        "The summit was held in Geneva .",
        vec![
            w("The", PosTag::Other),
            w("summit", PosTag::Noun),
            w("was", PosTag::Auxiliary),
            w("held", PosTag::Verb),
            w("in", PosTag::Adposition),
            bad("Switzerland", PosTag::ProperNoun, ErrorType::WorldKnowledge),
            w(".", PosTag::Punctuation),
        ],
    ));
    pairs.push(build_pair(
        "fx-m0",
        "I have been collecting matchbox labels since I was a child .",
        vec![
            w("I", PosTag::Pronoun),
            w("have", PosTag::Auxiliary),
            w("been", PosTag::Auxiliary),
            w("collecting", PosTag::Verb),
            w("matchbox", PosTag::Noun),
            w("labels", PosTag::Noun),
            w("for", PosTag::Adposition),
            bad("15", PosTag::Number, ErrorType::Extrinsic),
            bad("years", PosTag::Noun, ErrorType::Extrinsic),
            w(".", PosTag::Punctuation),
        ],
    ));
    pairs.push(build_pair(
        "fx-a0",
        "Rita praised Malta . Nina praised Tonga .",
        vec![
            w("Rita", PosTag::ProperNoun),
            w("praised", PosTag::Verb),
            w("Malta", PosTag::ProperNoun),
            w(".", PosTag::Punctuation),
            w("Nina", PosTag::ProperNoun),
            w("praised", PosTag::Verb),
            w("Tonga", PosTag::ProperNoun),
            w(".", PosTag::Punctuation),
        ],
    ));
    pairs.push(build_pair(
        "fx-x0",
        "Omar signed the treaty in Geneva , and Paula signed the accord in 2015 .",
        vec![
            bad("Paula", PosTag::ProperNoun, ErrorType::Intrinsic),
            w("signed", PosTag::Verb),
            w("the", PosTag::Other),
            w("treaty", PosTag::Noun),
            w("in", PosTag::Adposition),
            bad("Rome", PosTag::ProperNoun, ErrorType::Extrinsic),
            w(".", PosTag::Punctuation),
        ],
    ));
    Dataset {
        name: "fixture".into(),
        pairs,
    }
}

/// Candidate spans for every fixture pair, from the rule annotator,
/// aligned by index with `dataset.pairs`.
pub fn fixture_spans(dataset: &Dataset) -> Result<Vec<Vec<CandidateSpan>>> {
    let annotator = RuleAnnotator::new();
    dataset
        .pairs
        .iter()
        .map(|pair| extract_candidate_spans(pair, &annotator))
        .collect()
}

/// Human question records for the factual and extrinsic-error pairs:
/// per candidate span, a window-1 question as shortest, window-2/3
/// questions as intermediates, and the full-context question as
/// longest. Longer questions are token supersets of shorter ones, so
/// inherited-error counts are monotone across buckets by construction.
/// One span of fx-f0 is marked discarded.
pub fn fixture_human_records(dataset: &Dataset) -> Result<Vec<HumanQuestionRecord>> {
    let annotator = RuleAnnotator::new();
    let mut records = Vec::new();
    for pair in &dataset.pairs {
        if !pair.pair_id.starts_with("fx-f") && !pair.pair_id.starts_with("fx-e") {
            continue;
        }
        for span in extract_candidate_spans(pair, &annotator)? {
            let mut push = |bucket: Bucket, window: Option<usize>| -> Result<()> {
                let qg = StubBackend::new(1, window, 0.5);
                let question = qg
                    .generate(&span, &pair.summary)?
                    .into_iter()
                    .next()
                    .ok_or_else(|| Error::Backend("stub generated no question".into()))?;
                records.push(HumanQuestionRecord {
                    pair_id: pair.pair_id.clone(),
                    span_id: span.span_id.clone(),
                    bucket: Some(bucket),
                    question: Some(question.text),
                    discarded: false,
                });
                Ok(())
            };
            push(Bucket::Shortest, Some(1))?;
            push(Bucket::Intermediate, Some(2))?;
            push(Bucket::Intermediate, Some(3))?;
            push(Bucket::Longest, None)?;
        }
    }
    // a span the annotator judged invalid: bare preposition in fx-f0
    let f0 = dataset.pair("fx-f0")?;
    let start = f0.summary.find(" in ").expect("fixture text") + 1;
    records.push(HumanQuestionRecord {
        pair_id: "fx-f0".into(),
        span_id: format!("fx-f0:{start}-{}", start + 2),
        bucket: None,
        question: None,
        discarded: true,
    });
    Ok(records)
}

/// Write the fixture corpus to disk in the formats the CLI consumes:
/// dataset.jsonl, annotations.jsonl, human_questions.jsonl.
pub fn write_fixture_files(dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
    let dataset = fixture_dataset();
    save_dataset(&dataset, dir.join("dataset.jsonl"))?;
    let cache = ReplayAnnotator::record(&dataset, &RuleAnnotator::new())?;
    cache.save(dir.join("annotations.jsonl"))?;
    let mut out = String::new();
    for rec in fixture_human_records(&dataset)? {
        out.push_str(&serde_json::to_string(&rec).expect("record serializes"));
        out.push('\n');
    }
    let path = dir.join("human_questions.jsonl");
    std::fs::write(&path, out).map_err(|e| Error::io(path.display().to_string(), e))?;
    Ok(())
}
