//! Test-only builders for annotated pairs.

use crate::corpus::{AnnotatedPair, ErrorType, PosTag, Token};

/// Word spec: text + POS + error type, offsets computed on join.
#[derive(Debug, Clone)]
pub struct W {
    pub text: &'static str,
    pub pos: PosTag,
    pub error: ErrorType,
}

impl W {
    fn new(text: &'static str, pos: PosTag) -> Self {
        W {
            text,
            pos,
            error: ErrorType::None,
        }
    }
    pub fn noun(text: &'static str) -> Self {
        W::new(text, PosTag::Noun)
    }
    pub fn propn(text: &'static str) -> Self {
        W::new(text, PosTag::ProperNoun)
    }
    pub fn verb(text: &'static str) -> Self {
        W::new(text, PosTag::Verb)
    }
    pub fn num(text: &'static str) -> Self {
        W::new(text, PosTag::Number)
    }
    pub fn adj(text: &'static str) -> Self {
        W::new(text, PosTag::Adjective)
    }
    pub fn pron(text: &'static str) -> Self {
        W::new(text, PosTag::Pronoun)
    }
    pub fn adp(text: &'static str) -> Self {
        W::new(text, PosTag::Adposition)
    }
    pub fn aux(text: &'static str) -> Self {
        W::new(text, PosTag::Auxiliary)
    }
    pub fn punct(text: &'static str) -> Self {
        W::new(text, PosTag::Punctuation)
    }
    pub fn extrinsic(mut self) -> Self {
        self.error = ErrorType::Extrinsic;
        self
    }
    pub fn intrinsic(mut self) -> Self {
        self.error = ErrorType::Intrinsic;
        self
    }
    pub fn world(mut self) -> Self {
        self.error = ErrorType::WorldKnowledge;
        self
    }
}

/// Build a pair whose summary is the space-join of the given words.
pub fn pair_from_words(pair_id: &str, document: &str, words: &[W]) -> AnnotatedPair {
    let mut summary = String::new();
    let mut tokens = Vec::new();
    for w in words {
        if !summary.is_empty() {
            summary.push(' ');
        }
        let start = summary.len();
        summary.push_str(w.text);
        tokens.push(Token {
            text: w.text.to_string(),
            start,
            end: summary.len(),
            pos: w.pos,
            label: u8::from(w.error == ErrorType::None),
            error_type: w.error,
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
