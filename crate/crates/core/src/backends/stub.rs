//! Deterministic rule-based QG/QA provider.
//!
//! Question generation substitutes a wh-word for the target span and
//! keeps the remaining sentence tokens within a configurable context
//! window, so question length (and with it the chance of copying other
//! summary tokens) is controllable. Question answering returns the
//! context NP/NE span best supported by the question's content tokens,
//! or unanswerable when the question presupposes a content token the
//! context does not contain.

use std::cmp::Reverse;
use std::collections::BTreeMap;
use std::collections::HashSet;

use crate::annotate::{heuristic_pos, Annotator, CandidateSpan, RuleAnnotator, SpanKind};
use crate::backends::{Answer, Provenance, Question, QuestionAnswerer, QuestionGenerator};
use crate::error::Result;
use crate::text;

const LOCATIVE_PREPOSITIONS: &[&str] = &["in", "at", "to", "near", "from"];

#[derive(Debug, Clone)]
pub struct StubBackend {
    questions_per_span: usize,
    context_window: Option<usize>,
    answerability_threshold: f64,
}

impl StubBackend {
    pub fn new(
        questions_per_span: usize,
        context_window: Option<usize>,
        answerability_threshold: f64,
    ) -> Self {
        StubBackend {
            questions_per_span: questions_per_span.max(1),
            context_window,
            answerability_threshold,
        }
    }

    /// Window for question variant `i`. Variant 0 uses the configured
    /// window; later variants shrink it so multi-question configs get
    /// questions of different lengths.
    fn variant_window(&self, i: usize) -> Option<usize> {
        match self.context_window {
            Some(w) => Some(w.saturating_sub(i)),
            None => {
                if i == 0 {
                    None
                } else {
                    Some(4usize.saturating_sub(i.min(3)).max(1))
                }
            }
        }
    }
}

fn looks_like_year(text: &str) -> bool {
    text.len() == 4 && text.chars().all(|c| c.is_ascii_digit())
}

fn wh_word(span: &CandidateSpan, prev_word: Option<&str>) -> &'static str {
    let first = span.text.split_whitespace().next().unwrap_or("");
    if first.chars().next().is_some_and(|c| c.is_ascii_digit()) {
        return if looks_like_year(first) { "When" } else { "How many" };
    }
    if span.kind == SpanKind::NE {
        let locative = prev_word
            .map(|w| LOCATIVE_PREPOSITIONS.contains(&w.to_lowercase().as_str()))
            .unwrap_or(false);
        return if locative { "Where" } else { "Who" };
    }
    "What"
}

/// Content words of a question, skipping the wh prefix and function
/// words. These are the tokens a QA model treats as presuppositions.
fn question_content_tokens(question_text: &str) -> Vec<String> {
    let ws: Vec<&str> = question_text.split_whitespace().collect();
    let skip = if question_text.starts_with("How many") { 2 } else { 1 };
    ws.iter()
        .skip(skip)
        .filter(|w| heuristic_pos(w).is_content())
        .map(|w| text::normalize_word(w))
        .filter(|w| !w.is_empty())
        .collect()
}

impl QuestionGenerator for StubBackend {
    fn provider_id(&self) -> &str {
        "stub"
    }

    fn generate(&self, span: &CandidateSpan, summary_context: &str) -> Result<Vec<Question>> {
        let (sent_start, sent_end) = text::sentence_containing(summary_context, span.start);
        let sentence = &summary_context[sent_start..sent_end];
        let sent_words = text::words(sentence);
        // word indices overlapping the span, relative to the sentence
        let rel_start = span.start - sent_start;
        let rel_end = span.end - sent_start;
        let span_idx: Vec<usize> = sent_words
            .iter()
            .enumerate()
            .filter(|(_, w)| w.start < rel_end && rel_start < w.end)
            .map(|(i, _)| i)
            .collect();
        let (lo, hi) = match (span_idx.first(), span_idx.last()) {
            (Some(&lo), Some(&hi)) => (lo, hi),
            _ => (0, 0),
        };
        let prev_word = lo.checked_sub(1).map(|i| sent_words[i].text.as_str());
        let wh = wh_word(span, prev_word);

        let mut questions = Vec::with_capacity(self.questions_per_span);
        for i in 0..self.questions_per_span {
            let window = self.variant_window(i);
            let mut parts = vec![wh.to_string()];
            for (j, w) in sent_words.iter().enumerate() {
                if (lo..=hi).contains(&j) {
                    continue;
                }
                if let Some(win) = window {
                    let dist = if j < lo { lo - j } else { j - hi };
                    if dist > win {
                        continue;
                    }
                }
                if heuristic_pos(&w.text) == crate::corpus::PosTag::Punctuation {
                    continue;
                }
                parts.push(w.text.clone());
            }
            parts.push("?".to_string());
            questions.push(Question {
                question_id: format!("{}#q{}", span.span_id, i),
                text: parts.join(" "),
                target_span_id: span.span_id.clone(),
                provenance: Provenance::Stub,
            });
        }
        Ok(questions)
    }
}

impl QuestionAnswerer for StubBackend {
    fn provider_id(&self) -> &str {
        "stub"
    }

    fn answer(&self, question: &Question, context: &str) -> Result<Answer> {
        let content = question_content_tokens(&question.text);
        let ctx_words: HashSet<String> = text::normalized_words(context).into_iter().collect();
        // presupposition check: a content token absent from the context
        // makes the question unanswerable
        if content.iter().any(|t| !ctx_words.contains(t)) {
            return Ok(Answer::unanswerable());
        }
        let question_words: HashSet<String> =
            text::normalized_words(&question.text).into_iter().collect();

        // candidate spans of the context, exact duplicates merged
        let raw = RuleAnnotator.spans("", context)?;
        let mut by_range: BTreeMap<(usize, usize), SpanKind> = BTreeMap::new();
        for s in raw {
            by_range
                .entry((s.start, s.end))
                .and_modify(|k| {
                    if s.kind == SpanKind::NE {
                        *k = SpanKind::NE;
                    }
                })
                .or_insert(s.kind);
        }

        let wants_number = question.text.starts_with("When") || question.text.starts_with("How many");
        let wants_entity = question.text.starts_with("Who") || question.text.starts_with("Where");

        let mut best: Option<((bool, usize, Reverse<usize>), (usize, usize))> = None;
        let mut best_overlap = 0usize;
        for (&(start, end), &kind) in &by_range {
            let span_text = &context[start..end];
            let span_words: Vec<String> = text::normalized_words(span_text);
            // skip spans fully contained in the question: they cannot
            // fill its gap
            if !span_words.is_empty() && span_words.iter().all(|w| question_words.contains(w)) {
                continue;
            }
            let (s, e) = text::sentence_containing(context, start);
            let sent_words: HashSet<String> =
                text::normalized_words(&context[s..e]).into_iter().collect();
            let overlap = content.iter().filter(|t| sent_words.contains(*t)).count();
            let kind_pref = if wants_number {
                span_text.chars().any(|c| c.is_ascii_digit())
            } else if wants_entity {
                kind == SpanKind::NE
            } else {
                true
            };
            let key = (kind_pref, overlap, Reverse(start));
            if best.as_ref().map_or(true, |(k, _)| key > *k) {
                best = Some((key, (start, end)));
                best_overlap = overlap;
            }
        }

        let Some((_, (start, end))) = best else {
            return Ok(Answer::unanswerable());
        };
        let prob = if content.is_empty() {
            1.0
        } else {
            best_overlap as f64 / content.len() as f64
        };
        if prob < self.answerability_threshold {
            return Ok(Answer {
                text: String::new(),
                start: None,
                end: None,
                answerable_prob: prob,
                unanswerable: true,
            });
        }
        Ok(Answer {
            text: context[start..end].to_string(),
            start: Some(start),
            end: Some(end),
            answerable_prob: prob,
            unanswerable: false,
        })
    }
}
