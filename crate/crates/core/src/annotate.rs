//! Candidate span extraction (noun phrases and named entities) and the
//! POS-filtered token selection used by the exact-match baseline.
//!
//! Annotation is behind the [`Annotator`] trait so that a live provider,
//! a deterministic rule-based provider, or a replay cache can back it.

use std::collections::BTreeMap;
use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::corpus::{derive_span_gold, AnnotatedPair, Dataset, PosTag, Token};
use crate::error::{Error, Result};
use crate::text;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SpanKind {
    NE,
    NP,
}

/// An NP/NE span in a summary with its derived gold label.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CandidateSpan {
    pub span_id: String,
    pub start: usize,
    pub end: usize,
    pub text: String,
    pub kind: SpanKind,
    /// 1 = factual; filled from the token-level gold annotations.
    pub gold_label: u8,
}

/// A raw span before gold-label attachment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSpan {
    pub start: usize,
    pub end: usize,
    pub kind: SpanKind,
}

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Capabilities {
    pub np_chunking: bool,
    pub ner: bool,
    pub pos_tagging: bool,
}

/// POS tag attached to a character range by an annotator.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct PosSpan {
    pub start: usize,
    pub end: usize,
    pub pos: PosTag,
}

pub trait Annotator {
    fn provider_id(&self) -> &str;
    fn capabilities(&self) -> Capabilities;
    /// NE and NP spans over `text`. `pair_id` keys replay lookups; live
    /// providers may ignore it.
    fn spans(&self, pair_id: &str, text: &str) -> Result<Vec<RawSpan>>;
    fn pos_tags(&self, pair_id: &str, text: &str) -> Result<Vec<PosSpan>>;
    /// Whether concurrent calls are safe; the harness serializes calls
    /// to providers that answer false.
    fn reentrant(&self) -> bool {
        true
    }
}

/// Exercise the declared capabilities on a smoke sentence. Providers are
/// expected to pass this at registration time.
pub fn verify_capabilities(annotator: &dyn Annotator) -> Result<()> {
    let caps = annotator.capabilities();
    let smoke = "Maria visited Boston in 2019 .";
    if caps.ner || caps.np_chunking {
        let spans = annotator.spans("__smoke__", smoke)?;
        if spans.is_empty() {
            return Err(Error::Annotator {
                provider: annotator.provider_id().to_string(),
                message: "declared span capability but produced no spans on smoke sentence".into(),
            });
        }
    }
    if caps.pos_tagging {
        let tags = annotator.pos_tags("__smoke__", smoke)?;
        if tags.is_empty() {
            return Err(Error::Annotator {
                provider: annotator.provider_id().to_string(),
                message: "declared pos_tagging but produced no tags on smoke sentence".into(),
            });
        }
    }
    Ok(())
}

/// Extract candidate spans for a pair: union of NE and NP spans, exact
/// duplicates merged (NE kind wins), ordered by start offset, gold labels
/// attached. Nested spans are all kept.
pub fn extract_candidate_spans(
    pair: &AnnotatedPair,
    annotator: &dyn Annotator,
) -> Result<Vec<CandidateSpan>> {
    let caps = annotator.capabilities();
    if !caps.np_chunking || !caps.ner {
        return Err(Error::Annotator {
            provider: annotator.provider_id().to_string(),
            message: "candidate extraction needs np_chunking and ner".into(),
        });
    }
    let raw = annotator.spans(&pair.pair_id, &pair.summary)?;
    // merge exact-duplicate offsets, NE wins
    let mut by_range: BTreeMap<(usize, usize), SpanKind> = BTreeMap::new();
    for span in raw {
        if span.start >= span.end || span.end > pair.summary.len() {
            return Err(Error::Annotator {
                provider: annotator.provider_id().to_string(),
                message: format!(
                    "span [{}, {}) out of range for pair {}",
                    span.start, span.end, pair.pair_id
                ),
            });
        }
        by_range
            .entry((span.start, span.end))
            .and_modify(|k| {
                if span.kind == SpanKind::NE {
                    *k = SpanKind::NE;
                }
            })
            .or_insert(span.kind);
    }
    let mut out = Vec::with_capacity(by_range.len());
    for ((start, end), kind) in by_range {
        let gold_label = derive_span_gold(start, end, pair)?;
        out.push(CandidateSpan {
            span_id: format!("{}:{}-{}", pair.pair_id, start, end),
            start,
            end,
            text: pair.summary[start..end].to_string(),
            kind,
            gold_label,
        });
    }
    out.sort_by_key(|s| (s.start, s.end));
    Ok(out)
}

/// Tokens with POS in {noun, proper-noun, number, adjective, pronoun},
/// in summary order. When some tokens lack a usable tag (POS `other`,
/// typical for converted releases without a POS column) and the
/// annotator can tag, annotator tags overlay the stored ones.
pub fn select_em_tokens<'a>(
    pair: &'a AnnotatedPair,
    annotator: Option<&dyn Annotator>,
) -> Result<Vec<&'a Token>> {
    let needs_tagging = pair.tokens.iter().all(|t| t.pos == PosTag::Other);
    let overlay: Option<Vec<PosSpan>> = match (needs_tagging, annotator) {
        (true, Some(ann)) if ann.capabilities().pos_tagging => {
            Some(ann.pos_tags(&pair.pair_id, &pair.summary)?)
        }
        (true, None) if !pair.tokens.is_empty() => {
            return Err(Error::Annotator {
                provider: "<none>".into(),
                message: format!("pair {} carries no POS tags and no tagger given", pair.pair_id),
            });
        }
        _ => None,
    };
    let effective_pos = |tok: &Token| -> PosTag {
        if let Some(tags) = &overlay {
            for tag in tags {
                if tok.overlaps(tag.start, tag.end) {
                    return tag.pos;
                }
            }
        }
        tok.pos
    };
    Ok(pair
        .tokens
        .iter()
        .filter(|t| effective_pos(t).is_em_selected())
        .collect())
}

// ---------------------------------------------------------------------
// Rule-based annotator
// ---------------------------------------------------------------------

const PRONOUNS: &[&str] = &[
    "i", "you", "he", "she", "it", "we", "they", "me", "him", "her", "us", "them", "his", "its",
    "their", "this", "that", "these", "those",
];
const ADPOSITIONS: &[&str] = &[
    "in", "on", "at", "by", "for", "with", "from", "to", "of", "over", "under", "near", "between",
    "after", "before", "during", "above", "into",
];
const AUXILIARIES: &[&str] = &[
    "is", "are", "was", "were", "be", "been", "being", "has", "have", "had", "will", "would",
    "can", "could", "may", "might", "do", "does", "did",
];
const PARTICLES: &[&str] = &["not", "n't", "'s"];
const DETERMINERS: &[&str] = &["a", "an", "the"];

pub(crate) fn heuristic_pos(word: &str) -> PosTag {
    let lower = word.to_lowercase();
    let trimmed = lower.trim_matches(|c: char| c.is_ascii_punctuation());
    if trimmed.is_empty() {
        return PosTag::Punctuation;
    }
    if trimmed.chars().any(|c| c.is_ascii_digit()) {
        return PosTag::Number;
    }
    if PRONOUNS.contains(&trimmed) {
        return PosTag::Pronoun;
    }
    if ADPOSITIONS.contains(&trimmed) {
        return PosTag::Adposition;
    }
    if AUXILIARIES.contains(&trimmed) {
        return PosTag::Auxiliary;
    }
    if PARTICLES.contains(&trimmed) {
        return PosTag::Particle;
    }
    if DETERMINERS.contains(&trimmed) {
        return PosTag::Other;
    }
    if word.chars().next().is_some_and(|c| c.is_uppercase()) {
        return PosTag::ProperNoun;
    }
    if trimmed.ends_with("ed") || trimmed.ends_with("ing") {
        return PosTag::Verb;
    }
    PosTag::Noun
}

/// Deterministic heuristic NP/NE extractor and POS tagger. Capitalized
/// runs and numbers become NEs; noun/adjective runs become NPs. Meant
/// for desk-scale fixtures and for contexts without annotations, not as
/// a replacement for a real linguistic provider.
#[derive(Debug, Default, Clone)]
pub struct RuleAnnotator;

impl RuleAnnotator {
    pub fn new() -> Self {
        RuleAnnotator
    }
}

impl Annotator for RuleAnnotator {
    fn provider_id(&self) -> &str {
        "rule"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            np_chunking: true,
            ner: true,
            pos_tagging: true,
        }
    }

    fn spans(&self, _pair_id: &str, text: &str) -> Result<Vec<RawSpan>> {
        let words = text::words(text);
        let tags: Vec<PosTag> = words.iter().map(|w| heuristic_pos(&w.text)).collect();
        let mut spans = Vec::new();
        // NE: maximal runs of proper nouns; standalone numbers
        let mut i = 0;
        while i < words.len() {
            match tags[i] {
                PosTag::ProperNoun => {
                    let mut j = i;
                    while j + 1 < words.len() && tags[j + 1] == PosTag::ProperNoun {
                        j += 1;
                    }
                    spans.push(RawSpan {
                        start: words[i].start,
                        end: words[j].end,
                        kind: SpanKind::NE,
                    });
                    i = j + 1;
                }
                PosTag::Number => {
                    spans.push(RawSpan {
                        start: words[i].start,
                        end: words[i].end,
                        kind: SpanKind::NE,
                    });
                    i += 1;
                }
                _ => i += 1,
            }
        }
        // NP: runs of adjective/noun/number words containing a noun,
        // optionally preceded by a determiner
        let mut i = 0;
        while i < words.len() {
            let in_np = matches!(tags[i], PosTag::Adjective | PosTag::Noun | PosTag::Number);
            if in_np {
                let mut j = i;
                let mut has_noun = tags[i] == PosTag::Noun;
                while j + 1 < words.len()
                    && matches!(tags[j + 1], PosTag::Adjective | PosTag::Noun | PosTag::Number)
                {
                    j += 1;
                    has_noun |= tags[j] == PosTag::Noun;
                }
                if has_noun {
                    let mut start = words[i].start;
                    if i > 0 && DETERMINERS.contains(&words[i - 1].text.to_lowercase().as_str()) {
                        start = words[i - 1].start;
                    }
                    spans.push(RawSpan {
                        start,
                        end: words[j].end,
                        kind: SpanKind::NP,
                    });
                }
                i = j + 1;
            } else {
                i += 1;
            }
        }
        Ok(spans)
    }

    fn pos_tags(&self, _pair_id: &str, text: &str) -> Result<Vec<PosSpan>> {
        Ok(text::words(text)
            .iter()
            .map(|w| PosSpan {
                start: w.start,
                end: w.end,
                pos: heuristic_pos(&w.text),
            })
            .collect())
    }
}

// ---------------------------------------------------------------------
// Replay annotator
// ---------------------------------------------------------------------

/// One line of the annotation cache.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnnotationCacheRecord {
    pub pair_id: String,
    pub spans: Vec<RawSpan>,
    pub pos: Vec<PosSpan>,
}

/// Annotator backed by precomputed per-pair annotations; bit-identical
/// across runs.
#[derive(Debug, Clone, Default)]
pub struct ReplayAnnotator {
    records: BTreeMap<String, AnnotationCacheRecord>,
}

impl ReplayAnnotator {
    pub fn from_records(records: Vec<AnnotationCacheRecord>) -> Self {
        ReplayAnnotator {
            records: records.into_iter().map(|r| (r.pair_id.clone(), r)).collect(),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let file =
            std::fs::File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
        let mut records = Vec::new();
        for (idx, line) in std::io::BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
            if line.trim().is_empty() {
                continue;
            }
            let rec: AnnotationCacheRecord =
                serde_json::from_str(&line).map_err(|e| Error::Malformed {
                    line: idx + 1,
                    message: e.to_string(),
                })?;
            records.push(rec);
        }
        Ok(Self::from_records(records))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::new();
        for rec in self.records.values() {
            out.push_str(&serde_json::to_string(rec).expect("record serializes"));
            out.push('\n');
        }
        std::fs::write(path.as_ref(), out)
            .map_err(|e| Error::io(path.as_ref().display().to_string(), e))
    }

    /// Record a live annotator's output over a dataset.
    pub fn record(dataset: &Dataset, annotator: &dyn Annotator) -> Result<Self> {
        let mut records = Vec::with_capacity(dataset.pairs.len());
        for pair in &dataset.pairs {
            records.push(AnnotationCacheRecord {
                pair_id: pair.pair_id.clone(),
                spans: annotator.spans(&pair.pair_id, &pair.summary)?,
                pos: annotator.pos_tags(&pair.pair_id, &pair.summary)?,
            });
        }
        Ok(Self::from_records(records))
    }

    fn lookup(&self, pair_id: &str) -> Result<&AnnotationCacheRecord> {
        if pair_id == "__smoke__" {
            // capability smoke checks cannot be pre-cached; answer any
            // record so registration of a valid cache succeeds
            return self
                .records
                .values()
                .next()
                .ok_or_else(|| Error::UnknownPair(pair_id.to_string()));
        }
        self.records
            .get(pair_id)
            .ok_or_else(|| Error::UnknownPair(pair_id.to_string()))
    }
}

impl Annotator for ReplayAnnotator {
    fn provider_id(&self) -> &str {
        "replay"
    }

    fn capabilities(&self) -> Capabilities {
        Capabilities {
            np_chunking: true,
            ner: true,
            pos_tagging: true,
        }
    }

    fn spans(&self, pair_id: &str, _text: &str) -> Result<Vec<RawSpan>> {
        Ok(self.lookup(pair_id)?.spans.clone())
    }

    fn pos_tags(&self, pair_id: &str, _text: &str) -> Result<Vec<PosSpan>> {
        Ok(self.lookup(pair_id)?.pos.clone())
    }
}
